#pragma once

#include <string>

#include <json.hpp>

#include "lightcone/frame.hpp"
#include "lightcone/functional.hpp"
#include "lightcone/nullspace.hpp"

namespace lightcone {

using Json = nlohmann::ordered_json;

Json to_json(const Eigen::VectorXd& v);
Json to_json(const Matrix& m);
Json to_json(const DualityResiduals& r);
Json to_json(const PointFrame& f);
Json to_json(const IntrinsicCurvatureReport& r);
Json to_json(const SecondVariationTerms& t);
Json to_json(const VariationReport& r);
Json to_json(const RuledMapSample& s);
Json to_json(const VolumeEqualityReport& r);

// Builtin names "const", "x0", "bilinear", or a polynomial
// "c@e1,e2,...;c@e1,e2,..." meaning sum_k c_k prod_i x_i^{e_ki}.
ScalarField parse_phi(const std::string& text, Eigen::Index n);

// phi(t,x) = s(t) phi0(x) with s = t, sin t or t^2.
TimeScalarField time_profile(const std::string& name, ScalarField phi0);

}  // namespace lightcone
