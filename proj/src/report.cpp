#include "lightcone/report.hpp"

#include <cmath>
#include <sstream>

#include "lightcone/errors.hpp"

namespace lightcone {

Json to_json(const Eigen::VectorXd& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Json to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(std::move(row));
  }
  return j;
}

Json to_json(const DualityResiduals& r) {
  return Json{{"pq", r.pq}, {"qq", r.qq}, {"tangent", r.tangent}, {"max", r.max()}};
}

Json to_json(const PointFrame& f) {
  Json j;
  j["x"] = to_json(f.x);
  j["p"] = to_json(f.p());
  Json d1 = Json::array();
  for (const auto& t : f.jet.d1()) d1.push_back(to_json(t));
  j["tangents"] = std::move(d1);
  j["g"] = to_json(f.g);
  j["q"] = to_json(f.q);
  j["h"] = to_json(f.h);
  j["A"] = to_json(f.A);
  j["trA"] = f.trA;
  j["trA2"] = f.trA2;
  j["trA_squared"] = f.trA * f.trA;
  j["S"] = f.S;
  j["H"] = to_json(f.H);
  j["onb"] = to_json(f.onb);
  j["duality_residuals"] = to_json(f.duality_residuals());
  return j;
}

Json to_json(const IntrinsicCurvatureReport& r) {
  Json j;
  j["S_intrinsic"] = r.S_intrinsic;
  j["S_extrinsic"] = r.S_extrinsic;
  j["gauss_residual"] = r.gauss_residual;
  j["max_sample_residual"] = r.max_sample_residual;
  j["samples"] = r.riemann_samples.size();
  j["metric_condition"] = r.metric_condition;
  j["ill_conditioned"] = r.ill_conditioned;
  return j;
}

Json to_json(const SecondVariationTerms& t) {
  return Json{{"normal_sq", t.normal_sq},
              {"cross", t.cross},
              {"trace_sq", t.trace_sq},
              {"accel_H", t.accel_H},
              {"total", t.total()}};
}

Json to_json(const VariationReport& r) {
  Json j;
  j["kind"] = r.kind;
  j["volume0"] = r.volume0;
  j["closed_form_d1"] = r.closed_form_d1;
  j["fd_d1"] = r.fd_d1;
  j["fd_d1_error"] = r.fd_d1_error;
  j["closed_form_d2"] = r.closed_form_d2;
  j["fd_d2"] = r.fd_d2;
  j["fd_d2_error"] = r.fd_d2_error;
  j["general_d2"] = r.general_d2;
  j["characteristic_d2"] = r.characteristic_d2 ? Json(*r.characteristic_d2) : Json(nullptr);
  j["s_precond_error"] = r.s_precond_error ? Json(*r.s_precond_error) : Json(nullptr);
  j["max_abs_S"] = r.max_abs_S;
  j["rel_err_d1"] = r.rel_err_d1;
  j["rel_err_d2"] = r.rel_err_d2;
  j["sign_check_d2"] = r.sign_check_d2;
  j["general_terms"] = to_json(r.general_terms);
  return j;
}

Json to_json(const RuledMapSample& s) {
  Json j;
  j["t"] = s.t;
  j["x"] = to_json(s.x);
  j["point"] = to_json(s.point);
  j["g_N"] = to_json(s.g_N);
  j["kernel_residual"] = s.kernel_residual;
  j["radius2"] = s.radius2;
  j["xblock_min_eigenvalue"] = s.xblock_min_eigenvalue;
  j["tubular_warning"] = s.tubular_warning;
  if (s.tubular_warning) j["warning"] = s.warning;
  return j;
}

Json to_json(const VolumeEqualityReport& r) {
  Json j;
  j["ts"] = r.ts;
  j["vol_F"] = r.vol_F;
  j["vol_G"] = r.vol_G;
  j["max_abs_diff"] = r.max_abs_diff;
  return j;
}

namespace {

struct Monomial {
  double coef;
  std::vector<int> powers;
};

}  // namespace

ScalarField parse_phi(const std::string& text, Eigen::Index n) {
  if (text == "const") return [](const ParamPoint&) { return 1.0; };
  if (text == "x0") return [](const ParamPoint& x) { return x[0]; };
  if (text == "bilinear") {
    if (n < 2) return [](const ParamPoint& x) { return x[0]; };
    return [](const ParamPoint& x) { return x[0] * x[1]; };
  }
  std::vector<Monomial> terms;
  std::istringstream in(text);
  std::string term;
  while (std::getline(in, term, ';')) {
    const auto at = term.find('@');
    if (at == std::string::npos) throw ConfigError("phi term must look like coef@e1,e2,...: '" + term + "'");
    Monomial m;
    try {
      m.coef = std::stod(term.substr(0, at));
      std::istringstream ps(term.substr(at + 1));
      std::string e;
      while (std::getline(ps, e, ',')) m.powers.push_back(std::stoi(e));
    } catch (const std::exception&) {
      throw ConfigError("cannot parse phi term '" + term + "'");
    }
    if (static_cast<Eigen::Index>(m.powers.size()) != n) {
      throw ConfigError("phi term '" + term + "' has " + std::to_string(m.powers.size()) +
                        " exponents, chart dimension is " + std::to_string(n));
    }
    for (int p : m.powers) {
      if (p < 0) throw ConfigError("negative exponent in phi term '" + term + "'");
    }
    terms.push_back(std::move(m));
  }
  if (terms.empty()) throw ConfigError("unknown phi '" + text + "'");
  return [terms](const ParamPoint& x) {
    double s = 0.0;
    for (const auto& m : terms) {
      double v = m.coef;
      for (std::size_t i = 0; i < m.powers.size(); ++i) v *= std::pow(x[static_cast<Eigen::Index>(i)], m.powers[i]);
      s += v;
    }
    return s;
  };
}

TimeScalarField time_profile(const std::string& name, ScalarField phi0) {
  if (name == "linear") return [phi0](double t, const ParamPoint& x) { return t * phi0(x); };
  if (name == "sin") return [phi0](double t, const ParamPoint& x) { return std::sin(t) * phi0(x); };
  if (name == "square") return [phi0](double t, const ParamPoint& x) { return t * t * phi0(x); };
  throw ConfigError("unknown profile '" + name + "' (linear|sin|square)");
}

}  // namespace lightcone
