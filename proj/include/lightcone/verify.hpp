#pragma once

#include <string>
#include <vector>

#include "lightcone/config.hpp"
#include "lightcone/report.hpp"

namespace lightcone {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // worst observed metric
  double tolerance = 0.0;  // threshold the metric was held to
  std::string detail;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const;
};

// Invariant suites on one chart. Sample counts are modest; the acceptance
// binary runs the full-size versions.
VerifyReport run_verify(const ImmersionChart& chart, const Box& qbox, const RunConfig& cfg);

// Whether the chart is scalar-flat on the grid (max |S| < s_flat_tol).
bool scalar_flat(const ImmersionChart& chart, const QuadratureGrid& grid, double s_flat_tol);

// c0 + sum c_i x_i + sum_{i<=j} c_ij x_i x_j with coefficients in [-1, 1].
ScalarField random_quadratic(Eigen::Index n, std::uint64_t seed);

Json to_json(const SuiteResult& r);
Json to_json(const VerifyReport& r);

}  // namespace lightcone
