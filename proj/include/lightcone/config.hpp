#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "lightcone/chart.hpp"
#include "lightcone/functional.hpp"

namespace lightcone {

// Every numeric threshold used by the CLI lives here and is echoed into reports.
struct Tolerances {
  double pd_tol = 1e-12;
  double dual_tol = 1e-12;
  double duality_tol = 1e-9;
  double gauss_tol = 1e-5;
  double deriv_tol = 1e-6;
  double d1_rel_tol = 1e-5;
  double d2_rel_tol = 1e-4;
  double flat_d1_tol = 1e-7;
  double s_flat_tol = 1e-6;
  double sign_tol = 1e-12;
  double null_tol = 1e-9;
  double kernel_tol = 1e-8;
  double embed_tol = 1e-10;
  double volume_eq_tol = 1e-6;
  double theorem_tol = 1e-6;
  double quadrature_tol = 1e-12;
  double t_cap = 1.0;

  // Throws ConfigError unless every value is positive.
  void validate() const;
};

struct ChartConfig {
  std::string name;
  int n = 2;
  std::optional<Box> domain;
  std::optional<Box> box;  // quadrature box
};

struct RunConfig {
  ChartConfig chart;
  int order = 16;
  Tolerances tol;
  VariationOptions variation;
  std::string report_path;  // empty: stdout
  bool verbose = false;
  unsigned seed = 0x5eed;
};

// "a:b,c:d,..." -> box. A single "a:b" is repeated to dimension n when n > 0.
Box parse_box(const std::string& text, int n = 0);
// "x1,x2,..." -> point.
ParamPoint parse_point(const std::string& text);

// "builtin:NAME" or a path to a JSON file {"name", "n", "domain", "box"}.
ChartConfig load_chart_config(const std::string& spec, std::optional<int> n_override);
ImmersionChart make_chart(const ChartConfig& cfg);
Box quadrature_box(const ChartConfig& cfg, const ImmersionChart& chart);

nlohmann::ordered_json to_json(const Tolerances& tol);
nlohmann::ordered_json to_json(const Box& box);
nlohmann::ordered_json to_json(const RunConfig& cfg);

}  // namespace lightcone
