#include "lightcone/config.hpp"

#include <fstream>
#include <sstream>

#include "lightcone/errors.hpp"

namespace lightcone {
namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse " + what + " '" + s + "'");
  }
}

Box box_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("box must be a non-empty list of [lower, upper] pairs");
  Box b{ParamPoint(static_cast<Eigen::Index>(j.size())), ParamPoint(static_cast<Eigen::Index>(j.size()))};
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& side = j[i];
    if (!side.is_array() || side.size() != 2) throw ConfigError("box side must be [lower, upper]");
    b.lower[static_cast<Eigen::Index>(i)] = side[0].get<double>();
    b.upper[static_cast<Eigen::Index>(i)] = side[1].get<double>();
    if (!(b.lower[static_cast<Eigen::Index>(i)] < b.upper[static_cast<Eigen::Index>(i)])) {
      throw ConfigError("box side with lower >= upper");
    }
  }
  return b;
}

int intrinsic_dim(const std::string& name, int n) {
  return name == "hyperbolic_sphere_product" || name == "hs_product" ? 2 * n : n;
}

}  // namespace

void Tolerances::validate() const {
  const double all[] = {pd_tol,      dual_tol,      duality_tol,  gauss_tol,     deriv_tol,
                        d1_rel_tol,  d2_rel_tol,    flat_d1_tol,  s_flat_tol,    sign_tol,
                        null_tol,    kernel_tol,    embed_tol,    volume_eq_tol, theorem_tol,
                        quadrature_tol, t_cap};
  for (double v : all) {
    if (!(v > 0.0)) throw ConfigError("tolerances must be positive");
  }
}

Box parse_box(const std::string& text, int n) {
  const auto sides = split(text, ',');
  if (sides.empty()) throw ConfigError("empty box '" + text + "'");
  std::vector<std::pair<double, double>> lu;
  for (const auto& s : sides) {
    const auto ab = split(s, ':');
    if (ab.size() != 2) throw ConfigError("box side must look like a:b, got '" + s + "'");
    lu.emplace_back(to_double(ab[0], "box bound"), to_double(ab[1], "box bound"));
  }
  if (lu.size() == 1 && n > 1) lu.resize(static_cast<std::size_t>(n), lu.front());
  if (n > 0 && lu.size() != static_cast<std::size_t>(n)) {
    throw ConfigError("box has " + std::to_string(lu.size()) + " sides, chart dimension is " + std::to_string(n));
  }
  Box b{ParamPoint(static_cast<Eigen::Index>(lu.size())), ParamPoint(static_cast<Eigen::Index>(lu.size()))};
  for (std::size_t i = 0; i < lu.size(); ++i) {
    if (!(lu[i].first < lu[i].second)) throw ConfigError("box side with lower >= upper in '" + text + "'");
    b.lower[static_cast<Eigen::Index>(i)] = lu[i].first;
    b.upper[static_cast<Eigen::Index>(i)] = lu[i].second;
  }
  return b;
}

ParamPoint parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty()) throw ConfigError("empty point");
  ParamPoint x(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) x[static_cast<Eigen::Index>(i)] = to_double(parts[i], "coordinate");
  return x;
}

ChartConfig load_chart_config(const std::string& spec, std::optional<int> n_override) {
  ChartConfig cfg;
  const std::string prefix = "builtin:";
  if (spec.rfind(prefix, 0) == 0) {
    cfg.name = spec.substr(prefix.size());
    if (n_override) cfg.n = *n_override;
  } else {
    std::ifstream in(spec);
    if (!in) throw ConfigError("cannot open chart config '" + spec + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("chart config '" + spec + "': " + e.what());
    }
    if (!j.contains("name")) throw ConfigError("chart config needs a \"name\"");
    cfg.name = j.at("name").get<std::string>();
    cfg.n = j.value("n", 2);
    if (n_override) cfg.n = *n_override;
    if (j.contains("domain")) cfg.domain = box_from_json(j.at("domain"));
    if (j.contains("box")) cfg.box = box_from_json(j.at("box"));
  }
  if (cfg.n < 1) throw ConfigError("chart dimension must be >= 1");
  const Eigen::Index dim = intrinsic_dim(cfg.name, cfg.n);
  if (cfg.domain && cfg.domain->dim() != dim) throw ConfigError("chart domain has the wrong dimension");
  if (cfg.box && cfg.box->dim() != dim) throw ConfigError("quadrature box has the wrong dimension");
  return cfg;
}

ImmersionChart make_chart(const ChartConfig& cfg) { return builtin(cfg.name, cfg.n, cfg.domain); }

Box quadrature_box(const ChartConfig& cfg, const ImmersionChart& chart) {
  return cfg.box ? *cfg.box : default_quadrature_box(chart);
}

nlohmann::ordered_json to_json(const Tolerances& t) {
  nlohmann::ordered_json j;
  j["pd_tol"] = t.pd_tol;
  j["dual_tol"] = t.dual_tol;
  j["duality_tol"] = t.duality_tol;
  j["gauss_tol"] = t.gauss_tol;
  j["deriv_tol"] = t.deriv_tol;
  j["d1_rel_tol"] = t.d1_rel_tol;
  j["d2_rel_tol"] = t.d2_rel_tol;
  j["flat_d1_tol"] = t.flat_d1_tol;
  j["s_flat_tol"] = t.s_flat_tol;
  j["sign_tol"] = t.sign_tol;
  j["null_tol"] = t.null_tol;
  j["kernel_tol"] = t.kernel_tol;
  j["embed_tol"] = t.embed_tol;
  j["volume_eq_tol"] = t.volume_eq_tol;
  j["theorem_tol"] = t.theorem_tol;
  j["quadrature_tol"] = t.quadrature_tol;
  j["t_cap"] = t.t_cap;
  return j;
}

nlohmann::ordered_json to_json(const Box& box) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < box.dim(); ++i) j.push_back({box.lower[i], box.upper[i]});
  return j;
}

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["chart"] = cfg.chart.name;
  j["n"] = cfg.chart.n;
  if (cfg.chart.domain) j["domain"] = to_json(*cfg.chart.domain);
  if (cfg.chart.box) j["box"] = to_json(*cfg.chart.box);
  j["order"] = cfg.order;
  j["epsilon"] = cfg.variation.epsilon;
  j["t_step_factor"] = cfg.variation.t_step_factor;
  j["seed"] = cfg.seed;
  j["tolerances"] = to_json(cfg.tol);
  return j;
}

}  // namespace lightcone
