#include "lightcone/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

#include "lightcone/config.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/nullspace.hpp"
#include "lightcone/report.hpp"
#include "lightcone/verify.hpp"

namespace lightcone {
namespace {

struct CommonArgs {
  std::string chart;
  std::optional<int> n;
  std::string box;
  int order = 16;
  std::string report;
  bool verbose = false;
  unsigned seed = 0x5eed;
  double epsilon = 1.0;
  std::vector<std::string> tol;
};

struct VariationArgs {
  std::string phi = "const";
  std::string profile = "linear";
  std::string kind = "characteristic";
  double t = 0.0;
  std::string sweep;
  std::string csv;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--chart", a.chart, "builtin:NAME or path to a chart JSON")->required();
  sub->add_option("--n", a.n, "chart dimension parameter");
  sub->add_option("--box", a.box, "quadrature box a:b,c:d,... (a single a:b is repeated)");
  sub->add_option("--order", a.order, "Gauss-Legendre points per axis")->check(CLI::Range(2, 64));
  sub->add_option("--report", a.report, "write the JSON report here instead of stdout");
  sub->add_flag("--verbose", a.verbose, "per-node diagnostics");
  sub->add_option("--seed", a.seed, "seed for sampled checks");
  sub->add_option("--epsilon", a.epsilon, "variation half-range; the t step is 1e-2 * epsilon");
  sub->add_option("--tol", a.tol, "override a tolerance, name=value");
}

void add_variation(CLI::App* sub, VariationArgs& v) {
  sub->add_option("--phi", v.phi, "const|x0|bilinear or polynomial c@e1,e2;...");
  sub->add_option("--profile", v.profile, "time profile linear|sin|square")
      ->check(CLI::IsMember({"linear", "sin", "square"}));
  sub->add_option("--kind", v.kind, "characteristic|general")->check(CLI::IsMember({"characteristic", "general"}));
  sub->add_option("--sweep", v.sweep, "Vol(t) sweep t0:t1:steps");
  sub->add_option("--csv", v.csv, "write the sweep as CSV here");
}

void apply_tolerance(Tolerances& tol, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq);
  std::map<std::string, double*> fields = {
      {"pd_tol", &tol.pd_tol},         {"dual_tol", &tol.dual_tol},         {"duality_tol", &tol.duality_tol},
      {"gauss_tol", &tol.gauss_tol},   {"deriv_tol", &tol.deriv_tol},       {"d1_rel_tol", &tol.d1_rel_tol},
      {"d2_rel_tol", &tol.d2_rel_tol}, {"flat_d1_tol", &tol.flat_d1_tol},   {"s_flat_tol", &tol.s_flat_tol},
      {"sign_tol", &tol.sign_tol},     {"null_tol", &tol.null_tol},         {"kernel_tol", &tol.kernel_tol},
      {"embed_tol", &tol.embed_tol},   {"volume_eq_tol", &tol.volume_eq_tol}, {"theorem_tol", &tol.theorem_tol},
      {"quadrature_tol", &tol.quadrature_tol}, {"t_cap", &tol.t_cap}};
  auto it = fields.find(key);
  if (it == fields.end()) throw ConfigError("unknown tolerance '" + key + "'");
  try {
    *it->second = std::stod(kv.substr(eq + 1));
  } catch (const std::exception&) {
    throw ConfigError("cannot parse tolerance value in '" + kv + "'");
  }
}

RunConfig make_config(const CommonArgs& a) {
  RunConfig cfg;
  cfg.chart = load_chart_config(a.chart, a.n);
  cfg.order = a.order;
  cfg.report_path = a.report;
  cfg.verbose = a.verbose;
  cfg.seed = a.seed;
  if (!(a.epsilon > 0.0)) throw ConfigError("--epsilon must be positive");
  cfg.variation.epsilon = a.epsilon;
  for (const auto& kv : a.tol) apply_tolerance(cfg.tol, kv);
  cfg.tol.validate();
  return cfg;
}

struct Setup {
  RunConfig cfg;
  ImmersionChart chart;
  Box box;
};

Setup setup(const CommonArgs& a) {
  RunConfig cfg = make_config(a);
  ImmersionChart chart = make_chart(cfg.chart);
  if (!a.box.empty()) cfg.chart.box = parse_box(a.box, static_cast<int>(chart.n()));
  Box box = quadrature_box(cfg.chart, chart);
  return Setup{std::move(cfg), std::move(chart), std::move(box)};
}

Json header(const std::string& command, const Setup& s) {
  Json j;
  j["command"] = command;
  Json c = to_json(s.cfg);
  c["box"] = to_json(s.box);
  j["config"] = std::move(c);
  j["chart"] = Json{{"name", s.chart.name()},
                    {"intrinsic_dim", s.chart.n()},
                    {"ambient_dim", s.chart.ambient_dim()},
                    {"domain", to_json(s.chart.domain())},
                    {"fd_step", s.chart.fd_step()}};
  return j;
}

void emit(const Json& j, const std::string& path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write report '" + path + "'");
  f << text;
}

std::vector<double> parse_sweep(const std::string& text) {
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw ConfigError("--sweep expects t0:t1:steps, got '" + text + "'");
  }
  double t0 = 0.0, t1 = 0.0;
  int steps = 0;
  try {
    t0 = std::stod(a);
    t1 = std::stod(b);
    steps = std::stoi(c);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse --sweep '" + text + "'");
  }
  if (steps < 1) throw ConfigError("--sweep needs at least one step");
  std::vector<double> ts;
  if (steps == 1) return {t0};
  for (int k = 0; k < steps; ++k) ts.push_back(t0 + (t1 - t0) * k / (steps - 1));
  return ts;
}

VariationSpec build_variation(const Setup& s, const VariationArgs& v) {
  const ScalarField phi0 = parse_phi(v.phi, s.chart.n());
  if (v.kind == "general") return radial_variation(s.chart, s.box, phi0, s.cfg.variation);
  if (v.profile == "linear") return admissible_lift(s.chart, s.box, phi0, s.cfg.variation);
  return make_characteristic_variation(s.chart, s.box, time_profile(v.profile, phi0), s.cfg.variation);
}

Json sweep_json(const Setup& s, const QuadratureGrid& grid, const VariationSpec& spec, const VariationArgs& v) {
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "t,volume\n" << std::setprecision(17);
  for (double t : parse_sweep(v.sweep)) {
    const double vol = volume(s.chart, grid, spec, t, s.cfg.tol.pd_tol);
    rows.push_back(Json{{"t", t}, {"volume", vol}});
    csv << t << ',' << vol << '\n';
  }
  if (!v.csv.empty()) {
    std::ofstream f(v.csv);
    if (!f) throw ConfigError("cannot write CSV '" + v.csv + "'");
    f << csv.str();
  }
  return rows;
}

int cmd_frame(const CommonArgs& a, const std::string& at, std::ostream& out) {
  const Setup s = setup(a);
  const ParamPoint x = at.empty() ? s.chart.domain().center() : parse_point(at);
  if (x.size() != s.chart.n()) throw ConfigError("--at has the wrong number of coordinates");
  const PointFrame f = build_frame(s.chart, x, s.cfg.tol.pd_tol, s.cfg.tol.dual_tol);
  Json j = header("frame", s);
  j["frame"] = to_json(f);
  const IntrinsicCurvatureReport ir = intrinsic_oracle(s.chart, x);
  j["intrinsic"] = to_json(ir);
  Json dq = Json::array();
  double worst_dq = 0.0;
  for (Eigen::Index i = 0; i < s.chart.n(); ++i) {
    const ParamPoint e = ParamPoint::Unit(s.chart.n(), i);
    const double r = dual_derivative_residual(f, e, dual_derivative(s.chart, x, e));
    worst_dq = std::max(worst_dq, r);
    dq.push_back(r);
  }
  j["dual_derivative_residuals"] = std::move(dq);
  const bool ok_dual = f.duality_residuals().max() < s.cfg.tol.duality_tol;
  const bool ok_gauss = ir.gauss_residual < s.cfg.tol.gauss_tol;
  const bool ok_dq = worst_dq < s.cfg.tol.deriv_tol;
  j["checks"] = Json{{"duality", ok_dual}, {"gauss", ok_gauss}, {"dual_derivative", ok_dq}};
  emit(j, s.cfg.report_path, out);
  return ok_dual && ok_gauss && ok_dq ? 0 : 2;
}

int cmd_volume(const CommonArgs& a, const VariationArgs& v, bool with_variation, std::ostream& out) {
  const Setup s = setup(a);
  const QuadratureGrid grid = build_grid(s.chart, s.box, s.cfg.order);
  Json j = header("volume", s);
  j["nodes"] = grid.size();
  j["volume"] = volume(s.chart, grid);
  if (with_variation) {
    const VariationSpec spec = build_variation(s, v);
    j["variation"] = Json{{"phi", v.phi}, {"profile", v.profile}, {"kind", to_string(spec.kind)}};
    j["t"] = v.t;
    j["volume_t"] = volume(s.chart, grid, spec, v.t, s.cfg.tol.pd_tol);
    if (!v.sweep.empty()) j["sweep"] = sweep_json(s, grid, spec, v);
  }
  emit(j, s.cfg.report_path, out);
  return 0;
}

int cmd_vary(const CommonArgs& a, const VariationArgs& v, std::ostream& out) {
  const Setup s = setup(a);
  const QuadratureGrid grid = build_grid(s.chart, s.box, s.cfg.order);
  const VariationSpec spec = build_variation(s, v);
  const VariationReport r = variation_report(s.chart, grid, spec, {s.cfg.tol.s_flat_tol, s.cfg.tol.sign_tol});
  Json j = header("vary", s);
  j["variation"] = Json{{"phi", v.phi}, {"profile", v.kind == "general" ? "radial" : v.profile}, {"kind", v.kind}};
  j["nodes"] = grid.size();
  j["report"] = to_json(r);
  const bool d1 = r.rel_err_d1 < s.cfg.tol.d1_rel_tol;
  const bool d2 = r.rel_err_d2 < s.cfg.tol.d2_rel_tol;
  Json checks{{"d1_agrees", d1}, {"d2_agrees", d2}};
  bool sign = true;
  if (r.characteristic_d2) {
    sign = r.sign_check_d2;
    checks["nonpositive_d2"] = sign;
  } else {
    checks["nonpositive_d2"] = nullptr;
  }
  j["checks"] = std::move(checks);
  if (!v.sweep.empty()) j["sweep"] = sweep_json(s, grid, spec, v);
  if (s.cfg.verbose) {
    const SecondVariationResult sv = second_variation_general(s.chart, grid, spec);
    Json nodes = Json::array();
    for (std::size_t k = 0; k < grid.size(); ++k) {
      Json node = to_json(sv.per_node[k]);
      node["x"] = to_json(grid.nodes[k]);
      node["weight"] = grid.weights[k];
      nodes.push_back(std::move(node));
    }
    j["per_node"] = std::move(nodes);
  }
  emit(j, s.cfg.report_path, out);
  return d1 && d2 && sign ? 0 : 2;
}

int cmd_nullspace(const CommonArgs& a, int t_samples, std::vector<std::string> checks, const std::string& phi,
                  std::ostream& out) {
  const Setup s = setup(a);
  const Tolerances& tol = s.cfg.tol;
  if (t_samples < 2) throw ConfigError("--t-samples must be at least 2");
  if (checks.empty()) checks = {"slices", "kernel", "theorem"};
  NullspaceOptions no;
  no.t_cap = tol.t_cap;
  const Eigen::Index n = s.chart.n();
  const Box sbox = s.chart.domain().shrunk(0.1 * s.chart.domain().scale());
  std::mt19937_64 rng(s.cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  std::vector<RuledMapSample> samples;
  for (int k = 0; k < t_samples; ++k) {
    const double t = -0.5 + static_cast<double>(k) / (t_samples - 1);
    ParamPoint x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = sbox.lower[i] + u(rng) * (sbox.upper[i] - sbox.lower[i]);
    samples.push_back(ruled_map(s.chart, t, x, no));
  }

  Json j = header("nullspace", s);
  j["t_samples"] = t_samples;
  bool ok = true;
  for (const auto& c : checks) {
    if (c == "slices") {
      double radius = 0.0;
      double min_eig = std::numeric_limits<double>::infinity();
      int warnings = 0;
      for (const auto& r : samples) {
        radius = std::max(radius, std::abs(r.radius2 - 2.0 * r.t));
        min_eig = std::min(min_eig, r.xblock_min_eigenvalue);
        warnings += r.tubular_warning ? 1 : 0;
      }
      const bool pass = radius < tol.null_tol && warnings == 0;
      ok = ok && pass;
      j["slices"] = Json{{"max_radius_residual", radius},
                         {"min_xblock_eigenvalue", min_eig},
                         {"tubular_warnings", warnings},
                         {"passed", pass}};
    } else if (c == "kernel") {
      double kernel = 0.0;
      for (const auto& r : samples) kernel = std::max(kernel, r.kernel_residual);
      double embed = 0.0;
      for (int k = 0; k < 5; ++k) embed = std::max(embed, embed_base_residual(s.chart, samples[static_cast<std::size_t>(k) % samples.size()].x));
      const bool pass = kernel < tol.kernel_tol && embed < tol.embed_tol;
      ok = ok && pass;
      j["kernel"] = Json{{"max_kernel_residual", kernel}, {"embed_base_residual", embed}, {"passed", pass}};
    } else if (c == "theorem") {
      const QuadratureGrid grid = build_grid(s.chart, s.box, s.cfg.order);
      const bool flat = scalar_flat(s.chart, grid, tol.s_flat_tol);
      ParamPoint v = ParamPoint::Zero(n);
      v[0] = 0.01 * s.box.scale();
      const NullVariation nv = make_windowed_null_variation(s.box, parse_phi(phi, n), 1.0, 0.5,
                                                            [v](const ParamPoint&) { return v; });
      const VariationSpec g = null_family(s.chart, nv);
      auto vol = [&](double t) { return volume(s.chart, grid, g, t, tol.pd_tol); };
      const FdEstimate d1 = fd_derivative(vol, 1, s.cfg.variation.t_step());
      const FdEstimate d2 = fd_derivative(vol, 2, s.cfg.variation.t_step());
      const ConvertedVariation cv = convert_null_variation(s.chart, nv);
      const double t = std::min(0.2, cv.delta);
      const VolumeEqualityReport eq =
          volume_equality_check(s.chart, grid, nv, cv.spec, {-t, -0.5 * t, 0.0, 0.5 * t, t});
      bool pass = eq.max_abs_diff < tol.volume_eq_tol;
      if (flat) {
        pass = pass && std::abs(d1.value) < tol.theorem_tol && d2.value <= tol.theorem_tol;
      } else {
        pass = pass && std::abs(d1.value) > 0.05;
      }
      ok = ok && pass;
      j["theorem"] = Json{{"scalar_flat", flat},       {"fd_d1_vol_G", d1.value}, {"fd_d2_vol_G", d2.value},
                          {"delta", cv.delta},         {"volume_equality", to_json(eq)}, {"passed", pass}};
    } else {
      throw ConfigError("unknown --check '" + c + "' (slices|kernel|theorem)");
    }
  }
  if (s.cfg.verbose) {
    Json arr = Json::array();
    for (const auto& r : samples) arr.push_back(to_json(r));
    j["samples"] = std::move(arr);
  }
  emit(j, s.cfg.report_path, out);
  return ok ? 0 : 2;
}

int cmd_verify(const CommonArgs& a, std::ostream& out) {
  const Setup s = setup(a);
  const VerifyReport r = run_verify(s.chart, s.box, s.cfg);
  Json j = header("verify", s);
  const Json body = to_json(r);
  j["suites"] = body["suites"];
  j["all_passed"] = body["all_passed"];
  emit(j, s.cfg.report_path, out);
  return r.all_passed() ? 0 : 2;
}

bool is_usage_error(const Error& e) {
  return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DimensionError*>(&e) ||
         dynamic_cast<const DomainError*>(&e) || dynamic_cast<const SpecError*>(&e);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"light-cone hypersurface geometry engine", "lightcone"};
  app.require_subcommand(1);

  CommonArgs common;
  VariationArgs var;
  std::string at;
  int t_samples = 50;
  std::vector<std::string> checks;
  std::string null_phi = "const";

  CLI::App* frame = app.add_subcommand("frame", "pointwise geometry at one chart point");
  add_common(frame, common);
  frame->add_option("--at", at, "parameter point x1,x2,...");

  CLI::App* vol = app.add_subcommand("volume", "volume of the quadrature box, optionally along a variation");
  add_common(vol, common);
  add_variation(vol, var);
  vol->add_option("--t", var.t, "variation time");

  CLI::App* vary = app.add_subcommand("vary", "closed-form variations against finite differences");
  add_common(vary, common);
  add_variation(vary, var);

  CLI::App* null = app.add_subcommand("nullspace", "ruled map, degenerate metric and volume conversion checks");
  add_common(null, common);
  null->add_option("--t-samples", t_samples, "number of sampled (t, x) pairs");
  null->add_option("--check", checks, "slices|kernel|theorem (repeatable; default all)");
  null->add_option("--phi", null_phi, "fiber profile for the theorem check");

  CLI::App* verify = app.add_subcommand("verify", "run every invariant suite on a chart");
  add_common(verify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (frame->parsed()) return cmd_frame(common, at, out);
    if (vol->parsed()) return cmd_volume(common, var, vol->count("--phi") > 0 || vol->count("--sweep") > 0, out);
    if (vary->parsed()) return cmd_vary(common, var, out);
    if (null->parsed()) return cmd_nullspace(common, t_samples, checks, null_phi, out);
    if (verify->parsed()) return cmd_verify(common, out);
  } catch (const Error& e) {
    err << "lightcone: " << e.what() << "\n";
    return is_usage_error(e) ? 1 : 2;
  } catch (const nlohmann::json::exception& e) {
    err << "lightcone: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lightcone
