#include "lightcone/verify.hpp"

#include <Eigen/LU>

#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "lightcone/errors.hpp"

namespace lightcone {
namespace {

ParamPoint random_point(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ParamPoint x(box.dim());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = box.lower[i] + u(rng) * (box.upper[i] - box.lower[i]);
  return x;
}

ParamPoint random_direction(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ParamPoint v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v / v.norm();
}

// Worst metric must stay below the tolerance.
SuiteResult below(std::string name, double value, double tol, std::string detail = {}) {
  return SuiteResult{std::move(name), value < tol, value, tol, std::move(detail)};
}

SuiteResult guarded(const std::string& name, const std::function<SuiteResult()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    return SuiteResult{name, false, std::nan(""), 0.0, e.what()};
  }
}

Box sample_box(const ImmersionChart& chart) { return chart.domain().shrunk(0.1 * chart.domain().scale()); }

}  // namespace

bool VerifyReport::all_passed() const {
  for (const auto& s : suites) {
    if (!s.passed) return false;
  }
  return !suites.empty();
}

bool scalar_flat(const ImmersionChart& chart, const QuadratureGrid& grid, double s_flat_tol) {
  return max_abs_scalar_curvature(frames_on_grid(chart, grid)) < s_flat_tol;
}

ScalarField random_quadratic(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double c0 = u(rng);
  ParamPoint c1(n);
  for (Eigen::Index i = 0; i < n; ++i) c1[i] = u(rng);
  Matrix c2 = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) c2(i, j) = u(rng);
  }
  return [c0, c1, c2](const ParamPoint& x) { return c0 + c1.dot(x) + x.dot(c2 * x); };
}

VerifyReport run_verify(const ImmersionChart& chart, const Box& qbox, const RunConfig& cfg) {
  const Tolerances& tol = cfg.tol;
  tol.validate();
  VerifyReport rep;
  const Eigen::Index n = chart.n();
  const Box sbox = sample_box(chart);
  const QuadratureGrid grid = build_grid(chart, qbox, cfg.order);
  const bool flat = scalar_flat(chart, grid, tol.s_flat_tol);
  std::uint64_t seed = cfg.seed;

  rep.suites.push_back(guarded("quadrature", [&] {
    double w = 0.0;
    for (double v : grid.weights) w += v;
    const double weights = std::abs(w - qbox.volume()) / qbox.volume();
    // prod_i x_i^k with k = 2 order - 2 is integrated exactly
    const int k = 2 * cfg.order - 2;
    double exact = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      exact *= (std::pow(qbox.upper[i], k + 1) - std::pow(qbox.lower[i], k + 1)) / (k + 1);
    }
    const double got = integrate(grid, [&](const ParamPoint& x) {
      double v = 1.0;
      for (Eigen::Index i = 0; i < n; ++i) v *= std::pow(x[i], k);
      return v;
    });
    const double poly = std::abs(got - exact) / std::max(1e-300, std::abs(exact));
    std::ostringstream os;
    os << "weights " << weights << ", degree-" << k << " monomial " << poly;
    return below("quadrature", std::max(weights, poly), tol.quadrature_tol, os.str());
  }));

  rep.suites.push_back(guarded("duality", [&] {
    std::mt19937_64 rng(seed++);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) worst = std::max(worst, build_frame(chart, random_point(sbox, rng)).duality_residuals().max());
    return below("duality", worst, tol.duality_tol, "50 random points");
  }));

  rep.suites.push_back(guarded("gauss", [&] {
    std::mt19937_64 rng(seed++);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) worst = std::max(worst, intrinsic_oracle(chart, random_point(sbox, rng)).gauss_residual);
    return below("gauss", worst, tol.gauss_tol, "|S_intrinsic + 2(n-1) trA| at 5 random points");
  }));

  rep.suites.push_back(guarded("dual_derivative", [&] {
    std::mt19937_64 rng(seed++);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const ParamPoint x = random_point(sbox, rng);
      const ParamPoint v = random_direction(n, rng);
      const PointFrame f = build_frame(chart, x);
      worst = std::max(worst, dual_derivative_residual(f, v, dual_derivative(chart, x, v)));
    }
    return below("dual_derivative", worst, tol.deriv_tol, "|d_V q + A V| at 20 random samples");
  }));

  rep.suites.push_back(guarded("first_variation", [&] {
    double worst = 0.0;
    for (int k = 0; k < 3; ++k) {
      const VariationSpec spec = admissible_lift(chart, qbox, random_quadratic(n, seed++), cfg.variation);
      const VariationReport r = variation_report(chart, grid, spec, {tol.s_flat_tol, tol.sign_tol});
      worst = std::max(worst, r.rel_err_d1);
    }
    return below("first_variation", worst, tol.d1_rel_tol, "closed form vs Richardson FD, 3 random phi0");
  }));

  rep.suites.push_back(guarded("stationarity", [&] {
    if (flat) {
      double worst = 0.0;
      for (int k = 0; k < 3; ++k) {
        const VariationSpec spec = admissible_lift(chart, qbox, random_quadratic(n, seed++), cfg.variation);
        const FdEstimate d1 = fd_derivative([&](double t) { return volume(chart, grid, spec, t); }, 1,
                                            cfg.variation.t_step());
        worst = std::max(worst, std::abs(d1.value));
      }
      return below("stationarity", worst, tol.flat_d1_tol, "scalar-flat: |fd_d1| for 3 random phi0");
    }
    const BumpWindow b{qbox};
    const double intb = integrate(grid, [&](const ParamPoint& x) {
      return b(x) * std::sqrt(validate_spacelike(chart, x).determinant());
    });
    const VariationSpec spec = admissible_lift(chart, qbox, [](const ParamPoint&) { return 1.0; }, cfg.variation);
    const FdEstimate d1 =
        fd_derivative([&](double t) { return volume(chart, grid, spec, t); }, 1, cfg.variation.t_step());
    std::ostringstream os;
    os << "not scalar-flat: |fd_d1| = " << std::abs(d1.value) << " must exceed 0.1 * int b dV = " << 0.1 * intb;
    return SuiteResult{"stationarity", std::abs(d1.value) > 0.1 * intb, std::abs(d1.value), 0.1 * intb, os.str()};
  }));

  rep.suites.push_back(guarded("second_variation", [&] {
    const ReportOptions ro{tol.s_flat_tol, tol.sign_tol};
    if (flat) {
      double worst = 0.0;
      bool sign_ok = true;
      for (int k = 0; k < 3; ++k) {
        const VariationSpec spec = admissible_lift(chart, qbox, random_quadratic(n, seed++), cfg.variation);
        const VariationReport r = variation_report(chart, grid, spec, ro);
        const double c = r.characteristic_d2.value_or(std::nan(""));
        worst = std::max({worst, r.rel_err_d2, relative_error(r.general_d2, r.fd_d2), relative_error(r.general_d2, c)});
        sign_ok = sign_ok && c <= tol.sign_tol;
      }
      SuiteResult s = below("second_variation", worst, tol.d2_rel_tol,
                            "characteristic, general and FD agree; characteristic value nonpositive");
      s.passed = s.passed && sign_ok;
      if (!sign_ok) s.detail += " (positive characteristic second variation)";
      return s;
    }
    const VariationSpec spec = admissible_lift(chart, qbox, [](const ParamPoint&) { return 1.0; }, cfg.variation);
    const VariationReport r = variation_report(chart, grid, spec, ro);
    SuiteResult s = below("second_variation", relative_error(r.general_d2, r.fd_d2), tol.d2_rel_tol,
                          "not scalar-flat: general formula vs FD; characteristic formula gated");
    s.passed = s.passed && r.s_precond_error.has_value();
    return s;
  }));

  rep.suites.push_back(guarded("null_slices", [&] {
    std::mt19937_64 rng(seed++);
    std::uniform_real_distribution<double> ut(-0.5, 0.5);
    NullspaceOptions no;
    no.t_cap = tol.t_cap;
    double radius = 0.0;
    double kernel = 0.0;
    int warnings = 0;
    for (int k = 0; k < 50; ++k) {
      const RuledMapSample s = ruled_map(chart, ut(rng), random_point(sbox, rng), no);
      radius = std::max(radius, std::abs(s.radius2 - 2.0 * s.t));
      kernel = std::max(kernel, s.kernel_residual);
      warnings += s.tubular_warning ? 1 : 0;
    }
    std::ostringstream os;
    os << "|<Phi,Phi> - 2t| = " << radius << ", kernel residual " << kernel << ", tubular warnings " << warnings;
    return SuiteResult{"null_slices", radius < tol.null_tol && kernel < tol.kernel_tol && warnings == 0,
                       std::max(radius, kernel), tol.null_tol, os.str()};
  }));

  rep.suites.push_back(guarded("embed_base", [&] {
    std::mt19937_64 rng(seed++);
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) worst = std::max(worst, embed_base_residual(chart, random_point(sbox, rng)));
    return below("embed_base", worst, tol.embed_tol, "induced metric of Phi(0, .) vs chart metric");
  }));

  rep.suites.push_back(guarded("null_theorem", [&] {
    std::mt19937_64 rng(seed++);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double amp = 0.01 * qbox.scale();
    if (flat) {
      const ParamPoint v = amp * random_direction(n, rng);
      const NullVariation nv = make_windowed_null_variation(qbox, random_quadratic(n, seed++), u(rng), u(rng),
                                                            [v](const ParamPoint&) { return v; });
      const VariationSpec g = null_family(chart, nv);
      auto vol = [&](double t) { return volume(chart, grid, g, t); };
      const double d1 = std::abs(fd_derivative(vol, 1, cfg.variation.t_step()).value);
      const double d2 = fd_derivative(vol, 2, cfg.variation.t_step()).value;
      std::ostringstream os;
      os << "scalar-flat: |fd_d1 Vol_G| = " << d1 << ", fd_d2 Vol_G = " << d2;
      return SuiteResult{"null_theorem", d1 < tol.theorem_tol && d2 <= tol.theorem_tol, d1, tol.theorem_tol,
                         os.str()};
    }
    const NullVariation nv = make_windowed_null_variation(
        qbox, [](const ParamPoint&) { return 1.0; }, 1.0, 0.0, [n](const ParamPoint&) { return ParamPoint::Zero(n); });
    const VariationSpec g = null_family(chart, nv);
    const double d1 =
        std::abs(fd_derivative([&](double t) { return volume(chart, grid, g, t); }, 1, cfg.variation.t_step()).value);
    std::ostringstream os;
    os << "not scalar-flat: |fd_d1 Vol_G| = " << d1 << " must exceed 0.05";
    return SuiteResult{"null_theorem", d1 > 0.05, d1, 0.05, os.str()};
  }));

  rep.suites.push_back(guarded("conversion", [&] {
    std::mt19937_64 rng(seed++);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const ParamPoint v = 0.01 * qbox.scale() * random_direction(n, rng);
    const NullVariation nv = make_windowed_null_variation(qbox, random_quadratic(n, seed++), u(rng), u(rng),
                                                          [v](const ParamPoint&) { return v; });
    const ConvertedVariation cv = convert_null_variation(chart, nv);
    const double t = std::min(0.2, cv.delta);
    const VolumeEqualityReport r = volume_equality_check(chart, grid, nv, cv.spec, {-t, -0.5 * t, 0.0, 0.5 * t, t});
    std::ostringstream os;
    os << "max |Vol_F - Vol_G| over 5 t, delta = " << cv.delta;
    return below("conversion", r.max_abs_diff, tol.volume_eq_tol, os.str());
  }));

  return rep;
}

Json to_json(const SuiteResult& r) {
  Json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  j["value"] = std::isnan(r.value) ? Json(nullptr) : Json(r.value);
  j["tolerance"] = r.tolerance;
  j["detail"] = r.detail;
  return j;
}

Json to_json(const VerifyReport& r) {
  Json j;
  Json suites = Json::array();
  for (const auto& s : r.suites) suites.push_back(to_json(s));
  j["suites"] = std::move(suites);
  j["all_passed"] = r.all_passed();
  return j;
}

}  // namespace lightcone
