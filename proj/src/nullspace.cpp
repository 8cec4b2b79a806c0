#include "lightcone/nullspace.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"
#include "lightcone/frame.hpp"
#include "lightcone/parallel.hpp"

namespace lightcone {
namespace {

AmbientVector dual_at(const ImmersionChart& chart, const ParamPoint& x) {
  return dual_map(chart.value_unchecked(x), chart.tangents(x));
}

double stencil_margin(const ImmersionChart& chart) {
  const double reach = fd::kStencilReach * chart.fd_step();
  return chart.backend() == JetBackend::finite_difference ? 2.0 * reach : reach;
}

void check_sample(const ImmersionChart& chart, double t, const ParamPoint& x, const NullspaceOptions& opt) {
  if (x.size() != chart.n()) throw DimensionError("ruled map: parameter point has wrong dimension");
  if (!(std::abs(t) <= opt.t_cap)) {
    std::ostringstream os;
    os << "ruled map: |t| = " << std::abs(t) << " exceeds the tubular cap " << opt.t_cap;
    throw DomainError(os.str());
  }
  if (!chart.domain().contains(x, stencil_margin(chart))) {
    std::ostringstream os;
    os << "ruled map: (" << x.transpose() << ") is not inside the domain of '" << chart.name()
       << "' with stencil margin";
    throw DomainError(os.str());
  }
}

double max_abs(const ParamPoint& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

AmbientVector ruled_point(const ImmersionChart& chart, double t, const ParamPoint& x,
                          const NullspaceOptions& options) {
  check_sample(chart, t, x, options);
  return chart.value_unchecked(x) + t * dual_at(chart, x);
}

RuledMapSample ruled_map(const ImmersionChart& chart, double t, const ParamPoint& x,
                         const NullspaceOptions& options) {
  check_sample(chart, t, x, options);
  const Eigen::Index n = chart.n();
  const ImmersionChart::Evaluator phi = [&chart, n](const ParamPoint& y) -> AmbientVector {
    const ParamPoint xs = y.tail(n);
    return chart.value_unchecked(xs) + y[0] * dual_at(chart, xs);
  };
  ParamPoint y(n + 1);
  y[0] = t;
  y.tail(n) = x;

  RuledMapSample s;
  s.t = t;
  s.x = x;
  s.point = phi(y);
  s.radius2 = inner(s.point, s.point);
  s.g_N = gram(fd_tangents(phi, y, chart.fd_step()));
  s.kernel_residual = s.g_N.col(0).norm();
  const Matrix xblock = s.g_N.bottomRightCorner(n, n);
  s.xblock_min_eigenvalue = min_eigenvalue(xblock);
  const Eigen::LLT<Matrix> llt(xblock);
  if (llt.info() != Eigen::Success || !(s.xblock_min_eigenvalue > options.rank_tol)) {
    std::ostringstream os;
    os << "TubularRangeWarning: x-block of g_N at t = " << t << " has minimum eigenvalue "
       << s.xblock_min_eigenvalue;
    s.tubular_warning = true;
    s.warning = os.str();
  }
  return s;
}

ParamPoint embed_base(const ParamPoint& x) {
  ParamPoint y(x.size() + 1);
  y[0] = 0.0;
  y.tail(x.size()) = x;
  return y;
}

double embed_base_residual(const ImmersionChart& chart, const ParamPoint& x) {
  const RuledMapSample s = ruled_map(chart, 0.0, x);
  const Matrix g = validate_spacelike(chart, x);
  const Eigen::Index n = chart.n();
  const double block = (s.g_N.bottomRightCorner(n, n) - g).cwiseAbs().maxCoeff();
  const double r = std::max(block, s.g_N.row(0).cwiseAbs().maxCoeff());
  return r / std::max(1.0, g.cwiseAbs().maxCoeff());
}

NullVariation make_windowed_null_variation(const Box& box, ScalarField phi0, double c1, double c2,
                                           std::function<ParamPoint(const ParamPoint&)> drift,
                                           double epsilon) {
  if (!phi0) throw SpecError("null variation: phi0 is empty");
  if (!drift) throw SpecError("null variation: drift is empty");
  const BumpWindow b{box};
  NullVariation nv;
  nv.box = box;
  nv.epsilon = epsilon;
  nv.tau = [phi0, b, c1, c2](double t, const ParamPoint& x) {
    const double w = b(x);
    if (w == 0.0 || t == 0.0) return 0.0;
    return (c1 * t + c2 * t * t) * phi0(x) * w;
  };
  nv.alpha = [drift, b](double t, const ParamPoint& x) -> ParamPoint {
    const double w = b(x);
    if (w == 0.0 || t == 0.0) return x;
    return x + (t * w) * drift(x);
  };
  return nv;
}

void validate_null_variation(const NullVariation& nv) {
  if (!nv.tau || !nv.alpha) throw SpecError("null variation: tau and alpha are required");
  if (!(nv.epsilon > 0.0)) throw SpecError("null variation: epsilon must be positive");
  const QuadratureGrid probe = build_grid(nv.box, 5);
  for (const auto& x : probe.nodes) {
    const double tau0 = nv.tau(0.0, x);
    if (!(std::abs(tau0) <= 1e-14)) {
      std::ostringstream os;
      os << "null variation: tau(0, x) = " << tau0 << " at (" << x.transpose() << ")";
      throw SpecError(os.str());
    }
    if (!(max_abs(nv.alpha(0.0, x) - x) <= 1e-14)) {
      std::ostringstream os;
      os << "null variation: alpha(0, .) is not the identity at (" << x.transpose() << ")";
      throw SpecError(os.str());
    }
  }
  // Boundary collar: faces of the box and a thin layer inside.
  const Eigen::Index n = nv.box.dim();
  const std::vector<double> layer = {-1.0, -0.999, 0.999, 1.0};
  const std::vector<double> ts = {-nv.epsilon, -0.5 * nv.epsilon, 0.5 * nv.epsilon, nv.epsilon};
  const QuadratureGrid other = n > 1 ? build_grid(Box::cube(n - 1, -1.0, 1.0), 4) : QuadratureGrid{};
  const std::size_t count = n > 1 ? other.size() : 1;
  for (Eigen::Index face = 0; face < n; ++face) {
    for (double u_face : layer) {
      for (std::size_t k = 0; k < count; ++k) {
        ParamPoint u(n);
        for (Eigen::Index d = 0, j = 0; d < n; ++d) {
          u[d] = d == face ? u_face : other.nodes[k][j++];
        }
        const ParamPoint x = nv.box.from_unit(u);
        for (double t : ts) {
          if (!(max_abs(nv.alpha(t, x) - x) <= 1e-12)) {
            std::ostringstream os;
            os << "null variation: alpha(" << t << ", .) moves the boundary collar at (" << x.transpose() << ")";
            throw SpecError(os.str());
          }
        }
      }
    }
  }
}

ParamPoint invert_map(const std::function<ParamPoint(const ParamPoint&)>& f, const ParamPoint& y,
                      const ParamPoint& seed, const InversionOptions& options) {
  const Eigen::Index n = y.size();
  const double tol = options.tolerance * std::max(1.0, max_abs(y));
  ParamPoint x = seed;
  ParamPoint r = f(x) - y;
  double rnorm = max_abs(r);
  for (int it = 0; it < options.max_iterations && rnorm > tol; ++it) {
    Matrix J(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
      ParamPoint xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    }
    const Eigen::PartialPivLU<Matrix> lu(J);
    if (!(std::abs(J.determinant()) > 1e-14)) break;
    const ParamPoint step = lu.solve(r);
    double lambda = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, lambda *= 0.5) {
      const ParamPoint trial = x - lambda * step;
      const ParamPoint rt = f(trial) - y;
      const double tn = max_abs(rt);
      if (tn < rnorm || tn <= tol) {
        x = trial;
        r = rt;
        rnorm = tn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!(rnorm <= tol)) {
    std::ostringstream os;
    os << "Newton inversion failed for target (" << y.transpose() << "): residual " << rnorm;
    throw InversionError(os.str());
  }
  return x;
}

ConvertedVariation convert_null_variation(const ImmersionChart& chart, const NullVariation& nv,
                                          const ConvertOptions& options) {
  validate_null_variation(nv);
  if (nv.box.dim() != chart.n()) throw SpecError("null variation: box dimension mismatch");
  const QuadratureGrid probe = build_grid(nv.box, options.probe_order);
  const InversionOptions inv = options.inversion;

  auto inverts = [&](double t) {
    std::vector<char> ok(probe.size(), 1);
    parallel_for(probe.size(), [&](std::size_t k) {
      const ParamPoint& x = probe.nodes[k];
      try {
        for (double s : {t, -t}) {
          const ParamPoint b = invert_map([&](const ParamPoint& z) { return nv.alpha(s, z); }, x, x, inv);
          if (!nv.box.contains(b)) ok[k] = 0;
        }
      } catch (const InversionError&) {
        ok[k] = 0;
      }
    });
    for (char c : ok) {
      if (!c) return false;
    }
    return true;
  };

  double delta = nv.epsilon;
  if (!inverts(delta)) {
    double lo = 0.0;
    double hi = nv.epsilon;
    for (int i = 0; i < options.bisection_steps; ++i) {
      const double mid = 0.5 * (lo + hi);
      (inverts(mid) ? lo : hi) = mid;
    }
    if (lo == 0.0) {
      throw InversionError("convert_null_variation: alpha(t, .) is not invertible for any sampled t > 0");
    }
    delta = lo;
  }

  const TimeScalarField tau = nv.tau;
  const ParamFamily alpha = nv.alpha;
  TimeScalarField phi = [tau, alpha, inv](double t, const ParamPoint& x) {
    if (t == 0.0) return tau(0.0, x);
    const ParamPoint b = invert_map([&](const ParamPoint& z) { return alpha(t, z); }, x, x, inv);
    return tau(t, b);
  };
  VariationOptions vopt = options.variation;
  vopt.epsilon = delta;
  ConvertedVariation out;
  out.spec = make_characteristic_variation(chart, nv.box, std::move(phi), vopt, {}, {}, false);
  out.delta = delta;
  return out;
}

VariationSpec null_family(const ImmersionChart& chart, const NullVariation& nv) {
  const TimeScalarField tau = nv.tau;
  const ParamFamily alpha = nv.alpha;
  Family family = [chart, tau, alpha](double t, const ParamPoint& x) -> AmbientVector {
    const ParamPoint a = alpha(t, x);
    const double s = tau(t, x);
    const AmbientVector p = chart.value_unchecked(a);
    return s == 0.0 ? p : AmbientVector(p + s * dual_at(chart, a));
  };
  VariationOptions vopt;
  vopt.epsilon = nv.epsilon;
  return make_general_variation(chart, nv.box, std::move(family), vopt);
}

double volume_G(const ImmersionChart& chart, const QuadratureGrid& grid, const NullVariation& nv, double t) {
  return volume(chart, grid, null_family(chart, nv), t);
}

VolumeEqualityReport volume_equality_check(const ImmersionChart& chart, const QuadratureGrid& grid,
                                           const NullVariation& nv, const VariationSpec& spec,
                                           const std::vector<double>& ts) {
  const VariationSpec g = null_family(chart, nv);
  VolumeEqualityReport rep;
  rep.ts = ts;
  for (double t : ts) {
    const double vf = volume(chart, grid, spec, t);
    const double vg = volume(chart, grid, g, t);
    rep.vol_F.push_back(vf);
    rep.vol_G.push_back(vg);
    rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(vf - vg));
  }
  return rep;
}

}  // namespace lightcone
