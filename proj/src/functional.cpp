#include "lightcone/functional.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"
#include "lightcone/parallel.hpp"

namespace lightcone {
namespace {

// Spatial step for family jets, as a fraction of the chart step.
constexpr double kFamilyStepFactor = 0.25;

// sqrt(det g) = prod diag(L) for g = L L^T.
double sqrt_det(const Matrix& g) {
  const Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) return std::sqrt(std::max(0.0, g.determinant()));
  return llt.matrixL().toDenseMatrix().diagonal().prod();
}

void require_grid_in_domain(const ImmersionChart& chart, const QuadratureGrid& grid) {
  const double margin = fd::kStencilReach * chart.fd_step();
  if (grid.box.dim() != chart.n() || !chart.domain().contains(grid.box, margin)) {
    throw DomainError("quadrature box is not inside the domain of '" + chart.name() + "'");
  }
}

double integrate_values(const QuadratureGrid& grid, const std::vector<double>& values) {
  return pairwise_dot(grid.weights, values);
}

}  // namespace

double relative_error(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::vector<PointFrame> frames_on_grid(const ImmersionChart& chart, const QuadratureGrid& grid) {
  require_grid_in_domain(chart, grid);
  std::vector<PointFrame> frames(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { frames[k] = build_frame(chart, grid.nodes[k]); });
  return frames;
}

double max_abs_scalar_curvature(const std::vector<PointFrame>& frames) {
  double m = 0.0;
  for (const auto& f : frames) m = std::max(m, std::abs(f.S));
  return m;
}

double volume(const ImmersionChart& chart, const QuadratureGrid& grid) {
  require_grid_in_domain(chart, grid);
  return integrate(grid, [&](const ParamPoint& x) {
    return sqrt_det(validate_spacelike(chart, x));
  });
}

double volume(const ImmersionChart& chart, const QuadratureGrid& grid, const VariationSpec& spec,
              double t, double pd_tol) {
  require_grid_in_domain(chart, grid);
  const double h = kFamilyStepFactor * chart.fd_step();
  const ImmersionChart::Evaluator slice = [&spec, t](const ParamPoint& y) { return spec.family(t, y); };
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const ParamPoint& x = grid.nodes[k];
    std::ostringstream ctx;
    ctx << "Vol(t = " << t << ") at node " << k << " (" << x.transpose() << ")";
    const Matrix g = require_positive_definite(gram(fd_tangents(slice, x, h)), pd_tol, ctx.str());
    values[k] = sqrt_det(g);
  });
  return integrate_values(grid, values);
}

double first_variation_general(const ImmersionChart& chart, const QuadratureGrid& grid,
                               const VectorField& X) {
  const auto frames = frames_on_grid(chart, grid);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const PointFrame& f = frames[k];
    const AmbientVector x = X(f.x);
    values[k] = (-f.trA * inner(x, f.p()) + static_cast<double>(f.n()) * inner(x, f.q)) * sqrt_det(f.g);
  });
  return integrate_values(grid, values);
}

double first_variation_admissible(const ImmersionChart& chart, const QuadratureGrid& grid,
                                  const ScalarField& phi0, const BumpWindow& window) {
  const auto frames = frames_on_grid(chart, grid);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const PointFrame& f = frames[k];
    const double b = window(f.x);
    values[k] = b == 0.0 ? 0.0 : -f.trA * phi0(f.x) * b * sqrt_det(f.g);
  });
  return integrate_values(grid, values);
}

double first_variation_admissible(const ImmersionChart& chart, const QuadratureGrid& grid,
                                  const VariationSpec& spec) {
  if (!spec.is_characteristic()) {
    throw SpecError("first_variation_admissible: spec is not characteristic");
  }
  const auto frames = frames_on_grid(chart, grid);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const PointFrame& f = frames[k];
    values[k] = -f.trA * spec.profile_rate(f.x) * sqrt_det(f.g);
  });
  return integrate_values(grid, values);
}

SecondVariationResult second_variation_general(const ImmersionChart& chart, const QuadratureGrid& grid,
                                               const VariationSpec& spec) {
  const auto frames = frames_on_grid(chart, grid);
  const double h = chart.fd_step();
  SecondVariationResult out;
  out.per_node.resize(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const PointFrame& f = frames[k];
    const Eigen::Index n = f.n();
    std::vector<AmbientVector> dX(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      dX[static_cast<std::size_t>(i)] = fd::partial(spec.velocity, f.x, i, h);
    }
    // D_{e_i} X = sum_k onb(k, i) d_k X
    std::vector<AmbientVector> nabla(static_cast<std::size_t>(n));
    std::vector<AmbientVector> e(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      AmbientVector v = AmbientVector::Zero(f.p().size());
      for (Eigen::Index c = 0; c < n; ++c) v += f.onb(c, i) * dX[static_cast<std::size_t>(c)];
      nabla[static_cast<std::size_t>(i)] = v;
      e[static_cast<std::size_t>(i)] = f.e(i);
    }
    SecondVariationTerms t;
    double trace = 0.0;
    for (std::size_t i = 0; i < nabla.size(); ++i) {
      const AmbientVector perp = f.normal_part(nabla[i]);
      t.normal_sq += inner(perp, perp);
      trace += inner(nabla[i], e[i]);
      for (std::size_t j = 0; j < nabla.size(); ++j) {
        t.cross += inner(nabla[i], e[j]) * inner(nabla[j], e[i]);
      }
    }
    t.trace_sq = trace * trace;
    t.accel_H = inner(spec.acceleration(f.x), f.H);
    out.per_node[k] = t;
  });

  std::vector<double> normal(grid.size()), cross(grid.size()), trace(grid.size()), accel(grid.size()),
      total(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double dv = sqrt_det(frames[k].g);
    normal[k] = out.per_node[k].normal_sq * dv;
    cross[k] = out.per_node[k].cross * dv;
    trace[k] = out.per_node[k].trace_sq * dv;
    accel[k] = out.per_node[k].accel_H * dv;
    total[k] = out.per_node[k].total() * dv;
  }
  out.integrated.normal_sq = integrate_values(grid, normal);
  out.integrated.cross = integrate_values(grid, cross);
  out.integrated.trace_sq = integrate_values(grid, trace);
  out.integrated.accel_H = integrate_values(grid, accel);
  out.value = integrate_values(grid, total);
  return out;
}

namespace {

double characteristic_d2(const ImmersionChart& chart, const QuadratureGrid& grid, const ScalarField& xp,
                         double s_flat_tol) {
  const auto frames = frames_on_grid(chart, grid);
  const double max_s = max_abs_scalar_curvature(frames);
  if (!(max_s < s_flat_tol)) {
    std::ostringstream os;
    os << "second_variation_characteristic: chart '" << chart.name()
       << "' is not scalar-flat on the grid (max |S| = " << max_s << ", tolerance " << s_flat_tol << ")";
    throw SPrecondError(os.str(), max_s);
  }
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    const PointFrame& f = frames[k];
    const double c = xp(f.x);
    values[k] = -c * c * f.trA2 * sqrt_det(f.g);
  });
  return integrate_values(grid, values);
}

}  // namespace

double second_variation_characteristic(const ImmersionChart& chart, const QuadratureGrid& grid,
                                       const ScalarField& phi0, const BumpWindow& window,
                                       double s_flat_tol) {
  return characteristic_d2(
      chart, grid, [&](const ParamPoint& x) { const double b = window(x); return b == 0.0 ? 0.0 : phi0(x) * b; },
      s_flat_tol);
}

double second_variation_characteristic(const ImmersionChart& chart, const QuadratureGrid& grid,
                                       const VariationSpec& spec, double s_flat_tol) {
  if (!spec.is_characteristic()) {
    throw SpecError("second_variation_characteristic: spec is not characteristic");
  }
  return characteristic_d2(chart, grid, spec.profile_rate, s_flat_tol);
}

VariationReport variation_report(const ImmersionChart& chart, const QuadratureGrid& grid,
                                 const VariationSpec& spec, const ReportOptions& options) {
  VariationReport rep;
  rep.kind = to_string(spec.kind);
  rep.max_abs_S = max_abs_scalar_curvature(frames_on_grid(chart, grid));

  std::map<double, double> cache;
  auto vol = [&](double t) {
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    const double v = volume(chart, grid, spec, t);
    cache.emplace(t, v);
    return v;
  };
  rep.volume0 = vol(0.0);
  const double ht = 1e-2 * spec.epsilon;
  const FdEstimate d1 = fd_derivative(vol, 1, ht);
  const FdEstimate d2 = fd_derivative(vol, 2, ht);
  rep.fd_d1 = d1.value;
  rep.fd_d1_error = d1.error;
  rep.fd_d2 = d2.value;
  rep.fd_d2_error = d2.error;

  rep.closed_form_d1 = spec.is_characteristic() ? first_variation_admissible(chart, grid, spec)
                                                : first_variation_general(chart, grid, spec.velocity);
  const SecondVariationResult general = second_variation_general(chart, grid, spec);
  rep.general_d2 = general.value;
  rep.general_terms = general.integrated;
  rep.closed_form_d2 = general.value;
  if (spec.is_characteristic()) {
    try {
      rep.characteristic_d2 = second_variation_characteristic(chart, grid, spec, options.s_flat_tol);
      rep.closed_form_d2 = *rep.characteristic_d2;
    } catch (const SPrecondError& e) {
      rep.s_precond_error = e.what();
    }
  }
  rep.rel_err_d1 = relative_error(rep.closed_form_d1, rep.fd_d1);
  rep.rel_err_d2 = relative_error(rep.closed_form_d2, rep.fd_d2);
  rep.sign_check_d2 = rep.closed_form_d2 <= options.sign_tol;
  return rep;
}

}  // namespace lightcone
