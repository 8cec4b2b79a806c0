#include "lightcone/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"
#include "lightcone/parallel.hpp"

namespace lightcone {

GaussLegendre1D gauss_legendre(int order) {
  if (order < 2) throw ConfigError("gauss_legendre: order must be >= 2");
  const auto m = static_cast<std::size_t>(order);
  GaussLegendre1D rule{std::vector<double>(m), std::vector<double>(m)};
  // Newton iteration on P_m from the Chebyshev-like initial guess; roots are symmetric.
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 1; j <= m; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * static_cast<double>(j) - 1.0) * z * p2 - (static_cast<double>(j) - 1.0) * p3) /
             static_cast<double>(j);
      }
      dp = static_cast<double>(m) * (z * p1 - p2) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.nodes[i] = -z;
    rule.nodes[m - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

QuadratureGrid build_grid(const Box& box, int order) {
  const GaussLegendre1D rule = gauss_legendre(order);
  const Eigen::Index n = box.dim();
  if (n < 1) throw ConfigError("build_grid: empty box");
  QuadratureGrid grid;
  grid.order = order;
  grid.box = box;
  std::size_t total = 1;
  for (Eigen::Index d = 0; d < n; ++d) total *= rule.nodes.size();
  grid.nodes.reserve(total);
  grid.weights.reserve(total);
  const ParamPoint half = 0.5 * (box.upper - box.lower);
  const double jac = half.prod();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t k = 0; k < total; ++k) {
    ParamPoint u(n);
    double w = jac;
    for (Eigen::Index d = 0; d < n; ++d) {
      u[d] = rule.nodes[idx[static_cast<std::size_t>(d)]];
      w *= rule.weights[idx[static_cast<std::size_t>(d)]];
    }
    grid.nodes.push_back(box.from_unit(u));
    grid.weights.push_back(w);
    // Last axis fastest.
    for (Eigen::Index d = n - 1; d >= 0; --d) {
      auto& i = idx[static_cast<std::size_t>(d)];
      if (++i < rule.nodes.size()) break;
      i = 0;
    }
  }
  return grid;
}

QuadratureGrid build_grid(const ImmersionChart& chart, const Box& box, int order) {
  const double margin = chart.backend() == JetBackend::finite_difference
                            ? 2.0 * fd::kStencilReach * chart.fd_step()
                            : fd::kStencilReach * chart.fd_step();
  if (box.dim() != chart.n() || !chart.domain().contains(box, margin)) {
    std::ostringstream os;
    os << "build_grid: box [" << box.lower.transpose() << "] .. [" << box.upper.transpose()
       << "] is not inside the domain of '" << chart.name() << "' with margin " << margin;
    throw DomainError(os.str());
  }
  return build_grid(box, order);
}

std::vector<double> evaluate_nodes(const QuadratureGrid& grid,
                                   const std::function<double(const ParamPoint&)>& f) {
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) { values[k] = f(grid.nodes[k]); });
  return values;
}

double integrate(const QuadratureGrid& grid, const std::function<double(const ParamPoint&)>& f) {
  return pairwise_dot(grid.weights, evaluate_nodes(grid, f));
}

}  // namespace lightcone
