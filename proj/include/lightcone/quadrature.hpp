#pragma once

#include <functional>
#include <vector>

#include "lightcone/chart.hpp"

namespace lightcone {

// Tensor-product Gauss-Legendre rule over a box.
struct QuadratureGrid {
  std::vector<ParamPoint> nodes;
  std::vector<double> weights;
  int order = 0;  // points per axis
  Box box;

  std::size_t size() const { return nodes.size(); }
};

// Nodes and weights of the order-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre1D gauss_legendre(int order);

// Throws ConfigError for order < 2.
QuadratureGrid build_grid(const Box& box, int order);
// Also checks the box lies inside the chart domain with room for one
// difference stencil; throws DomainError otherwise.
QuadratureGrid build_grid(const ImmersionChart& chart, const Box& box, int order);

// sum_k w_k f(x_k); node evaluations may run in parallel, the reduction is pairwise.
double integrate(const QuadratureGrid& grid, const std::function<double(const ParamPoint&)>& f);

// Evaluates f at every node (in parallel); values[k] belongs to nodes[k].
std::vector<double> evaluate_nodes(const QuadratureGrid& grid,
                                   const std::function<double(const ParamPoint&)>& f);

}  // namespace lightcone
