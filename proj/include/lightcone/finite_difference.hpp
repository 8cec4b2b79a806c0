#pragma once

#include <Eigen/Core>

#include <cmath>
#include <type_traits>

namespace lightcone::fd {

// Fourth-order central stencils. All helpers are generic over the value type
// (double or Eigen vector) so scalar, ambient and metric fields share them.

// d/ds f(x + s v) at s = 0.
template <class F>
auto directional(const F& f, const Eigen::VectorXd& x, const Eigen::VectorXd& v, double h) {
  using V = std::decay_t<decltype(f(x))>;
  const V fp1 = f(Eigen::VectorXd(x + h * v));
  const V fm1 = f(Eigen::VectorXd(x - h * v));
  const V fp2 = f(Eigen::VectorXd(x + 2.0 * h * v));
  const V fm2 = f(Eigen::VectorXd(x - 2.0 * h * v));
  V out = ((fm2 - fp2) + 8.0 * (fp1 - fm1)) / (12.0 * h);
  return out;
}

// d/dx_i f(x).
template <class F>
auto partial(const F& f, const Eigen::VectorXd& x, Eigen::Index i, double h) {
  return directional(f, x, Eigen::VectorXd::Unit(x.size(), i), h);
}

// d^2/dx_i^2 f(x), given the centre value.
template <class F, class V>
V second_partial(const F& f, const Eigen::VectorXd& x, const V& centre, Eigen::Index i, double h) {
  const Eigen::VectorXd e = Eigen::VectorXd::Unit(x.size(), i);
  const V fp1 = f(Eigen::VectorXd(x + h * e));
  const V fm1 = f(Eigen::VectorXd(x - h * e));
  const V fp2 = f(Eigen::VectorXd(x + 2.0 * h * e));
  const V fm2 = f(Eigen::VectorXd(x - 2.0 * h * e));
  V out = (-(fp2 + fm2) + 16.0 * (fp1 + fm1) - 30.0 * centre) / (12.0 * h * h);
  return out;
}

// d^2/dx_i dx_j f(x), i != j, as the tensor product of first-derivative stencils.
template <class F>
auto mixed_partial(const F& f, const Eigen::VectorXd& x, Eigen::Index i, Eigen::Index j, double h) {
  auto d_j = [&](const Eigen::VectorXd& y) { return partial(f, y, j, h); };
  return partial(d_j, x, i, h);
}

// Radius of the stencils above, in units of the step.
inline constexpr double kStencilReach = 2.0;

}  // namespace lightcone::fd
