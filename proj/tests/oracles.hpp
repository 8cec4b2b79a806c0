#pragma once

// Test-only reference computations that share no code paths with the engine.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double minkowski(const Vec& u, const Vec& v) { return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1)); }

// q from the duality conditions as a generic solve: <p,q> = 1 and <d_i p,q> = 0
// are linear, so q = q0 + s p with q0 the least-norm solution; <q,q> = 0 fixes s.
inline Vec dual_by_solve(const Vec& p, const std::vector<Vec>& tangents) {
  const Eigen::Index m = p.size();
  const Eigen::Index n = static_cast<Eigen::Index>(tangents.size());
  Mat M(n + 1, m);
  Vec rhs = Vec::Zero(n + 1);
  Vec eta = Vec::Ones(m);
  eta[0] = -1.0;
  M.row(0) = p.cwiseProduct(eta).transpose();
  rhs[0] = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) M.row(i + 1) = tangents[static_cast<std::size_t>(i)].cwiseProduct(eta).transpose();
  const Vec q0 = M.completeOrthogonalDecomposition().solve(rhs);
  const double s = -minkowski(q0, q0) / 2.0;
  return q0 + s * p;
}

// Composite Simpson on a box, m (even) panels per axis.
inline double simpson(const std::function<double(const Vec&)>& f, const Vec& lo, const Vec& hi, int m) {
  const Eigen::Index n = lo.size();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double total = 0.0;
  while (true) {
    Vec x(n);
    double w = 1.0;
    for (Eigen::Index d = 0; d < n; ++d) {
      const int k = idx[static_cast<std::size_t>(d)];
      const double h = (hi[d] - lo[d]) / m;
      x[d] = lo[d] + k * h;
      const double c = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
      w *= c * h / 3.0;
    }
    total += w * f(x);
    Eigen::Index d = n - 1;
    for (; d >= 0; --d) {
      if (++idx[static_cast<std::size_t>(d)] <= m) break;
      idx[static_cast<std::size_t>(d)] = 0;
    }
    if (d < 0) break;
  }
  return total;
}

// The canonical bump written out independently.
inline double bump(const Vec& x, const Vec& lo, const Vec& hi) {
  double b = 1.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double u = (2.0 * x[i] - lo[i] - hi[i]) / (hi[i] - lo[i]);
    if (std::abs(u) >= 1.0) return 0.0;
    b *= std::exp(1.0 - 1.0 / (1.0 - u * u));
  }
  return b;
}

// Gaussian curvature of a 2D metric (E, F, G) by Brioschi's formula with
// central differences of step h; the scalar curvature is 2K.
inline double brioschi_K(const std::function<Mat(const Vec&)>& metric, const Vec& x, double h) {
  auto g = [&](double a, double b) {
    Vec y = x;
    y[0] += a;
    y[1] += b;
    return metric(y);
  };
  auto E = [&](double a, double b) { return g(a, b)(0, 0); };
  auto F = [&](double a, double b) { return g(a, b)(0, 1); };
  auto G = [&](double a, double b) { return g(a, b)(1, 1); };
  auto du = [&](auto f) { return (f(h, 0) - f(-h, 0)) / (2 * h); };
  auto dv = [&](auto f) { return (f(0, h) - f(0, -h)) / (2 * h); };
  auto duu = [&](auto f) { return (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / (h * h); };
  auto dvv = [&](auto f) { return (f(0, h) - 2 * f(0, 0) + f(0, -h)) / (h * h); };
  auto duv = [&](auto f) { return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h); };
  const double e = E(0, 0), f = F(0, 0), gg = G(0, 0);
  const double Eu = du(E), Ev = dv(E), Fu = du(F), Fv = dv(F), Gu = du(G), Gv = dv(G);
  const double Evv = dvv(E), Fuv = duv(F), Guu = duu(G);
  Mat M1(3, 3), M2(3, 3);
  M1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,  //
      Fv - 0.5 * Gu, e, f,                                    //
      0.5 * Gv, f, gg;
  M2 << 0.0, 0.5 * Ev, 0.5 * Gu,  //
      0.5 * Ev, e, f,             //
      0.5 * Gu, f, gg;
  const double den = e * gg - f * f;
  return (M1.determinant() - M2.determinant()) / (den * den);
}

inline Vec uniform_in(const Vec& lo, const Vec& hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vec x(lo.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
  return x;
}

}  // namespace oracle
