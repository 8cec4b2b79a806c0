#include "lightcone/lorentz.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <string>

#include "lightcone/errors.hpp"

namespace lightcone {

double inner(const AmbientVector& u, const AmbientVector& v) {
  if (u.size() != v.size()) {
    throw DimensionError("inner: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
  }
  if (u.size() == 0) return 0.0;
  return -u[0] * v[0] + u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

AmbientVector flip_time(const AmbientVector& v) {
  AmbientVector out = v;
  if (out.size() > 0) out[0] = -out[0];
  return out;
}

Matrix gram(std::span<const AmbientVector> tangents) {
  const auto n = static_cast<Eigen::Index>(tangents.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = inner(tangents[i], tangents[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

NormalPlaneBasis normal_plane(std::span<const AmbientVector> tangents, const AmbientVector& p) {
  const Eigen::Index dim = p.size();
  const auto n = static_cast<Eigen::Index>(tangents.size());
  if (n + 2 != dim) {
    throw DimensionError("normal_plane: expected " + std::to_string(dim - 2) + " tangents, got " +
                         std::to_string(n));
  }
  // The Lorentz complement of span{t_i} is the Euclidean complement of span{eta t_i}.
  Matrix m(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (tangents[i].size() != dim) throw DimensionError("normal_plane: tangent dimension mismatch");
    m.col(i) = flip_time(tangents[i]);
  }
  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1.0);
  qr.setThreshold(1e-10);
  if (qr.rank() < n || (n > 0 && std::abs(qr.matrixR()(n - 1, n - 1)) < 1e-10 * scale)) {
    throw DegenerateTangentError("normal_plane: tangent set has rank " + std::to_string(qr.rank()) +
                                 " < " + std::to_string(n));
  }
  const Matrix q = qr.householderQ();
  const AmbientVector c1 = q.col(n);
  const AmbientVector c2 = q.col(n + 1);

  // Complete p with whichever complement vector is furthest from span{p}.
  const double pn = p.norm();
  if (pn == 0.0) throw DegenerateTangentError("normal_plane: p is the zero vector");
  const AmbientVector phat = p / pn;
  AmbientVector r1 = c1 - c1.dot(phat) * phat;
  AmbientVector r2 = c2 - c2.dot(phat) * phat;
  AmbientVector w = r1.norm() >= r2.norm() ? r1 : r2;
  // Re-project so w stays exactly in the complement span{c1, c2}.
  w = c1 * c1.dot(w) + c2 * c2.dot(w);
  w.normalize();

  NormalPlaneBasis basis{p, w, 0.0};
  for (const auto& t : tangents) {
    basis.tangent_residual = std::max({basis.tangent_residual, std::abs(inner(basis.v1, t)),
                                       std::abs(inner(basis.v2, t))});
  }
  return basis;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double pairwise_dot(std::span<const double> weights, std::span<const double> values) {
  if (weights.size() != values.size()) throw DimensionError("pairwise_dot: length mismatch");
  std::vector<double> products(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) products[i] = weights[i] * values[i];
  return pairwise_sum(products);
}

}  // namespace lightcone
