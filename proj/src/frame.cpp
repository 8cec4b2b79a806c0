#include "lightcone/frame.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"

namespace lightcone {

double DualityResiduals::max() const { return std::max({pq, qq, tangent}); }

AmbientVector PointFrame::push(const ParamPoint& v) const {
  AmbientVector out = AmbientVector::Zero(p().size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out += v[k] * jet.d1(k);
  return out;
}

ParamPoint PointFrame::tangent_coords(const AmbientVector& v) const {
  ParamPoint b(n());
  for (Eigen::Index j = 0; j < n(); ++j) b[j] = inner(v, jet.d1(j));
  return g_inv * b;
}

AmbientVector PointFrame::normal_part(const AmbientVector& v) const {
  return v - push(tangent_coords(v));
}

DualityResiduals PointFrame::duality_residuals() const {
  DualityResiduals r;
  r.pq = std::abs(inner(p(), q) - 1.0);
  r.qq = std::abs(inner(q, q));
  for (const auto& t : jet.d1()) r.tangent = std::max(r.tangent, std::abs(inner(t, q)));
  return r;
}

AmbientVector dual_map(const AmbientVector& p, std::span<const AmbientVector> tangents,
                       double dual_tol) {
  const NormalPlaneBasis basis = normal_plane(tangents, p);
  const AmbientVector& w = basis.v2;
  const double pw = inner(p, w);
  if (std::abs(pw) < dual_tol * std::max(1.0, p.norm())) {
    std::ostringstream os;
    os << "dual_map: normal plane is degenerate (|<p,w>| = " << std::abs(pw) << ")";
    throw DualUndefinedError(os.str());
  }
  const double b = 1.0 / pw;
  const double a = -inner(w, w) / (2.0 * pw * pw);
  return a * p + b * w;
}

AmbientVector dual_map(const Jet2& jet, double dual_tol) {
  return dual_map(jet.value(), jet.d1(), dual_tol);
}

PointFrame build_frame(const Jet2& jet, const ParamPoint& x, double pd_tol, double dual_tol) {
  PointFrame f;
  f.x = x;
  f.jet = jet;
  const Eigen::Index n = jet.n();
  std::ostringstream ctx;
  ctx << "build_frame at (" << x.transpose() << ")";
  f.g = require_positive_definite(gram(jet.d1()), pd_tol, ctx.str());
  Eigen::LLT<Matrix> llt(f.g);
  f.g_inv = llt.solve(Matrix::Identity(n, n));
  f.g_inv = 0.5 * (f.g_inv + f.g_inv.transpose());
  f.q = dual_map(jet, dual_tol);
  f.h.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      f.h(i, j) = inner(jet.d2(i, j), f.q);
      f.h(j, i) = f.h(i, j);
    }
  }
  f.A = f.g_inv * f.h;
  f.trA = f.A.trace();
  f.trA2 = (f.A * f.A).trace();
  f.S = -2.0 * static_cast<double>(n - 1) * f.trA;
  f.H = f.trA * f.p() - static_cast<double>(n) * f.q;
  // g = L L^T, so E = L^{-T} is upper triangular with positive diagonal and E^T g E = I.
  const Matrix lower = llt.matrixL();
  f.onb = lower.transpose().triangularView<Eigen::Upper>().solve(Matrix::Identity(n, n));
  return f;
}

PointFrame build_frame(const ImmersionChart& chart, const ParamPoint& x, double pd_tol,
                       double dual_tol) {
  return build_frame(chart.jet(x), x, pd_tol, dual_tol);
}

AmbientVector second_fundamental_form(const PointFrame& frame, const ParamPoint& X,
                                      const ParamPoint& Y) {
  const double axy = X.dot(frame.h * Y);
  const double xy = X.dot(frame.g * Y);
  return axy * frame.p() - xy * frame.q;
}

AmbientVector second_fundamental_form_from_jet(const PointFrame& frame, const ParamPoint& X,
                                               const ParamPoint& Y) {
  AmbientVector v = AmbientVector::Zero(frame.p().size());
  for (Eigen::Index i = 0; i < frame.n(); ++i) {
    for (Eigen::Index j = 0; j < frame.n(); ++j) v += X[i] * Y[j] * frame.jet.d2(i, j);
  }
  return frame.normal_part(v);
}

AmbientVector mean_curvature_from_jet(const PointFrame& frame) {
  AmbientVector H = AmbientVector::Zero(frame.p().size());
  for (Eigen::Index i = 0; i < frame.n(); ++i) {
    const ParamPoint e = frame.onb.col(i);
    H += second_fundamental_form_from_jet(frame, e, e);
  }
  return H;
}

AmbientVector dual_derivative(const ImmersionChart& chart, const ParamPoint& x, const ParamPoint& V) {
  const double h = chart.fd_step();
  const double reach = fd::kStencilReach * h * V.cwiseAbs().maxCoeff();
  const double inner_reach =
      chart.backend() == JetBackend::finite_difference ? fd::kStencilReach * h : 0.0;
  if (!chart.domain().contains(x, reach + inner_reach)) {
    std::ostringstream os;
    os << "dual_derivative: stencil at (" << x.transpose() << ") leaves the domain of '"
       << chart.name() << "'";
    throw FDStencilError(os.str());
  }
  auto q_of = [&chart](const ParamPoint& y) -> AmbientVector {
    return dual_map(chart.value_unchecked(y), chart.tangents(y));
  };
  return fd::directional(q_of, x, V, h);
}

double dual_derivative_residual(const PointFrame& frame, const ParamPoint& V,
                                const AmbientVector& dq) {
  return (dq + frame.push(frame.A * V)).norm();
}

}  // namespace lightcone
