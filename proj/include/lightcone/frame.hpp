#pragma once

#include <cstdint>
#include <vector>

#include "lightcone/chart.hpp"
#include "lightcone/lorentz.hpp"

namespace lightcone {

// Residuals of the duality relations <p,q> = 1, <q,q> = 0, <d_i p, q> = 0.
struct DualityResiduals {
  double pq = 0.0;       // |<p,q> - 1|
  double qq = 0.0;       // |<q,q>|
  double tangent = 0.0;  // max_i |<d_i p, q>|

  double max() const;
};

// All pointwise geometry of a spacelike hypersurface of the light-cone at one
// chart point. Shape operator and metric are stored in chart coordinates.
struct PointFrame {
  ParamPoint x;
  Jet2 jet;
  Matrix g;
  Matrix g_inv;
  AmbientVector q;  // dual map
  Matrix h;         // h_ij = <d_i d_j p, q>
  Matrix A;         // g^{-1} h
  double trA = 0.0;
  double trA2 = 0.0;  // tr(A^2)
  double S = 0.0;     // -2(n-1) tr A
  AmbientVector H;    // tr(A) p - n q
  Matrix onb;         // columns: orthonormal frame e_i in chart coordinates

  Eigen::Index n() const { return g.rows(); }
  const AmbientVector& p() const { return jet.value(); }
  // Ambient image sum_k v^k d_k p of a coordinate tangent vector.
  AmbientVector push(const ParamPoint& v) const;
  // Ambient image of the orthonormal vector e_i.
  AmbientVector e(Eigen::Index i) const { return push(onb.col(i)); }
  // Component of an ambient vector normal to the tangent space.
  AmbientVector normal_part(const AmbientVector& v) const;
  // Coordinates of the tangential component of v.
  ParamPoint tangent_coords(const AmbientVector& v) const;
  DualityResiduals duality_residuals() const;
};

// Unique null normal q with <p,q> = 1 and <d_i p, q> = 0, built in closed form
// from a normal completion w: q = a p + b w, b = 1/<p,w>, a = -<w,w>/(2<p,w>^2).
// Throws DualUndefinedError when |<p,w>| < dual_tol.
AmbientVector dual_map(const Jet2& jet, double dual_tol = 1e-12);
// Same, from first-order data only.
AmbientVector dual_map(const AmbientVector& p, std::span<const AmbientVector> tangents,
                       double dual_tol = 1e-12);

PointFrame build_frame(const ImmersionChart& chart, const ParamPoint& x, double pd_tol = 1e-12,
                       double dual_tol = 1e-12);
PointFrame build_frame(const Jet2& jet, const ParamPoint& x, double pd_tol = 1e-12,
                       double dual_tol = 1e-12);

// II(X,Y) = <AX,Y> p - <X,Y> q for coordinate tangent vectors X, Y.
AmbientVector second_fundamental_form(const PointFrame& frame, const ParamPoint& X,
                                      const ParamPoint& Y);
// Normal projection of sum X^i Y^j d_i d_j p, computed from the raw jet.
AmbientVector second_fundamental_form_from_jet(const PointFrame& frame, const ParamPoint& X,
                                               const ParamPoint& Y);
// sum_i II(e_i, e_i) from the raw jet; independent of the closed form for H.
AmbientVector mean_curvature_from_jet(const PointFrame& frame);

// Directional derivative of x -> q(x) along V, by fourth-order differences
// with the chart's fd step. Throws FDStencilError near the domain boundary.
AmbientVector dual_derivative(const ImmersionChart& chart, const ParamPoint& x, const ParamPoint& V);
// Euclidean norm of d_V q + A V (A V pushed to the ambient space).
double dual_derivative_residual(const PointFrame& frame, const ParamPoint& V,
                                const AmbientVector& dq);

struct GaussSample {
  ParamPoint X, Y, Z, W;
  double lhs = 0.0;  // <R(X,Y)Z, W> from the intrinsic metric
  double rhs = 0.0;  // -<X,W><AY,Z> - <AX,W><Y,Z> + <Y,W><AX,Z> + <AY,W><X,Z>
};

struct IntrinsicCurvatureReport {
  double S_intrinsic = 0.0;
  double S_extrinsic = 0.0;
  double gauss_residual = 0.0;  // |S_intrinsic - S_extrinsic|
  std::vector<GaussSample> riemann_samples;
  double max_sample_residual = 0.0;
  double metric_condition = 0.0;
  bool ill_conditioned = false;  // condition number of g above 1e8
};

struct IntrinsicOracleOptions {
  double step = 0.0;  // <= 0: 2.5e-3 * domain scale
  int samples = 8;
  std::uint64_t seed = 0x5eed;
};

// Scalar curvature from the induced metric alone: Christoffel symbols by
// differences of g, Riemann tensor by differences of the Christoffels, then a
// double trace over an orthonormal frame. Compared against -2(n-1) tr A and
// sampled against the Gauss equation on random quadruples.
IntrinsicCurvatureReport intrinsic_oracle(const ImmersionChart& chart, const ParamPoint& x,
                                          const IntrinsicOracleOptions& options = {});

}  // namespace lightcone
