#pragma once

#include <Eigen/Core>

#include <span>
#include <vector>

namespace lightcone {

// A point or vector of Minkowski space R^{n+2}_1; index 0 is timelike.
using AmbientVector = Eigen::VectorXd;
// A point of the parameter domain D in R^n, or a tangent vector in chart coordinates.
using ParamPoint = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Lorentzian inner product of signature (-,+,...,+).
double inner(const AmbientVector& u, const AmbientVector& v);

// Sign-flip of the timelike coordinate, so that inner(u, v) == u.dot(flip_time(v)).
AmbientVector flip_time(const AmbientVector& v);

// Basis of the Lorentz-orthogonal complement of a spacelike tangent n-plane,
// with v1 equal to the supplied point p.
struct NormalPlaneBasis {
  AmbientVector v1;
  AmbientVector v2;
  double tangent_residual = 0.0;  // max |<v_k, t_i>|
};

// Lorentz-orthogonal complement of span(tangents), completed around p.
// Throws DegenerateTangentError on rank deficiency and DimensionError on size mismatch.
NormalPlaneBasis normal_plane(std::span<const AmbientVector> tangents, const AmbientVector& p);

// Gram matrix <t_i, t_j> of a tangent family.
Matrix gram(std::span<const AmbientVector> tangents);

// Deterministic pairwise (cascade) summation; the split points depend only on
// the length, so results are identical run to run.
double pairwise_sum(std::span<const double> values);

// Weighted variant: sum_i w_i * f_i, reduced pairwise over the products.
double pairwise_dot(std::span<const double> weights, std::span<const double> values);

}  // namespace lightcone
