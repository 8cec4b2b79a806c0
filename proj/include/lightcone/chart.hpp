#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lightcone/lorentz.hpp"

namespace lightcone {

// Closed axis-aligned box [a_1,b_1] x ... x [a_n,b_n].
struct Box {
  ParamPoint lower;
  ParamPoint upper;

  static Box cube(Eigen::Index n, double a, double b);

  Eigen::Index dim() const { return lower.size(); }
  double volume() const;
  double scale() const;  // longest side
  ParamPoint center() const { return 0.5 * (lower + upper); }
  bool contains(const ParamPoint& x, double margin = 0.0) const;
  bool contains(const Box& inner, double margin = 0.0) const;
  Box shrunk(double margin) const;
  // Affine map onto [-1,1]^n.
  ParamPoint to_unit(const ParamPoint& x) const;
  ParamPoint from_unit(const ParamPoint& u) const;
};

// Second jet of a chart at one parameter point. The Hessian block is stored
// once per unordered pair, so d2(i,j) and d2(j,i) are the same object.
class Jet2 {
 public:
  Jet2() = default;
  Jet2(AmbientVector value, std::vector<AmbientVector> d1, std::vector<AmbientVector> d2_packed);

  Eigen::Index n() const { return static_cast<Eigen::Index>(d1_.size()); }
  const AmbientVector& value() const { return value_; }
  const std::vector<AmbientVector>& d1() const { return d1_; }
  const AmbientVector& d1(Eigen::Index i) const { return d1_[static_cast<std::size_t>(i)]; }
  const AmbientVector& d2(Eigen::Index i, Eigen::Index j) const { return d2_[packed_index(i, j)]; }

  static std::size_t packed_index(Eigen::Index i, Eigen::Index j);

 private:
  AmbientVector value_;
  std::vector<AmbientVector> d1_;
  std::vector<AmbientVector> d2_;
};

enum class JetBackend { analytic, finite_difference };

// Immersion chart p: D -> Lambda^{n+1} subset R^{n+2}_1 over a box domain.
class ImmersionChart {
 public:
  using Evaluator = std::function<AmbientVector(const ParamPoint&)>;
  using JetEvaluator = std::function<Jet2(const ParamPoint&)>;

  // Finite-difference chart. fd_step <= 0 selects 1e-3 * domain.scale().
  ImmersionChart(std::string name, Eigen::Index n, Eigen::Index ambient_dim, Box domain,
                 Evaluator evaluator, double fd_step = 0.0);
  // Chart with exact jets.
  ImmersionChart(std::string name, Eigen::Index n, Eigen::Index ambient_dim, Box domain,
                 Evaluator evaluator, JetEvaluator analytic_jet, double fd_step = 0.0);

  const std::string& name() const { return name_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index ambient_dim() const { return ambient_dim_; }
  const Box& domain() const { return domain_; }
  JetBackend backend() const { return analytic_ ? JetBackend::analytic : JetBackend::finite_difference; }
  double fd_step() const { return fd_step_; }

  // p(x). Throws DomainError outside the domain.
  AmbientVector value(const ParamPoint& x) const;
  // Unchecked evaluation, used by stencils that already validated their reach.
  AmbientVector value_unchecked(const ParamPoint& x) const { return evaluator_(x); }
  const Evaluator& evaluator() const { return evaluator_; }

  Jet2 jet(const ParamPoint& x) const;
  // First derivatives only; cheaper than jet() for the finite-difference backend.
  std::vector<AmbientVector> tangents(const ParamPoint& x) const;

  // Same chart, forced onto the finite-difference backend with step h.
  ImmersionChart with_fd_backend(double h) const;

 private:
  void check_point(const ParamPoint& x, bool needs_stencil) const;

  std::string name_;
  Eigen::Index n_;
  Eigen::Index ambient_dim_;
  Box domain_;
  Evaluator evaluator_;
  JetEvaluator analytic_;
  double fd_step_;
};

Jet2 eval_jet2(const ImmersionChart& chart, const ParamPoint& x);

// Finite-difference second jet of an arbitrary map, fourth order in h.
Jet2 fd_jet2(const ImmersionChart::Evaluator& f, const ParamPoint& x, double h);
// Finite-difference first derivatives of an arbitrary map, fourth order in h.
std::vector<AmbientVector> fd_tangents(const ImmersionChart::Evaluator& f, const ParamPoint& x,
                                       double h);

// Built-in catalog. Names: "euclidean", "hyperbolic_sphere_product" (alias
// "hs_product") and "round_sphere". hyperbolic_sphere_product(n) has intrinsic
// dimension 2n and lives in R^{2n+2}_1. Unknown names throw ConfigError.
ImmersionChart builtin(const std::string& name, int n, std::optional<Box> domain = std::nullopt);
ImmersionChart euclidean_chart(int n, std::optional<Box> domain = std::nullopt);
ImmersionChart hyperbolic_sphere_product_chart(int n, std::optional<Box> domain = std::nullopt);
ImmersionChart round_sphere_chart(int n, std::optional<Box> domain = std::nullopt);

// Default box for variational reports on a built-in (strictly inside its domain).
Box default_quadrature_box(const ImmersionChart& chart);

// Induced metric g_ij = <d_i p, d_j p>; throws SpacelikeViolation unless every
// Cholesky pivot exceeds pd_tol.
Matrix validate_spacelike(const ImmersionChart& chart, const ParamPoint& x, double pd_tol = 1e-12);
Matrix require_positive_definite(const Matrix& g, double pd_tol, const std::string& context);
double min_eigenvalue(const Matrix& g);

// Chart of the dual map x -> q(x), differentiated by finite differences.
// Throws DualDegenerateError when q fails the immersion/spacelike test at a
// sample point of the domain.
ImmersionChart dual_chart(const ImmersionChart& chart, double pd_tol = 1e-8);

}  // namespace lightcone
