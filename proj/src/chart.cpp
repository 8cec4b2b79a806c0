#include "lightcone/chart.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"

namespace lightcone {

// ---------------------------------------------------------------- Box

Box Box::cube(Eigen::Index n, double a, double b) {
  return Box{ParamPoint::Constant(n, a), ParamPoint::Constant(n, b)};
}

double Box::volume() const { return (upper - lower).prod(); }

double Box::scale() const { return dim() == 0 ? 0.0 : (upper - lower).maxCoeff(); }

bool Box::contains(const ParamPoint& x, double margin) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!(x[i] >= lower[i] + margin && x[i] <= upper[i] - margin)) return false;
  }
  return true;
}

bool Box::contains(const Box& inner, double margin) const {
  return contains(inner.lower, margin) && contains(inner.upper, margin);
}

Box Box::shrunk(double margin) const {
  return Box{lower.array() + margin, upper.array() - margin};
}

ParamPoint Box::to_unit(const ParamPoint& x) const {
  return ((2.0 * x - lower - upper).array() / (upper - lower).array()).matrix();
}

ParamPoint Box::from_unit(const ParamPoint& u) const {
  return (0.5 * (lower + upper).array() + 0.5 * (upper - lower).array() * u.array()).matrix();
}

// ---------------------------------------------------------------- Jet2

Jet2::Jet2(AmbientVector value, std::vector<AmbientVector> d1, std::vector<AmbientVector> d2_packed)
    : value_(std::move(value)), d1_(std::move(d1)), d2_(std::move(d2_packed)) {
  const auto n = d1_.size();
  if (d2_.size() != n * (n + 1) / 2) throw DimensionError("Jet2: packed Hessian has wrong length");
}

std::size_t Jet2::packed_index(Eigen::Index i, Eigen::Index j) {
  if (i > j) std::swap(i, j);
  // Upper triangle packed column by column; the index does not depend on n.
  return static_cast<std::size_t>(j * (j + 1) / 2 + i);
}

// ---------------------------------------------------------------- FD jets

std::vector<AmbientVector> fd_tangents(const ImmersionChart::Evaluator& f, const ParamPoint& x,
                                       double h) {
  std::vector<AmbientVector> d1;
  d1.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) d1.push_back(fd::partial(f, x, i, h));
  return d1;
}

Jet2 fd_jet2(const ImmersionChart::Evaluator& f, const ParamPoint& x, double h) {
  const Eigen::Index n = x.size();
  AmbientVector value = f(x);
  std::vector<AmbientVector> d1 = fd_tangents(f, x, h);
  std::vector<AmbientVector> d2(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      d2[Jet2::packed_index(i, j)] =
          i == j ? fd::second_partial(f, x, value, i, h) : fd::mixed_partial(f, x, i, j, h);
    }
  }
  return Jet2(std::move(value), std::move(d1), std::move(d2));
}

// ---------------------------------------------------------------- ImmersionChart

ImmersionChart::ImmersionChart(std::string name, Eigen::Index n, Eigen::Index ambient_dim, Box domain,
                               Evaluator evaluator, double fd_step)
    : ImmersionChart(std::move(name), n, ambient_dim, std::move(domain), std::move(evaluator),
                     JetEvaluator{}, fd_step) {}

ImmersionChart::ImmersionChart(std::string name, Eigen::Index n, Eigen::Index ambient_dim, Box domain,
                               Evaluator evaluator, JetEvaluator analytic_jet, double fd_step)
    : name_(std::move(name)),
      n_(n),
      ambient_dim_(ambient_dim),
      domain_(std::move(domain)),
      evaluator_(std::move(evaluator)),
      analytic_(std::move(analytic_jet)),
      fd_step_(fd_step) {
  if (n_ < 1) throw ConfigError("chart '" + name_ + "': intrinsic dimension must be >= 1");
  if (domain_.dim() != n_) throw ConfigError("chart '" + name_ + "': domain dimension mismatch");
  if (((domain_.upper - domain_.lower).array() <= 0.0).any()) {
    throw ConfigError("chart '" + name_ + "': domain box has empty side");
  }
  if (fd_step_ <= 0.0) fd_step_ = 1e-3 * domain_.scale();
}

void ImmersionChart::check_point(const ParamPoint& x, bool needs_stencil) const {
  if (!domain_.contains(x)) {
    std::ostringstream os;
    os << "chart '" << name_ << "': point (" << x.transpose() << ") outside domain";
    throw DomainError(os.str());
  }
  if (needs_stencil && !domain_.contains(x, fd::kStencilReach * fd_step_)) {
    std::ostringstream os;
    os << "chart '" << name_ << "': finite-difference stencil at (" << x.transpose()
       << ") leaves the domain (step " << fd_step_ << ")";
    throw FDStencilError(os.str());
  }
}

AmbientVector ImmersionChart::value(const ParamPoint& x) const {
  check_point(x, false);
  return evaluator_(x);
}

Jet2 ImmersionChart::jet(const ParamPoint& x) const {
  if (analytic_) {
    check_point(x, false);
    return analytic_(x);
  }
  check_point(x, true);
  return fd_jet2(evaluator_, x, fd_step_);
}

std::vector<AmbientVector> ImmersionChart::tangents(const ParamPoint& x) const {
  if (analytic_) return jet(x).d1();
  check_point(x, true);
  return fd_tangents(evaluator_, x, fd_step_);
}

ImmersionChart ImmersionChart::with_fd_backend(double h) const {
  return ImmersionChart(name_, n_, ambient_dim_, domain_, evaluator_, h);
}

Jet2 eval_jet2(const ImmersionChart& chart, const ParamPoint& x) { return chart.jet(x); }

// ---------------------------------------------------------------- metric checks

double min_eigenvalue(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix require_positive_definite(const Matrix& g, double pd_tol, const std::string& context) {
  Eigen::LDLT<Matrix> ldlt(g);
  const bool ok = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                  (ldlt.vectorD().array() > pd_tol).all();
  if (!ok) {
    const double lambda = min_eigenvalue(g);
    std::ostringstream os;
    os << context << ": induced metric is not positive definite (min eigenvalue " << lambda << ")";
    throw SpacelikeViolation(os.str(), lambda);
  }
  return g;
}

Matrix validate_spacelike(const ImmersionChart& chart, const ParamPoint& x, double pd_tol) {
  const auto t = chart.tangents(x);
  std::ostringstream os;
  os << "chart '" << chart.name() << "' at (" << x.transpose() << ")";
  return require_positive_definite(gram(t), pd_tol, os.str());
}

}  // namespace lightcone
