#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"
#include "lightcone/frame.hpp"

namespace lightcone {
namespace {

// Flattened index helpers; every tensor is stored in one Eigen vector so the
// generic difference stencils apply directly.
struct Index3 {
  Eigen::Index n;
  Eigen::Index operator()(Eigen::Index a, Eigen::Index b, Eigen::Index c) const {
    return (a * n + b) * n + c;
  }
};

Eigen::VectorXd flatten(const Matrix& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

class IntrinsicGeometry {
 public:
  IntrinsicGeometry(const ImmersionChart& chart, double step) : chart_(chart), step_(step) {}

  Matrix metric(const ParamPoint& y) const { return gram(chart_.tangents(y)); }

  // Gamma^l_{jk} at y, stored at index (l, j, k).
  Eigen::VectorXd christoffel(const ParamPoint& y) const {
    const Eigen::Index n = y.size();
    const Index3 idx{n};
    const Matrix g = metric(y);
    const Matrix g_inv = g.llt().solve(Matrix::Identity(n, n));
    std::vector<Matrix> dg(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      auto flat = [this](const ParamPoint& z) { return flatten(metric(z)); };
      const Eigen::VectorXd d = fd::partial(flat, y, i, step_);
      dg[static_cast<std::size_t>(i)] = Eigen::Map<const Matrix>(d.data(), n, n);
    }
    auto dgv = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) {
      return dg[static_cast<std::size_t>(a)](b, c);  // d_a g_bc
    };
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n * n * n);
    for (Eigen::Index l = 0; l < n; ++l) {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
          double s = 0.0;
          for (Eigen::Index m = 0; m < n; ++m) {
            s += g_inv(l, m) * (dgv(j, m, k) + dgv(k, m, j) - dgv(m, j, k));
          }
          gamma[idx(l, j, k)] = 0.5 * s;
        }
      }
    }
    return gamma;
  }

  // R_{ijkw} = <R(d_i, d_j) d_k, d_w>, stored at ((i*n + j)*n + k)*n + w.
  Eigen::VectorXd riemann(const ParamPoint& x, const Matrix& g) const {
    const Eigen::Index n = x.size();
    const Index3 idx{n};
    const Eigen::VectorXd gamma = christoffel(x);
    std::vector<Eigen::VectorXd> dgamma(static_cast<std::size_t>(n));
    auto gfun = [this](const ParamPoint& z) { return christoffel(z); };
    for (Eigen::Index i = 0; i < n; ++i) {
      dgamma[static_cast<std::size_t>(i)] = fd::partial(gfun, x, i, step_);
    }
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n * n * n * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
          // R^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
          Eigen::VectorXd up(n);
          for (Eigen::Index l = 0; l < n; ++l) {
            double v = dgamma[static_cast<std::size_t>(i)][idx(l, j, k)] -
                       dgamma[static_cast<std::size_t>(j)][idx(l, i, k)];
            for (Eigen::Index m = 0; m < n; ++m) {
              v += gamma[idx(l, i, m)] * gamma[idx(m, j, k)] - gamma[idx(l, j, m)] * gamma[idx(m, i, k)];
            }
            up[l] = v;
          }
          const Eigen::VectorXd low = g * up;
          for (Eigen::Index w = 0; w < n; ++w) r[((i * n + j) * n + k) * n + w] = low[w];
        }
      }
    }
    return r;
  }

 private:
  const ImmersionChart& chart_;
  double step_;
};

double contract(const Eigen::VectorXd& r, Eigen::Index n, const ParamPoint& X, const ParamPoint& Y,
                const ParamPoint& Z, const ParamPoint& W) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index w = 0; w < n; ++w) s += r[((i * n + j) * n + k) * n + w] * X[i] * Y[j] * Z[k] * W[w];
  return s;
}

}  // namespace

IntrinsicCurvatureReport intrinsic_oracle(const ImmersionChart& chart, const ParamPoint& x,
                                          const IntrinsicOracleOptions& options) {
  const double step = options.step > 0.0 ? options.step : 2.5e-3 * chart.domain().scale();
  const double inner_reach =
      chart.backend() == JetBackend::finite_difference ? fd::kStencilReach * chart.fd_step() : 0.0;
  if (!chart.domain().contains(x, 2.0 * fd::kStencilReach * step + inner_reach)) {
    std::ostringstream os;
    os << "intrinsic_oracle: stencil at (" << x.transpose() << ") leaves the domain of '"
       << chart.name() << "'";
    throw FDStencilError(os.str());
  }

  const PointFrame frame = build_frame(chart, x);
  const Eigen::Index n = frame.n();
  const IntrinsicGeometry geom(chart, step);
  const Eigen::VectorXd r = geom.riemann(x, frame.g);

  IntrinsicCurvatureReport rep;
  Eigen::SelfAdjointEigenSolver<Matrix> es(frame.g, Eigen::EigenvaluesOnly);
  rep.metric_condition = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  rep.ill_conditioned = rep.metric_condition > 1e8;

  double s = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const ParamPoint ea = frame.onb.col(a);
      const ParamPoint eb = frame.onb.col(b);
      s += contract(r, n, ea, eb, eb, ea);
    }
  }
  rep.S_intrinsic = s;
  rep.S_extrinsic = -2.0 * static_cast<double>(n - 1) * frame.trA;
  rep.gauss_residual = std::abs(rep.S_intrinsic - rep.S_extrinsic);

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto random_vec = [&] {
    ParamPoint v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uni(rng);
    return v;
  };
  auto ip = [&](const ParamPoint& a, const ParamPoint& b) { return a.dot(frame.g * b); };
  auto ap = [&](const ParamPoint& a, const ParamPoint& b) { return a.dot(frame.h * b); };
  for (int k = 0; k < options.samples; ++k) {
    GaussSample gs{random_vec(), random_vec(), random_vec(), random_vec()};
    gs.lhs = contract(r, n, gs.X, gs.Y, gs.Z, gs.W);
    gs.rhs = -ip(gs.X, gs.W) * ap(gs.Y, gs.Z) - ap(gs.X, gs.W) * ip(gs.Y, gs.Z) +
             ip(gs.Y, gs.W) * ap(gs.X, gs.Z) + ap(gs.Y, gs.W) * ip(gs.X, gs.Z);
    rep.max_sample_residual = std::max(rep.max_sample_residual, std::abs(gs.lhs - gs.rhs));
    rep.riemann_samples.push_back(std::move(gs));
  }
  return rep;
}

}  // namespace lightcone
