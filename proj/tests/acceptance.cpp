// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lightcone/chart.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/frame.hpp"
#include "lightcone/functional.hpp"
#include "lightcone/lorentz.hpp"
#include "lightcone/nullspace.hpp"
#include "lightcone/quadrature.hpp"
#include "oracles.hpp"

using namespace lightcone;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records value < tol; keeps the worst ratio in the detail line.
  void below(const std::string& what, double value, double tol) {
    if (!(value < tol)) {
      pass = false;
      detail << what << "=" << value << " (tol " << tol << ") ";
    }
  }
  void require(const std::string& what, bool ok) {
    if (!ok) {
      pass = false;
      detail << what << " ";
    }
  }
};

struct Worst {
  double value = 0.0;
  void add(double v) { value = std::max(value, std::isnan(v) ? INFINITY : v); }
};

ParamPoint pt(std::initializer_list<double> v) {
  ParamPoint a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) a[i++] = x;
  return a;
}

struct Entry {
  std::string name;
  int n;
};

const std::vector<Entry> kBuiltins = {{"euclidean", 2},  {"euclidean", 3},    {"hs_product", 1},
                                      {"hs_product", 2}, {"round_sphere", 2}, {"round_sphere", 3}};

std::string label(const Entry& e) { return e.name + "(" + std::to_string(e.n) + ")"; }

int order_for(Eigen::Index dim) {
  if (dim <= 2) return 16;
  if (dim == 3) return 12;
  return 8;
}

// Middle 60% of each axis.
Box window_box(const ImmersionChart& c) {
  Box b = c.domain();
  const ParamPoint w = b.upper - b.lower;
  b.lower += 0.2 * w;
  b.upper -= 0.2 * w;
  return b;
}

Box sample_box(const ImmersionChart& c) { return c.domain().shrunk(0.05 * c.domain().scale()); }

ParamPoint random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ParamPoint v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

// Random quadratic with O(1) coefficients in box-normalized coordinates.
ScalarField random_phi(const Box& box, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const Eigen::Index n = box.dim();
  const double c0 = u(rng);
  Eigen::VectorXd c1(n);
  Eigen::MatrixXd c2(n, n);
  for (Eigen::Index i = 0; i < n; ++i) c1[i] = u(rng);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c2(i, j) = 0.5 * u(rng);
  return [=](const ParamPoint& x) {
    const ParamPoint y = box.to_unit(x);
    return c0 + c1.dot(y) + y.dot(c2 * y);
  };
}

// int f sqrt(det g) on the grid, with det g from the oracle Minkowski product of chart tangents.
double oracle_integral(const ImmersionChart& c, const QuadratureGrid& g, const std::function<double(const ParamPoint&)>& f) {
  double total = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Jet2 j = c.jet(g.nodes[k]);
    const Eigen::Index n = c.n();
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
      for (Eigen::Index b = 0; b < n; ++b) m(a, b) = oracle::minkowski(j.d1(a), j.d1(b));
    total += g.weights[k] * f(g.nodes[k]) * std::sqrt(m.determinant());
  }
  return total;
}

Outcome duality() {
  Outcome o;
  std::mt19937_64 rng(101);
  for (const Entry& e : {Entry{"euclidean", 2}, Entry{"euclidean", 3}, Entry{"hs_product", 1}, Entry{"round_sphere", 2}}) {
    const ImmersionChart c = builtin(e.name, e.n);
    Worst pq, qq, dq;
    for (int k = 0; k < 200; ++k) {
      const Jet2 j = c.jet(oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
      const AmbientVector q = dual_map(j);
      pq.add(std::abs(oracle::minkowski(j.value(), q) - 1.0));
      qq.add(std::abs(oracle::minkowski(q, q)));
      for (Eigen::Index i = 0; i < c.n(); ++i) dq.add(std::abs(oracle::minkowski(j.d1(i), q)));
    }
    o.below(label(e) + " |<p,q>-1|", pq.value, 1e-9);
    o.below(label(e) + " |<q,q>|", qq.value, 1e-9);
    o.below(label(e) + " |<dp,q>|", dq.value, 1e-9);
  }
  return o;
}

Outcome reference_values() {
  Outcome o;
  std::mt19937_64 rng(102);
  for (int n : {1, 2, 3}) {
    const ImmersionChart c = builtin("euclidean", n);
    const Box sb = sample_box(c);
    AmbientVector expect = AmbientVector::Zero(n + 2);
    expect[0] = expect[1] = -1.0;
    Worst w, slice;
    for (int k = 0; k < 50; ++k) {
      const ParamPoint x = oracle::uniform_in(sb.lower, sb.upper, rng);
      w.add((dual_map(c.jet(x)) - expect).cwiseAbs().maxCoeff());
      const double t = std::uniform_real_distribution<double>(-1, 1)(rng);
      const AmbientVector y = ruled_point(c, t, x);
      slice.add(std::abs(y[0] - y[1] - 1.0));
    }
    o.below("euclidean(" + std::to_string(n) + ") dual", w.value, 1e-10);
    o.below("euclidean(" + std::to_string(n) + ") Phi slice", slice.value, 1e-10);
  }
  for (int n : {1, 2}) {
    const ImmersionChart c = builtin("hs_product", n);
    const Box sb = sample_box(c);
    Worst dual, ruled;
    for (int k = 0; k < 50; ++k) {
      const ParamPoint x = oracle::uniform_in(sb.lower, sb.upper, rng);
      const AmbientVector p = c.value(x);
      AmbientVector half = 0.5 * p;
      half.head(n + 1) *= -1.0;
      dual.add((dual_map(c.jet(x)) - half).cwiseAbs().maxCoeff());
      const double t = std::uniform_real_distribution<double>(-1, 1)(rng);
      AmbientVector phi = p;
      phi.head(n + 1) *= (2.0 - t) / 2.0;
      phi.tail(n + 1) *= (2.0 + t) / 2.0;
      ruled.add((ruled_point(c, t, x) - phi).cwiseAbs().maxCoeff());
    }
    o.below("hs_product(" + std::to_string(n) + ") dual", dual.value, 1e-9);
    o.below("hs_product(" + std::to_string(n) + ") Phi", ruled.value, 1e-9);
  }
  return o;
}

Outcome gauss() {
  Outcome o;
  std::mt19937_64 rng(103);
  for (const Entry& e : kBuiltins) {
    const ImmersionChart c = builtin(e.name, e.n);
    const Box b = sample_box(c).shrunk(0.05 * c.domain().scale());
    Worst w;
    for (int k = 0; k < 5; ++k) w.add(intrinsic_oracle(c, oracle::uniform_in(b.lower, b.upper, rng)).gauss_residual);
    o.below(label(e) + " gauss", w.value, 1e-5);
  }
  const ImmersionChart s = builtin("round_sphere", 2);
  const Box b = window_box(s);
  auto metric = [&](const Eigen::VectorXd& y) { return validate_spacelike(s, y); };
  Worst brioschi, engine;
  for (int k = 0; k < 10; ++k) {
    const ParamPoint x = oracle::uniform_in(b.lower, b.upper, rng);
    brioschi.add(std::abs(2.0 * oracle::brioschi_K(metric, x, 1e-3) - 2.0));
    engine.add(std::abs(intrinsic_oracle(s, x).S_intrinsic - 2.0));
  }
  o.below("round_sphere(2) independent S-2", brioschi.value, 1e-5);
  o.below("round_sphere(2) S_intrinsic-2", engine.value, 1e-5);
  return o;
}

Outcome dual_derivative_check() {
  Outcome o;
  std::mt19937_64 rng(104);
  for (const Entry& e : kBuiltins) {
    const ImmersionChart c = builtin(e.name, e.n);
    const Box b = sample_box(c).shrunk(0.05 * c.domain().scale());
    Worst w;
    for (int k = 0; k < 100; ++k) {
      const ParamPoint x = oracle::uniform_in(b.lower, b.upper, rng);
      const ParamPoint v = random_unit(c.n(), rng);
      const PointFrame f = build_frame(c, x);
      const AmbientVector dq = dual_derivative(c, x, v);
      // A V pushed forward: sum_j (A v)_j d_j p
      const Eigen::VectorXd av = f.A * v;
      AmbientVector push = AmbientVector::Zero(c.ambient_dim());
      for (Eigen::Index j = 0; j < c.n(); ++j) push += av[j] * f.jet.d1(j);
      w.add((dq + push).norm());
    }
    o.below(label(e) + " |dq+AV|", w.value, 1e-6);
  }
  return o;
}

Outcome first_variation() {
  Outcome o;
  std::mt19937_64 rng(105);
  for (const Entry& e : kBuiltins) {
    const ImmersionChart c = builtin(e.name, e.n);
    const Box box = window_box(c);
    const QuadratureGrid g = build_grid(c, box, order_for(c.n()));
    const bool flat = e.name != "round_sphere";
    Worst rel, flat_d1;
    for (int k = 0; k < 20; ++k) {
      const VariationReport r = variation_report(c, g, admissible_lift(c, box, random_phi(box, rng)));
      rel.add(relative_error(r.closed_form_d1, r.fd_d1));
      if (flat) flat_d1.add(std::abs(r.fd_d1));
    }
    o.below(label(e) + " d1 rel", rel.value, 1e-5);
    if (flat) o.below(label(e) + " |fd_d1|", flat_d1.value, 1e-7);
    if (!flat) {
      const VariationReport r = variation_report(c, g, admissible_lift(c, box, [](const ParamPoint&) { return 1.0; }));
      const double ib = oracle_integral(c, g, [&](const ParamPoint& x) { return oracle::bump(x, box.lower, box.upper); });
      o.require(label(e) + " |fd_d1|<=0.1*int b", std::abs(r.fd_d1) > 0.1 * ib);
    }
  }
  return o;
}

Outcome second_variation() {
  Outcome o;
  std::mt19937_64 rng(106);
  for (const Entry& e : {Entry{"euclidean", 2}, Entry{"hs_product", 1}}) {
    const ImmersionChart c = builtin(e.name, e.n);
    const Box box = window_box(c);
    const QuadratureGrid g = build_grid(c, box, 16);
    Worst ch_fd, gen_fd, gen_ch, sign;
    for (int k = 0; k < 20; ++k) {
      const VariationSpec spec = admissible_lift(c, box, random_phi(box, rng));
      const VariationReport r = variation_report(c, g, spec);
      const double ch = second_variation_characteristic(c, g, spec);
      ch_fd.add(relative_error(ch, r.fd_d2));
      gen_fd.add(relative_error(r.general_d2, r.fd_d2));
      gen_ch.add(relative_error(r.general_d2, ch));
      sign.add(ch);
    }
    o.below(label(e) + " |char-fd|", ch_fd.value, 1e-4);
    o.below(label(e) + " |general-fd|", gen_fd.value, 1e-4);
    o.below(label(e) + " |general-char|", gen_ch.value, 1e-4);
    o.require(label(e) + " characteristic d2 > 1e-12", sign.value <= 1e-12);
  }
  const ImmersionChart c = builtin("hs_product", 1);
  const Box box = window_box(c);
  const QuadratureGrid g = build_grid(c, box, 16);
  auto one = [](const ParamPoint&) { return 1.0; };
  const double d2 = second_variation_characteristic(c, g, one, BumpWindow{box});
  // tr(A^2) = 1/2 from the diagonal shape operator at the origin
  const PointFrame f0 = build_frame(c, pt({0, 0}));
  const double expect = -f0.trA2 * oracle_integral(c, g, [&](const ParamPoint& x) {
    const double b = oracle::bump(x, box.lower, box.upper);
    return b * b;
  });
  o.require("hs_product(1) phi0=1 not negative", d2 < 0.0);
  o.below("hs_product(1) phi0=1 rel to -1/2 int b^2", std::abs(d2 - expect) / std::abs(expect), 0.02);
  return o;
}

Outcome null_space() {
  Outcome o;
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> tt(-0.5, 0.5);
  for (const Entry& e : kBuiltins) {
    const ImmersionChart c = builtin(e.name, e.n);
    const Box b = sample_box(c);
    Worst radius, kernel;
    double min_eig = INFINITY;
    for (int k = 0; k < 200; ++k) {
      const double t = tt(rng);
      const RuledMapSample s = ruled_map(c, t, oracle::uniform_in(b.lower, b.upper, rng));
      radius.add(std::abs(oracle::minkowski(s.point, s.point) - 2.0 * t));
      kernel.add(s.kernel_residual);
      min_eig = std::min(min_eig, s.xblock_min_eigenvalue);
    }
    o.below(label(e) + " |<Phi,Phi>-2t|", radius.value, 1e-9);
    o.below(label(e) + " kernel", kernel.value, 1e-8);
    o.require(label(e) + " x-block not PD", min_eig > 0.0);
  }
  return o;
}

Outcome conversion() {
  Outcome o;
  std::mt19937_64 rng(108);
  std::uniform_real_distribution<double> u(-1, 1);
  const ImmersionChart c = builtin("hs_product", 1);
  const Box box = window_box(c);
  const QuadratureGrid g = build_grid(c, box, 16);
  const std::vector<double> ts = {-0.2, -0.1, 0.05, 0.15, 0.25};
  Worst diff;
  for (int k = 0; k < 10; ++k) {
    const double a0 = 0.1 * u(rng), a1 = 0.1 * u(rng), a2 = 0.1 * u(rng);
    auto tau0 = [=](const ParamPoint& x) {
      const ParamPoint y = box.to_unit(x);
      return a0 + a1 * y[0] + a2 * y[0] * y[1];
    };
    const double amp = 0.01 * box.scale();
    const double w0 = u(rng), w1 = u(rng);
    auto drift = [=](const ParamPoint& x) {
      const ParamPoint y = box.to_unit(x);
      return ParamPoint(pt({amp * std::cos(w0 + y[1]), amp * std::sin(w1 + y[0])}));
    };
    const NullVariation nv = make_windowed_null_variation(box, tau0, 1.0, u(rng), drift);
    try {
      const ConvertedVariation cv = convert_null_variation(c, nv);
      o.require("delta below sampled range", cv.delta >= 0.25);
      diff.add(volume_equality_check(c, g, nv, cv.spec, ts).max_abs_diff);
    } catch (const InversionError& err) {
      o.require(std::string("inversion failed: ") + err.what(), false);
    }
  }
  o.below("max |Vol_F-Vol_G|", diff.value, 1e-6);
  return o;
}

Outcome quadrature() {
  Outcome o;
  const ImmersionChart c = builtin("euclidean", 2);
  o.below("euclidean(2) [0,1]^2 volume", std::abs(volume(c, build_grid(c, Box::cube(2, 0, 1), 16)) - 1.0), 1e-12);
  Worst w;
  for (int order = 2; order <= 16; ++order) {
    const QuadratureGrid g = build_grid(Box::cube(2, 0, 1), order);
    for (int a = 0; a < 2 * order; a += 3)
      for (int b = 0; b < 2 * order; b += 5) {
        const double v = integrate(g, [&](const ParamPoint& x) { return std::pow(x[0], a) * std::pow(x[1], b); });
        w.add(std::abs(v - 1.0 / ((a + 1.0) * (b + 1.0))));
      }
  }
  o.below("monomial exactness", w.value, 1e-12);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"duality", duality},
      {"reference values", reference_values},
      {"gauss equation", gauss},
      {"dual derivative", dual_derivative_check},
      {"first variation", first_variation},
      {"second variation", second_variation},
      {"null space", null_space},
      {"volume conversion", conversion},
      {"quadrature", quadrature},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %zu %s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                o.pass ? "" : ": ", o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
