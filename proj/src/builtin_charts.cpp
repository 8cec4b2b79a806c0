#include <cmath>
#include <vector>

#include "lightcone/chart.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/taylor2.hpp"

namespace lightcone {
namespace {

double constant_like(double, double c) { return c; }
Taylor2 constant_like(const Taylor2& ref, double c) {
  return Taylor2::constant(c, ref.g.size());
}

// ((1 + |x|^2)/2, (-1 + |x|^2)/2, x^1, ..., x^n): isometric image of R^n in the light-cone.
template <class T>
std::vector<T> euclidean_map(const std::vector<T>& x) {
  T r2 = constant_like(x[0], 0.0);
  for (const T& xi : x) r2 = r2 + xi * xi;
  std::vector<T> out;
  out.reserve(x.size() + 2);
  out.push_back(0.5 * (1.0 + r2));
  out.push_back(0.5 * (r2 - 1.0));
  for (const T& xi : x) out.push_back(xi);
  return out;
}

// H^k in R^{k+1}_1 by nested hyperbolic angles: (cosh s_k * H^{k-1}, sinh s_k).
template <class T>
std::vector<T> hyperboloid(const std::vector<T>& s) {
  using std::cosh;
  using std::sinh;
  std::vector<T> x{cosh(s[0]), sinh(s[0])};
  for (std::size_t k = 1; k < s.size(); ++k) {
    const T c = cosh(s[k]);
    for (T& xi : x) xi = c * xi;
    x.push_back(sinh(s[k]));
  }
  return x;
}

// S^k in R^{k+1} by nested angles: (cos a_k * S^{k-1}, sin a_k); (1,0,...,0) at a = 0.
template <class T>
std::vector<T> sphere_from_equator(const std::vector<T>& a) {
  using std::cos;
  using std::sin;
  std::vector<T> y{cos(a[0]), sin(a[0])};
  for (std::size_t k = 1; k < a.size(); ++k) {
    const T c = cos(a[k]);
    for (T& yi : y) yi = c * yi;
    y.push_back(sin(a[k]));
  }
  return y;
}

// H^n x S^n included in R^{2n+2}_1; parameters (s_1..s_n, theta_1..theta_n).
template <class T>
std::vector<T> hs_product_map(const std::vector<T>& params) {
  const std::size_t n = params.size() / 2;
  const std::vector<T> s(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(n));
  const std::vector<T> th(params.begin() + static_cast<std::ptrdiff_t>(n), params.end());
  std::vector<T> out = hyperboloid(s);
  const std::vector<T> y = sphere_from_equator(th);
  out.insert(out.end(), y.begin(), y.end());
  return out;
}

// S^n with the north pole (0,...,0,1) at the parameter origin:
// u = (sin a_1, cos a_1 * u'), innermost factor (sin a_n, cos a_n).
// Regular while |a_k| < pi/2 for k < n.
template <class T>
std::vector<T> sphere_from_pole(const std::vector<T>& a) {
  using std::cos;
  using std::sin;
  const std::size_t n = a.size();
  std::vector<T> w{sin(a[n - 1]), cos(a[n - 1])};
  for (std::size_t k = n - 1; k-- > 0;) {
    const T c = cos(a[k]);
    for (T& wi : w) wi = c * wi;
    w.insert(w.begin(), sin(a[k]));
  }
  return w;
}

// p(u) = (1, u) for u on the unit sphere.
template <class T>
std::vector<T> round_sphere_map(const std::vector<T>& a) {
  std::vector<T> out{constant_like(a[0], 1.0)};
  const std::vector<T> u = sphere_from_pole(a);
  out.insert(out.end(), u.begin(), u.end());
  return out;
}

template <class Map>
ImmersionChart::Evaluator make_evaluator(Map map) {
  return [map](const ParamPoint& x) {
    std::vector<double> params(x.data(), x.data() + x.size());
    const std::vector<double> out = map(params);
    return AmbientVector(Eigen::Map<const AmbientVector>(out.data(), static_cast<Eigen::Index>(out.size())));
  };
}

template <class Map>
ImmersionChart::JetEvaluator make_jet(Map map) {
  return [map](const ParamPoint& x) {
    const Eigen::Index n = x.size();
    std::vector<Taylor2> params;
    params.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) params.push_back(Taylor2::variable(x[i], n, i));
    const std::vector<Taylor2> out = map(params);
    const auto m = static_cast<Eigen::Index>(out.size());
    AmbientVector value(m);
    std::vector<AmbientVector> d1(static_cast<std::size_t>(n), AmbientVector(m));
    std::vector<AmbientVector> d2(static_cast<std::size_t>(n * (n + 1) / 2), AmbientVector(m));
    for (Eigen::Index k = 0; k < m; ++k) {
      const Taylor2& c = out[static_cast<std::size_t>(k)];
      value[k] = c.v;
      for (Eigen::Index i = 0; i < n; ++i) {
        d1[static_cast<std::size_t>(i)][k] = c.g[i];
        for (Eigen::Index j = i; j < n; ++j) d2[Jet2::packed_index(i, j)][k] = c.h(i, j);
      }
    }
    return Jet2(std::move(value), std::move(d1), std::move(d2));
  };
}

struct EuclideanMap {
  template <class T>
  std::vector<T> operator()(const std::vector<T>& x) const { return euclidean_map(x); }
};
struct HsProductMap {
  template <class T>
  std::vector<T> operator()(const std::vector<T>& x) const { return hs_product_map(x); }
};
struct RoundSphereMap {
  template <class T>
  std::vector<T> operator()(const std::vector<T>& x) const { return round_sphere_map(x); }
};

void require_dimension(int n, const char* name) {
  if (n < 1) throw ConfigError(std::string(name) + ": n must be >= 1");
}

}  // namespace

ImmersionChart euclidean_chart(int n, std::optional<Box> domain) {
  require_dimension(n, "euclidean");
  Box box = domain.value_or(Box::cube(n, -2.0, 2.0));
  return ImmersionChart("euclidean", n, n + 2, std::move(box), make_evaluator(EuclideanMap{}),
                        make_jet(EuclideanMap{}));
}

ImmersionChart hyperbolic_sphere_product_chart(int n, std::optional<Box> domain) {
  require_dimension(n, "hyperbolic_sphere_product");
  Box box = Box::cube(2 * n, -2.0, 2.0);
  // latitude angles of the nested sphere stay off the poles
  for (int k = n + 1; k < 2 * n; ++k) {
    box.lower[k] = -1.3;
    box.upper[k] = 1.3;
  }
  if (domain) box = *domain;
  return ImmersionChart("hyperbolic_sphere_product", 2 * n, 2 * n + 2, std::move(box),
                        make_evaluator(HsProductMap{}), make_jet(HsProductMap{}));
}

ImmersionChart round_sphere_chart(int n, std::optional<Box> domain) {
  require_dimension(n, "round_sphere");
  Box box = domain.value_or(Box::cube(n, -1.2, 1.2));
  return ImmersionChart("round_sphere", n, n + 2, std::move(box), make_evaluator(RoundSphereMap{}),
                        make_jet(RoundSphereMap{}));
}

ImmersionChart builtin(const std::string& name, int n, std::optional<Box> domain) {
  if (name == "euclidean") return euclidean_chart(n, std::move(domain));
  if (name == "hyperbolic_sphere_product" || name == "hs_product") {
    return hyperbolic_sphere_product_chart(n, std::move(domain));
  }
  if (name == "round_sphere") return round_sphere_chart(n, std::move(domain));
  throw ConfigError("unknown built-in chart '" + name + "'");
}

Box default_quadrature_box(const ImmersionChart& chart) {
  const Eigen::Index n = chart.n();
  if (chart.name() == "euclidean" || chart.name() == "hs_product" || chart.name() == "hyperbolic_sphere_product") {
    Box unit = Box::cube(n, 0.0, 1.0);
    if (chart.domain().contains(unit, 0.05 * chart.domain().scale())) return unit;
  }
  if (chart.name() == "round_sphere") {
    Box b = Box::cube(n, -0.8, 0.8);
    if (chart.domain().contains(b, 0.05 * chart.domain().scale())) return b;
  }
  const ParamPoint c = chart.domain().center();
  const ParamPoint half = 0.4 * (chart.domain().upper - chart.domain().lower);
  return Box{c - half, c + half};
}

}  // namespace lightcone
