#pragma once

#include <Eigen/Core>

#include <cmath>

namespace lightcone {

// Second-order forward-mode jet: value, gradient and Hessian with respect to
// the chart parameters. Built-in charts are written once as templates over
// the scalar type and evaluated with Taylor2 to obtain exact second jets.
struct Taylor2 {
  double v = 0.0;
  Eigen::VectorXd g;
  Eigen::MatrixXd h;

  Taylor2() = default;
  Taylor2(double value, Eigen::Index n)
      : v(value), g(Eigen::VectorXd::Zero(n)), h(Eigen::MatrixXd::Zero(n, n)) {}

  static Taylor2 variable(double value, Eigen::Index n, Eigen::Index i) {
    Taylor2 t(value, n);
    t.g[i] = 1.0;
    return t;
  }
  static Taylor2 constant(double value, Eigen::Index n) { return Taylor2(value, n); }
};

inline Taylor2 operator+(const Taylor2& a, const Taylor2& b) {
  Taylor2 r;
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  r.h = a.h + b.h;
  return r;
}

inline Taylor2 operator-(const Taylor2& a, const Taylor2& b) {
  Taylor2 r;
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  r.h = a.h - b.h;
  return r;
}

inline Taylor2 operator-(const Taylor2& a) {
  Taylor2 r;
  r.v = -a.v;
  r.g = -a.g;
  r.h = -a.h;
  return r;
}

inline Taylor2 operator*(const Taylor2& a, const Taylor2& b) {
  Taylor2 r;
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}

inline Taylor2 operator*(double s, const Taylor2& a) {
  Taylor2 r;
  r.v = s * a.v;
  r.g = s * a.g;
  r.h = s * a.h;
  return r;
}

inline Taylor2 operator*(const Taylor2& a, double s) { return s * a; }

inline Taylor2 operator+(const Taylor2& a, double s) {
  Taylor2 r = a;
  r.v += s;
  return r;
}

inline Taylor2 operator+(double s, const Taylor2& a) { return a + s; }
inline Taylor2 operator-(const Taylor2& a, double s) { return a + (-s); }
inline Taylor2 operator-(double s, const Taylor2& a) { return (-a) + s; }

// f(a) given f, f', f'' at a.v.
inline Taylor2 chain(const Taylor2& a, double f, double df, double d2f) {
  Taylor2 r;
  r.v = f;
  r.g = df * a.g;
  r.h = df * a.h + d2f * a.g * a.g.transpose();
  return r;
}

inline Taylor2 sin(const Taylor2& a) {
  return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}
inline Taylor2 cos(const Taylor2& a) {
  return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}
inline Taylor2 sinh(const Taylor2& a) {
  return chain(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v));
}
inline Taylor2 cosh(const Taylor2& a) {
  return chain(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v));
}

}  // namespace lightcone
