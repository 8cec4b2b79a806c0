#include <cmath>
#include <sstream>

#include "lightcone/errors.hpp"
#include "lightcone/functional.hpp"

namespace lightcone {
namespace {

AmbientVector dual_at(const ImmersionChart& chart, const ParamPoint& x) {
  return dual_map(chart.value_unchecked(x), chart.tangents(x));
}

// phi(0, .) = 0 on a 5^n lattice of the window box.
void require_vanishing_at_zero(const TimeScalarField& phi, const Box& box) {
  const QuadratureGrid probe = build_grid(box, 5);
  for (const auto& x : probe.nodes) {
    const double v = phi(0.0, x);
    if (!(std::abs(v) <= 1e-14)) {
      std::ostringstream os;
      os << "characteristic variation: phi(0, x) = " << v << " != 0 at (" << x.transpose() << ")";
      throw SpecError(os.str());
    }
  }
}

}  // namespace

double BumpWindow::operator()(const ParamPoint& x) const {
  const ParamPoint u = box.to_unit(x);
  double b = 1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double s = 1.0 - u[i] * u[i];
    if (s <= 0.0) return 0.0;
    b *= std::exp(1.0 - 1.0 / s);
  }
  return b;
}

std::string to_string(VariationKind kind) {
  switch (kind) {
    case VariationKind::characteristic:
      return "characteristic";
    case VariationKind::admissible_lift:
      return "admissible_lift";
    case VariationKind::general:
      return "general";
  }
  return "unknown";
}

FdEstimate fd_derivative(const std::function<double(double)>& fn, int order, double h) {
  if (order != 1 && order != 2) throw ConfigError("fd_derivative: order must be 1 or 2");
  if (!(h > 0.0)) throw ConfigError("fd_derivative: step must be positive");
  auto eval = [&](double t) {
    double v = 0.0;
    try {
      v = fn(t);
    } catch (const SpacelikeViolation& e) {
      std::ostringstream os;
      os << "fd_derivative: stencil point t = " << t << " left the spacelike regime (" << e.what()
         << "); use a smaller step";
      throw StencilRangeError(os.str());
    }
    if (std::isnan(v)) {
      std::ostringstream os;
      os << "fd_derivative: NaN at stencil point t = " << t << "; use a smaller step";
      throw StencilRangeError(os.str());
    }
    return v;
  };
  const double f0 = order == 2 ? eval(0.0) : 0.0;
  auto central = [&](double s) {
    const double fp = eval(s);
    const double fm = eval(-s);
    return order == 1 ? (fp - fm) / (2.0 * s) : (fp - 2.0 * f0 + fm) / (s * s);
  };
  const double coarse = central(h);
  const double fine = central(0.5 * h);
  const double extrapolated = (4.0 * fine - coarse) / 3.0;
  return FdEstimate{extrapolated, std::abs(extrapolated - fine)};
}

AmbientVector fd_derivative_vector(const std::function<AmbientVector(double)>& fn, int order, double h) {
  if (order != 1 && order != 2) throw ConfigError("fd_derivative_vector: order must be 1 or 2");
  const AmbientVector f0 = order == 2 ? fn(0.0) : AmbientVector();
  auto central = [&](double s) -> AmbientVector {
    const AmbientVector fp = fn(s);
    const AmbientVector fm = fn(-s);
    if (order == 1) return (fp - fm) / (2.0 * s);
    return (fp - 2.0 * f0 + fm) / (s * s);
  };
  const AmbientVector coarse = central(h);
  const AmbientVector fine = central(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

VariationSpec make_characteristic_variation(const ImmersionChart& chart, const Box& window,
                                            TimeScalarField phi, const VariationOptions& options,
                                            ScalarField rate, ScalarField accel, bool apply_window) {
  if (!phi) throw SpecError("characteristic variation: phi is empty");
  if (window.dim() != chart.n()) throw SpecError("characteristic variation: window dimension mismatch");
  require_vanishing_at_zero(phi, window);

  VariationSpec spec;
  spec.kind = VariationKind::characteristic;
  spec.epsilon = options.epsilon;
  spec.window = BumpWindow{window};
  const BumpWindow b = spec.window;
  const double ht = options.t_step();

  if (apply_window) {
    spec.profile = [phi, b](double t, const ParamPoint& x) {
      const double w = b(x);
      return w == 0.0 ? 0.0 : phi(t, x) * w;
    };
  } else {
    spec.profile = phi;
  }
  const TimeScalarField profile = spec.profile;
  const ScalarField factor = apply_window ? ScalarField(b) : ScalarField([](const ParamPoint&) { return 1.0; });

  if (rate) {
    spec.profile_rate = [rate, factor](const ParamPoint& x) { return rate(x) * factor(x); };
  } else {
    spec.profile_rate = [profile, ht](const ParamPoint& x) {
      return fd_derivative([&](double t) { return profile(t, x); }, 1, ht).value;
    };
  }
  if (accel) {
    spec.profile_accel = [accel, factor](const ParamPoint& x) { return accel(x) * factor(x); };
  } else {
    spec.profile_accel = [profile, ht](const ParamPoint& x) {
      return fd_derivative([&](double t) { return profile(t, x); }, 2, ht).value;
    };
  }

  // Copies of the chart keep the spec self-contained.
  spec.family = [chart, profile](double t, const ParamPoint& x) -> AmbientVector {
    const double c = profile(t, x);
    const AmbientVector p = chart.value_unchecked(x);
    if (c == 0.0) return p;
    return p + c * dual_at(chart, x);
  };
  const ScalarField r = spec.profile_rate;
  const ScalarField a = spec.profile_accel;
  spec.velocity = [chart, r](const ParamPoint& x) -> AmbientVector {
    const double c = r(x);
    if (c == 0.0) return AmbientVector::Zero(chart.ambient_dim());
    return c * dual_at(chart, x);
  };
  spec.acceleration = [chart, a](const ParamPoint& x) -> AmbientVector {
    const double c = a(x);
    if (c == 0.0) return AmbientVector::Zero(chart.ambient_dim());
    return c * dual_at(chart, x);
  };
  return spec;
}

VariationSpec admissible_lift(const ImmersionChart& chart, const Box& window, ScalarField phi0,
                              const VariationOptions& options) {
  if (!phi0) throw SpecError("admissible lift: phi0 is empty");
  VariationSpec spec = make_characteristic_variation(
      chart, window, [phi0](double t, const ParamPoint& x) { return t == 0.0 ? 0.0 : t * phi0(x); },
      options, phi0, [](const ParamPoint&) { return 0.0; });
  spec.kind = VariationKind::admissible_lift;
  return spec;
}

VariationSpec make_general_variation(const ImmersionChart& chart, const Box& window, Family family,
                                     const VariationOptions& options) {
  if (!family) throw SpecError("general variation: family is empty");
  if (window.dim() != chart.n()) throw SpecError("general variation: window dimension mismatch");
  const QuadratureGrid probe = build_grid(window, 3);
  for (const auto& x : probe.nodes) {
    if ((family(0.0, x) - chart.value_unchecked(x)).cwiseAbs().maxCoeff() > 1e-12) {
      std::ostringstream os;
      os << "general variation: F(0, x) != p(x) at (" << x.transpose() << ")";
      throw SpecError(os.str());
    }
  }
  VariationSpec spec;
  spec.kind = VariationKind::general;
  spec.epsilon = options.epsilon;
  spec.window = BumpWindow{window};
  spec.family = family;
  const double ht = options.t_step();
  spec.velocity = [family, ht](const ParamPoint& x) {
    return fd_derivative_vector([&](double t) { return family(t, x); }, 1, ht);
  };
  spec.acceleration = [family, ht](const ParamPoint& x) {
    return fd_derivative_vector([&](double t) { return family(t, x); }, 2, ht);
  };
  return spec;
}

VariationSpec radial_variation(const ImmersionChart& chart, const Box& window, ScalarField phi0,
                               const VariationOptions& options) {
  if (!phi0) throw SpecError("radial variation: phi0 is empty");
  const BumpWindow b{window};
  Family family = [chart, phi0, b](double t, const ParamPoint& x) -> AmbientVector {
    const double w = b(x);
    const AmbientVector p = chart.value_unchecked(x);
    return w == 0.0 ? p : AmbientVector((1.0 + t * phi0(x) * w) * p);
  };
  return make_general_variation(chart, window, std::move(family), options);
}

}  // namespace lightcone
