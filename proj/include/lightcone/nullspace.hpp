#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lightcone/chart.hpp"
#include "lightcone/functional.hpp"
#include "lightcone/quadrature.hpp"

namespace lightcone {

struct NullspaceOptions {
  double t_cap = 1.0;      // |t| bound for the ruled map
  double rank_tol = 1e-10;  // x-block pivots below this raise the tubular warning
};

// One evaluation of Phi(t,x) = p(x) + t q(x) with its pullback metric in (t, x^1..x^n).
struct RuledMapSample {
  double t = 0.0;
  ParamPoint x;
  AmbientVector point;
  Matrix g_N;
  double kernel_residual = 0.0;  // |g_N e_t|
  double radius2 = 0.0;          // <Phi, Phi>
  double xblock_min_eigenvalue = 0.0;
  bool tubular_warning = false;
  std::string warning;
};

// Phi(t,x). Throws DomainError outside the domain or for |t| > t_cap.
AmbientVector ruled_point(const ImmersionChart& chart, double t, const ParamPoint& x,
                          const NullspaceOptions& options = {});
RuledMapSample ruled_map(const ImmersionChart& chart, double t, const ParamPoint& x,
                         const NullspaceOptions& options = {});

// iota(x) = (0, x).
ParamPoint embed_base(const ParamPoint& x);
// max |g_N(iota x)_{ij} - g_ij(x)| over the x-block together with the t row,
// relative to max(1, max |g_ij|).
double embed_base_residual(const ImmersionChart& chart, const ParamPoint& x);

using ParamFamily = std::function<ParamPoint(double, const ParamPoint&)>;

// G(t,x) = (tau(t,x), alpha(t,x)) with tau(0,.) = 0, alpha(0,.) = id and alpha
// fixing a collar of the box boundary.
struct NullVariation {
  TimeScalarField tau;
  ParamFamily alpha;
  double epsilon = 0.5;
  Box box;
};

// tau(t,x) = (c1 t + c2 t^2) phi0(x) b(x), alpha(t,x) = x + t b(x) v(x), with b
// the bump window of the box.
NullVariation make_windowed_null_variation(const Box& box, ScalarField phi0, double c1, double c2,
                                           std::function<ParamPoint(const ParamPoint&)> drift,
                                           double epsilon = 0.5);

// Throws SpecError when tau(0,.) != 0, alpha(0,.) != id or alpha moves the
// boundary collar.
void validate_null_variation(const NullVariation& nv);

struct InversionOptions {
  int max_iterations = 50;
  double tolerance = 1e-12;
};

// Solves f(x) = y by damped Newton from seed. Throws InversionError.
ParamPoint invert_map(const std::function<ParamPoint(const ParamPoint&)>& f, const ParamPoint& y,
                      const ParamPoint& seed, const InversionOptions& options = {});

struct ConvertedVariation {
  VariationSpec spec;  // characteristic, phi(t,x) = tau(t, beta(t,x))
  double delta = 0.0;  // inversion verified on [-delta, delta]
};

struct ConvertOptions {
  InversionOptions inversion;
  int probe_order = 6;         // probe lattice per axis for the delta search
  int bisection_steps = 30;
  VariationOptions variation;
};

ConvertedVariation convert_null_variation(const ImmersionChart& chart, const NullVariation& nv,
                                          const ConvertOptions& options = {});

// x -> Phi(tau(t,x), alpha(t,x)) as a general family (family only).
VariationSpec null_family(const ImmersionChart& chart, const NullVariation& nv);
double volume_G(const ImmersionChart& chart, const QuadratureGrid& grid, const NullVariation& nv, double t);

struct VolumeEqualityReport {
  std::vector<double> ts;
  std::vector<double> vol_F;
  std::vector<double> vol_G;
  double max_abs_diff = 0.0;
};

VolumeEqualityReport volume_equality_check(const ImmersionChart& chart, const QuadratureGrid& grid,
                                           const NullVariation& nv, const VariationSpec& spec,
                                           const std::vector<double>& ts);

}  // namespace lightcone
