#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lightcone/chart.hpp"
#include "lightcone/frame.hpp"
#include "lightcone/quadrature.hpp"

namespace lightcone {

using ScalarField = std::function<double(const ParamPoint&)>;
using TimeScalarField = std::function<double(double, const ParamPoint&)>;
using VectorField = std::function<AmbientVector(const ParamPoint&)>;
using Family = std::function<AmbientVector(double, const ParamPoint&)>;

// b(x) = prod_i exp(1 - 1/(1 - u_i^2)) with u the box-normalized coordinate,
// extended by zero. Smooth, equal to 1 at the centre, flat at the boundary.
struct BumpWindow {
  Box box;
  double operator()(const ParamPoint& x) const;
};

enum class VariationKind { characteristic, admissible_lift, general };
std::string to_string(VariationKind kind);

// A one-parameter family F(t, .) of immersions with F(0, .) = p, together with
// its variational field X = dF/dt|0 and acceleration d^2F/dt^2|0.
struct VariationSpec {
  VariationKind kind = VariationKind::general;
  Family family;
  VectorField velocity;
  VectorField acceleration;
  // Characteristic kinds only: the scalar profile multiplying q in F (already
  // windowed), and its first two t-derivatives at 0.
  TimeScalarField profile;
  ScalarField profile_rate;
  ScalarField profile_accel;
  double epsilon = 1.0;
  BumpWindow window;

  bool is_characteristic() const { return kind != VariationKind::general; }
};

struct VariationOptions {
  double epsilon = 1.0;
  double t_step_factor = 1e-2;  // FD-in-t base step = factor * epsilon
  double t_step() const { return t_step_factor * epsilon; }
};

// F(t,x) = p(x) + phi(t,x) b(x) q(x). phi(0, .) must vanish (sampled; SpecError
// otherwise). Optional rate/accel give d_t phi and d_t^2 phi at 0; when absent
// they are taken by Richardson differences in t. With apply_window = false the
// profile is used as given (it must already vanish at the boundary).
VariationSpec make_characteristic_variation(const ImmersionChart& chart, const Box& window,
                                            TimeScalarField phi, const VariationOptions& options = {},
                                            ScalarField rate = {}, ScalarField accel = {},
                                            bool apply_window = true);

// phi(t,x) = t phi0(x), windowed.
VariationSpec admissible_lift(const ImmersionChart& chart, const Box& window, ScalarField phi0,
                              const VariationOptions& options = {});

// Arbitrary family; X and the acceleration come from Richardson differences in t.
VariationSpec make_general_variation(const ImmersionChart& chart, const Box& window, Family family,
                                     const VariationOptions& options = {});

// F(t,x) = (1 + t phi0(x) b(x)) p(x): radial scaling along the cone.
VariationSpec radial_variation(const ImmersionChart& chart, const Box& window, ScalarField phi0,
                               const VariationOptions& options = {});

struct FdEstimate {
  double value = 0.0;
  double error = 0.0;  // |extrapolated - finer central difference|
};

// Richardson-extrapolated central difference of order 1 or 2 at t = 0 from
// steps h and h/2. NaN or a spacelike violation at a stencil point raises
// StencilRangeError.
FdEstimate fd_derivative(const std::function<double(double)>& fn, int order, double h);

// Vector-valued counterpart used to extract X and the acceleration of general families.
AmbientVector fd_derivative_vector(const std::function<AmbientVector(double)>& fn, int order, double h);

double volume(const ImmersionChart& chart, const QuadratureGrid& grid);
// Vol(t) of F(t, .); metric from difference jets in x of the family.
double volume(const ImmersionChart& chart, const QuadratureGrid& grid, const VariationSpec& spec,
              double t, double pd_tol = 1e-12);

// Frames at every node of the grid, computed in parallel.
std::vector<PointFrame> frames_on_grid(const ImmersionChart& chart, const QuadratureGrid& grid);
double max_abs_scalar_curvature(const std::vector<PointFrame>& frames);

// int (-tr A <X,p> + n <X,q>) dV_0.
double first_variation_general(const ImmersionChart& chart, const QuadratureGrid& grid,
                               const VectorField& X);
// -int tr A phi0 b dV_0  (X = phi0 b q).
double first_variation_admissible(const ImmersionChart& chart, const QuadratureGrid& grid,
                                  const ScalarField& phi0, const BumpWindow& window);
// Same, with <X,p> read from a characteristic spec.
double first_variation_admissible(const ImmersionChart& chart, const QuadratureGrid& grid,
                                  const VariationSpec& spec);

// Integrand pieces of the flat-ambient second variation at one node:
//   normal_sq  = sum_i <(D_ei X)^perp, (D_ei X)^perp>
//   cross      = sum_ij <D_ei X, e_j><D_ej X, e_i>
//   trace_sq   = (sum_i <D_ei X, e_i>)^2
//   accel_H    = <d_t^2 F, H>
struct SecondVariationTerms {
  double normal_sq = 0.0;
  double cross = 0.0;
  double trace_sq = 0.0;
  double accel_H = 0.0;

  double total() const { return normal_sq - cross + trace_sq - accel_H; }
};

struct SecondVariationResult {
  double value = 0.0;
  SecondVariationTerms integrated;           // each term integrated against dV_0
  std::vector<SecondVariationTerms> per_node;
};

SecondVariationResult second_variation_general(const ImmersionChart& chart, const QuadratureGrid& grid,
                                               const VariationSpec& spec);

// -int phi0^2 b^2 tr(A^2) dV_0. Throws SPrecondError unless max |S| < s_flat_tol on the grid.
double second_variation_characteristic(const ImmersionChart& chart, const QuadratureGrid& grid,
                                       const ScalarField& phi0, const BumpWindow& window,
                                       double s_flat_tol = 1e-6);
// Same with <X,p> taken from a characteristic spec.
double second_variation_characteristic(const ImmersionChart& chart, const QuadratureGrid& grid,
                                       const VariationSpec& spec, double s_flat_tol = 1e-6);

struct VariationReport {
  std::string kind;
  double volume0 = 0.0;
  double closed_form_d1 = 0.0;
  double fd_d1 = 0.0;
  double fd_d1_error = 0.0;
  double closed_form_d2 = 0.0;
  double fd_d2 = 0.0;
  double fd_d2_error = 0.0;
  double general_d2 = 0.0;  // second_variation_general, always evaluated
  std::optional<double> characteristic_d2;
  std::optional<std::string> s_precond_error;
  double max_abs_S = 0.0;
  double rel_err_d1 = 0.0;
  double rel_err_d2 = 0.0;
  bool sign_check_d2 = true;  // closed_form_d2 <= sign_tol
  SecondVariationTerms general_terms;
};

struct ReportOptions {
  double s_flat_tol = 1e-6;
  double sign_tol = 1e-12;
};

VariationReport variation_report(const ImmersionChart& chart, const QuadratureGrid& grid,
                                 const VariationSpec& spec, const ReportOptions& options = {});

// |a - b| / max(1, |b|)
double relative_error(double a, double b);

}  // namespace lightcone
