#include <sstream>

#include "lightcone/chart.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/finite_difference.hpp"
#include "lightcone/frame.hpp"

namespace lightcone {

ImmersionChart dual_chart(const ImmersionChart& chart, double pd_tol) {
  const double h = chart.fd_step();
  const double base_reach =
      chart.backend() == JetBackend::finite_difference ? fd::kStencilReach * h : 0.0;
  // q is differentiated by differences, so its domain keeps one stencil of margin.
  const Box domain = chart.domain().shrunk(fd::kStencilReach * h + base_reach);
  ImmersionChart::Evaluator q_of = [chart](const ParamPoint& y) -> AmbientVector {
    return dual_map(chart.value_unchecked(y), chart.tangents(y));
  };
  ImmersionChart dual("dual(" + chart.name() + ")", chart.n(), chart.ambient_dim(), domain, q_of, h);

  // Immersion/spacelike test on a small deterministic sample of the domain.
  std::vector<ParamPoint> samples{domain.center()};
  for (Eigen::Index i = 0; i < domain.dim(); ++i) {
    for (double u : {-0.5, 0.5}) {
      ParamPoint v = ParamPoint::Zero(domain.dim());
      v[i] = u;
      samples.push_back(domain.from_unit(v));
    }
  }
  for (const auto& x : samples) {
    try {
      validate_spacelike(dual, x, pd_tol);
    } catch (const SpacelikeViolation& e) {
      std::ostringstream os;
      os << "dual_chart: q of '" << chart.name() << "' is not a spacelike immersion at ("
         << x.transpose() << "): min eigenvalue " << e.min_eigenvalue();
      throw DualDegenerateError(os.str());
    }
  }
  return dual;
}

}  // namespace lightcone
