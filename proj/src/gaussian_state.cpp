#include "cisim/gaussian_state.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cisim {

namespace {

ActionSq heisenberg_floor() {
  const auto h = codata2018.hbar;
  return h * h / 4.0;
}

void check_bound(ActionSq det, const char* who) {
  const auto floor = heisenberg_floor();
  if (!(det.si() >= floor.si() * (1.0 - kHeisenbergSlack))) {
    std::ostringstream os;
    os << who << ": Heisenberg bound violated (v_x v_p - c^2 = " << det.si() << ", hbar^2/4 = "
       << floor.si() << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

GaussianState GaussianState::from_moments(Mass mass, Area v_x, MomentumSq v_p, Action c) {
  return from_moments(mass, v_x, v_p, c, v_x * v_p - c * c);
}

GaussianState GaussianState::from_moments(Mass mass, Area v_x, MomentumSq v_p, Action c,
                                          ActionSq uncertainty_product) {
  if (!(mass.si() > 0.0)) throw DomainError("GaussianState: mass must be positive");
  if (!(v_x.si() > 0.0) || !(v_p.si() > 0.0) || !std::isfinite(v_x.si()) ||
      !std::isfinite(v_p.si()) || !std::isfinite(c.si()))
    throw DomainError("GaussianState: v_x and v_p must be finite and positive");
  check_bound(uncertainty_product, "GaussianState");
  return GaussianState(mass, v_x, v_p, c, uncertainty_product);
}

GaussianState ground_state(Mass mass, Rate trap_frequency) {
  if (!(mass.si() > 0.0) || !(trap_frequency.si() > 0.0))
    throw DomainError("ground_state: mass and trap frequency must be positive");
  const auto hbar = codata2018.hbar;
  const Area v_x = hbar / (2.0 * mass * trap_frequency);
  const MomentumSq v_p = hbar * mass * trap_frequency / 2.0;
  return GaussianState::from_moments(mass, v_x, v_p, Action{0.0}, heisenberg_floor());
}

double purity(const GaussianState& s) {
  check_bound(s.uncertainty_product(), "purity");
  if (s.uncertainty_product() <= heisenberg_floor()) return 1.0;
  const double p = codata2018.hbar.si() / (2.0 * std::sqrt(s.uncertainty_product().si()));
  return std::min(p, 1.0);
}

Length coherence_length(const GaussianState& s) {
  return purity(s) * sqrt(8.0 * s.v_x());
}

StateDiagnostics diagnostics(const GaussianState& s) {
  const double p = purity(s);
  return {p, p * sqrt(8.0 * s.v_x()), sqrt(s.v_x())};
}

Velocity coherence_speed(const GaussianState& s) {
  return sqrt(8.0 * s.v_p()) / s.mass();
}

}  // namespace cisim
