#pragma once

#include "cisim/quantities.hpp"

namespace cisim {

/// Relative slack on the Heisenberg bound v_x v_p - c^2 >= hbar^2/4.
inline constexpr double kHeisenbergSlack = 1e-9;

/// Zero-mean Gaussian center-of-mass state described by its second moments
/// v_x = <x^2>, v_p = <p^2> and c = <xp + px>/2.
///
/// The uncertainty product v_x v_p - c^2 is carried alongside the moments.
/// For strongly stretched states (large inflation gains) recomputing it from
/// the moments cancels catastrophically, so propagation updates it from the
/// added noise directly and the stored value is authoritative.
class GaussianState {
 public:
  /// Validates positivity and the Heisenberg bound; DomainError otherwise.
  static GaussianState from_moments(Mass mass, Area v_x, MomentumSq v_p, Action c);

  /// Used by propagation, which supplies an accurately tracked product.
  static GaussianState from_moments(Mass mass, Area v_x, MomentumSq v_p, Action c,
                                    ActionSq uncertainty_product);

  Mass mass() const { return mass_; }
  Area v_x() const { return v_x_; }
  MomentumSq v_p() const { return v_p_; }
  Action c() const { return c_; }
  ActionSq uncertainty_product() const { return det_; }

 private:
  GaussianState(Mass m, Area vx, MomentumSq vp, Action c, ActionSq det)
      : mass_(m), v_x_(vx), v_p_(vp), c_(c), det_(det) {}

  Mass mass_;
  Area v_x_;
  MomentumSq v_p_;
  Action c_;
  ActionSq det_;
};

struct StateDiagnostics {
  double purity;
  Length coherence_length;
  Length position_stdev;
};

/// Ground state of the trap V = M w0^2 x^2 / 2.
GaussianState ground_state(Mass mass, Rate trap_frequency);

StateDiagnostics diagnostics(const GaussianState& s);

double purity(const GaussianState& s);
Length coherence_length(const GaussianState& s);

/// Linear growth speed of the coherence length in free flight, sqrt(8 v_p)/M.
Velocity coherence_speed(const GaussianState& s);

}  // namespace cisim
