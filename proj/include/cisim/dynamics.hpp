#pragma once

#include <span>
#include <vector>

#include "cisim/gaussian_state.hpp"
#include "cisim/quantities.hpp"

namespace cisim {

enum class PotentialKind { Free, Harmonic, Inverted };

std::string_view to_string(PotentialKind kind);

/// Default cap on omega * t for inverted segments; e^(omega t) overflows near 700.
inline constexpr double kDefaultOmegaTCap = 30.0;

/// One stage of piecewise-quadratic dynamics, V = +/- M omega^2 x^2 / 2 or V = 0,
/// with long-wavelength diffusion lw_lambda and short-wavelength rate sw_gamma
/// active for its whole duration.
struct PotentialSegment {
  PotentialKind kind = PotentialKind::Free;
  Rate omega{0.0};
  Time duration{0.0};
  LocalizationRate lw_lambda{0.0};
  Rate sw_gamma{0.0};

  static PotentialSegment free(Time duration, LocalizationRate lw = {}, Rate sw = {});
  static PotentialSegment harmonic(Rate omega, Time duration, LocalizationRate lw = {}, Rate sw = {});
  static PotentialSegment inverted(Rate omega, Time duration, LocalizationRate lw = {}, Rate sw = {});

  void validate() const;
};

/// Linear phase-space map (x, p) -> (x_x x + x_p p, p_x x + p_p p) in SI units.
struct PhaseSpaceMap {
  double x_x = 1.0;
  double x_p = 0.0;
  double p_x = 0.0;
  double p_p = 1.0;

  double determinant() const { return x_x * p_p - x_p * p_x; }
  /// The map obtained by applying *this first, then `next`.
  PhaseSpaceMap then(const PhaseSpaceMap& next) const;
  PhaseSpaceMap inverse() const;
};

/// Phase-space covariance added by momentum diffusion (SI units).
struct NoiseCovariance {
  double xx = 0.0;
  double xp = 0.0;
  double pp = 0.0;
};

/// Net effect of a sequence of segments on any input state.
struct Evolution {
  PhaseSpaceMap map;
  NoiseCovariance noise;
  Time elapsed{0.0};
  double sw_exponent = 0.0;  // integral of gamma dt

  /// Position variance added by diffusion; equals sigma_blur^2 / 2.
  Area added_position_variance() const { return Area{noise.xx}; }
  Length blur_scale() const;
  double sw_decay() const;
};

Evolution segment_evolution(const PotentialSegment& seg, Mass mass,
                            double cap_omega_t = kDefaultOmegaTCap);
Evolution compose(std::span<const PotentialSegment> segments, Mass mass,
                  double cap_omega_t = kDefaultOmegaTCap);

/// Closed-form solution of the moment equations of the LW master equation:
///   dv_x/dt = 2c/M,  dc/dt = v_p/M - s M w^2 v_x,  dv_p/dt = -2 s M w^2 c + 2 hbar^2 Lambda
/// with s = +1 (harmonic), -1 (inverted), 0 (free).
GaussianState propagate_segment(const GaussianState& s, const PotentialSegment& seg,
                                double cap_omega_t = kDefaultOmegaTCap);
GaussianState propagate(const GaussianState& s, std::span<const PotentialSegment> segments,
                        double cap_omega_t = kDefaultOmegaTCap);

struct CiGain {
  double g = 1.0;
  double g_x = 1.0;
  double g_p = 1.0;
};

/// Inflation gain of the trap ground state after t_I in the inverted potential.
CiGain ci_gain(Rate omega0, Rate omega_inverted, Time t_inflate,
               double cap_omega_t = kDefaultOmegaTCap);

/// Pure state with v_x = g_x^2 v_x(0), v_p = g_p^2 v_p(0), 2c = hbar sqrt(g^2 - 1).
GaussianState inflated_state(const GaussianState& ground, const CiGain& gain);

struct CoherentGainBound {
  double g_star = 0.0;
  Time t_inflate_at_bound{0.0};  // where sinh(2 t w_I) reaches the purity bound
  bool unbounded = false;
};

CoherentGainBound max_coherent_gain(Mass mass, Rate omega0, Rate omega_inverted,
                                    LocalizationRate lambda_inflation);

Time rotation_time(Rate omega_inverted);

/// Quarter-of-a-quarter rotation in the harmonic trap followed by the
/// inverted potential; maps p(t0) onto x(t) ~ e^(w t) p(t0) / (sqrt(2) M w).
std::vector<PotentialSegment> momentum_mapping_segments(Rate omega_inverted, Time inverted_duration,
                                                        LocalizationRate lw = {}, Rate sw = {});

/// Axes of the coherence-length plot: x0 = sqrt(v_x(0)), 1/w0 = 2 M v_x(0) / hbar.
struct ReducedUnits {
  Mass mass;
  Length x0;
  Rate omega0;

  static ReducedUnits of_ground_state(const GaussianState& ground);
  double reduced_time(Time t) const { return t * omega0; }
  Time time(double reduced) const { return reduced / omega0; }
  double reduced_length(Length l) const { return l / x0; }
  double reduced_lambda(LocalizationRate l) const { return l * x0 * x0 / omega0; }
  LocalizationRate lambda(double reduced) const { return reduced * omega0 / (x0 * x0); }
};

}  // namespace cisim
