#pragma once

#include <optional>
#include <vector>

#include "cisim/decoherence.hpp"
#include "cisim/dynamics.hpp"
#include "cisim/gaussian_state.hpp"
#include "cisim/quantities.hpp"

namespace cisim {

struct Sphere {
  Length radius{1e-6};
  Density density{8570.0};

  Mass mass() const { return sphere_mass(radius, density); }
};

struct LambdaTimescale {
  Time t_lambda{0.0};
  Length xi_at_t_lambda{0.0};  // sqrt(2 / (Lambda t_Lambda))
  bool infinite = false;       // Lambda = 0
};

/// Time of maximum free-expansion coherence, [3M / (2 hbar Lambda w0)]^(1/3).
LambdaTimescale t_lambda(Mass mass, Rate omega0, LocalizationRate lambda_loc);

struct CoherencePeak {
  Time time{0.0};
  Length xi{0.0};
};

/// Numerically located maximum of xi(t) for free expansion of `initial` under
/// LW diffusion Lambda. DomainError when Lambda = 0 (xi grows without bound).
CoherencePeak coherence_peak(const GaussianState& initial, LocalizationRate lambda_loc);

/// Coherence length after free expansion for time t (no SW factor).
Length free_coherence_length(const GaussianState& initial, LocalizationRate lambda_loc, Time t);

/// The standard environmental sources: air, black-body scattering, black-body emission/absorption.
std::vector<PldSource> environmental_sources(const Environment& env, const Sphere& sphere);

struct BudgetInputs {
  Sphere sphere;
  Rate omega0{2.0 * kPi * 1e5};
  Environment env;
  Rate omega_inverted{2.0 * kPi * 50.0};
  std::optional<Length> slit_separation;  // classification scale and fringe ceiling; R if absent
  std::optional<Time> t_inflate;          // inflation time for the inflated xi_star
  double margin = 10.0;
  bool include_gravity = false;
};

struct SourceTimescale {
  SourceKind kind;
  Regime regime;
  Rate gamma{0.0};
  LocalizationRate lambda_loc{0.0};
  Time t_lambda{0.0};  // infinite for SW sources and Lambda = 0
};

struct Budget {
  std::vector<SourceTimescale> sources;
  LocalizationRate lambda_total{0.0};  // LW sum
  Rate gamma_total{0.0};               // SW sum
  Time t_lambda_min{0.0};              // min over LW sources
  Time t_star{0.0};
  Length xi_star{0.0};
  // With the inflator configured: t_I used, gains, and the shortened peak.
  Time t_inflate{0.0};
  CiGain gain;
  Time t_star_inflated{0.0};
  Length xi_star_inflated{0.0};
  LocalizationRate lambda_vibration{0.0};
  double g_star = 0.0;
  double g_p_star = 0.0;
  Psd s_xx_max_inflation{0.0};
  Psd s_xx_max_fringes{0.0};
};

Budget budget(const BudgetInputs& in);

struct FalsificationInputs {
  Sphere sphere;
  Rate omega0{2.0 * kPi * 1e5};
  Environment env;
  std::optional<Length> scale;        // classification scale; R if absent
  Rate omega_inverted{2.0 * kPi * 50.0};
  Time t_inflate{0.0};                // optional inflation before the free expansion
  std::optional<Time> pre_slit_time;  // free-expansion time at which both lengths are compared
  double margin = 10.0;
  /// Replaces Lambda_G (e.g. 0 to check the degenerate window).
  std::optional<LocalizationRate> gravity_lambda;
};

struct FalsificationWindow {
  Length xi_with_gravity{0.0};
  Length xi_without_gravity{0.0};
  Length d_low{0.0};
  Length d_high{0.0};
  Time evaluated_at{0.0};
  double ratio = 1.0;  // d_high / d_low
  bool conclusive = false;
};

FalsificationWindow falsification_window(const FalsificationInputs& in);

}  // namespace cisim
