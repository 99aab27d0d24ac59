#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cisim/decoherence.hpp"
#include "cisim/dynamics.hpp"
#include "cisim/feasibility.hpp"
#include "cisim/interferometry.hpp"

namespace cisim {

struct SourceToggles {
  bool air = true;
  bool bb_scatter = true;
  bool bb_emit_absorb = true;
  bool vibration = true;  // only in the potential steps 2, 5 and 6
  bool gravity = false;   // Lambda_G added to every dynamic step
};

/// Seven-step interferometer: cool, inflate, free expansion, slit, rotate,
/// map momentum to position, free drift to detection.
struct ProtocolPlan {
  Sphere sphere;
  Rate omega0{2.0 * kPi * 1e5};
  Rate omega_inverted{2.0 * kPi * 50.0};
  Time t_inflate{0.0};
  Time free_time{0.0};
  Length slit_separation{1e-6};
  std::optional<Length> slit_width;
  std::optional<Time> rotation_override;  // t_R other than pi/(4 w_I) is flagged nonstandard
  std::optional<Time> mapping_duration;   // step 6; defaults to the detectable-fringe time
  Length detectable_fringe{100e-9};
  Time detection_drift{0.0};  // step 7
  std::optional<Velocity> traverse_speed;  // bookkeeping only
  Environment env;
  SourceToggles sources;
  double cap_omega_t = kDefaultOmegaTCap;
  GridSpec grid;

  void validate() const;
};

/// Decoherence active in the protocol steps, classified at the slit separation.
struct StepRates {
  Rate gamma{0.0};                  // SW, environmental
  LocalizationRate lw{0.0};         // LW environmental (+ gravity), every step
  LocalizationRate vibration{0.0};  // potential steps only
};

StepRates step_rates(const ProtocolPlan& plan);

struct StepRecord {
  int step = 0;
  std::string name;
  PotentialKind potential = PotentialKind::Free;
  Time duration{0.0};
  Time elapsed{0.0};
  Rate gamma_eff{0.0};
  LocalizationRate lambda_eff{0.0};
  double sw_factor = 1.0;  // accumulated exp(-integral gamma dt)
  // Gaussian stages (steps 1-3).
  std::optional<GaussianState> state;
  std::optional<double> purity;
  std::optional<Length> coherence_length;  // includes sw_factor
  // Cat stages (steps 4-7).
  std::optional<Length> fringe_separation;
  std::optional<Length> blur_scale;
};

struct ProtocolVerdicts {
  bool slit_feasible = false;        // d <= xi at the slit
  bool rotation_nonstandard = false;
  bool mapping_capped = false;       // default step-6 duration hit the w_I t cap
  bool slit_wide_warning = false;    // sigma > d/4
};

struct ProtocolTrace {
  std::vector<StepRecord> steps;
  CatState cat;
  Evolution post_slit;
  FringePattern pattern;
  double final_visibility = 0.0;
  Length slit_coherence_length{0.0};
  ProtocolVerdicts verdicts;
};

ProtocolTrace run_protocol(const ProtocolPlan& plan);

/// Default step-6 duration: x_f of the exact mapping reaches `target`,
/// t = ln(sqrt(2) M w d target / (2 pi hbar)) / w, clamped to [0, cap / w].
Time mapping_duration_for_fringe(Mass mass, Length separation, Rate omega, Length target, double cap_omega_t,
                                 bool* capped = nullptr);

struct TimelinePoint {
  Time t{0.0};
  Length xi{0.0};  // with SW bookkeeping
  double purity = 1.0;
  double reduced_time = 0.0;
  double reduced_xi = 0.0;
};

/// xi(t) over steps 1-3 of the plan; linear or logarithmic spacing in t.
std::vector<TimelinePoint> coherence_timeline(const ProtocolPlan& plan, std::size_t n_samples,
                                              bool log_spacing = false);

/// Free expansion of `initial` under (Lambda, gamma) sampled at `times`.
std::vector<TimelinePoint> free_coherence_curve(const GaussianState& initial, const ReducedUnits& units,
                                                LocalizationRate lambda_loc, Rate gamma,
                                                std::span<const Time> times);

}  // namespace cisim
