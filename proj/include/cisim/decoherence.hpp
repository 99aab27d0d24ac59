#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "cisim/quantities.hpp"

namespace cisim {

enum class SourceKind { AirScattering, BlackbodyScattering, BlackbodyEmitAbsorb, Vibration, Gravity, Custom };

std::string_view to_string(SourceKind kind);

/// Position-localization decoherence source, Gamma(x) = gamma (1 - exp(-Lambda x^2 / gamma)).
///
/// saturation_length is sqrt(gamma / Lambda) whenever both are positive. A
/// purely long-wavelength source (gamma = 0, e.g. vibrations) has no finite
/// saturation length and reports `long_wavelength_only`.
struct PldSource {
  SourceKind kind = SourceKind::Custom;
  Rate gamma{0.0};
  LocalizationRate lambda_loc{0.0};
  Length saturation_length{0.0};
  bool long_wavelength_only = false;

  /// Builds a custom source from (gamma, Lambda); gamma = 0 means LW-only.
  static PldSource custom(Rate gamma, LocalizationRate lambda_loc);
};

struct Environment {
  Temperature temperature{1.0};
  Pressure pressure{0.0};
  Mass gas_mass = 28.97 * units::amu;
  double chi_real = 1.0;
  double chi_imag = 1.0;
  Psd vibration_psd{0.0};

  void validate() const;
};

/// Decoherence rate for a superposition of separation x.
Rate decoherence_function(const PldSource& source, Length x);

PldSource air_scattering(const Environment& env, Length radius);
PldSource blackbody_scattering(const Environment& env, Length radius);
PldSource blackbody_emit_absorb(const Environment& env, Length radius);
PldSource vibration_source(Mass mass, Rate frequency, Psd psd);
PldSource gravity_source(Mass mass, Length radius);

/// Thermal wavelength shared by the black-body sources, pi^(2/3) hbar c / (k_B T).
Length thermal_photon_wavelength(Temperature t);

/// Maxwell-Boltzmann mean speed of the residual gas.
Velocity mean_gas_speed(const Environment& env);

enum class Regime { ShortWavelength, LongWavelength };

struct SourceClassification {
  SourceKind kind;
  Regime regime;
  double scale_ratio;  // coherence scale / saturation length (0 for LW-only)
  bool borderline;     // ratio within [0.1, 10]
};

struct EffectivePld {
  Rate gamma{0.0};                  // summed over SW sources
  LocalizationRate lambda_loc{0.0};  // summed over LW sources
  std::vector<SourceClassification> report;
};

/// Splits sources at the coherence scale: xi >= lambda is SW, otherwise LW.
EffectivePld combine(std::span<const PldSource> sources, Length coherence_scale);

// 8! * 8 * zeta(9), the black-body scattering prefactor.
inline constexpr double kBlackbodyScatteringPrefactor = 40320.0 * 8.0 * 1.0020083928260822;
// Geometric factor of the air-molecule scattering rate, 1/sqrt(3).
inline constexpr double kAirRateGeometricFactor = 0.57735026918962576451;

}  // namespace cisim
