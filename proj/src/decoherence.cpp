#include "cisim/decoherence.hpp"

#include <cmath>
#include <limits>

namespace cisim {

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::AirScattering: return "air";
    case SourceKind::BlackbodyScattering: return "bb_scatter";
    case SourceKind::BlackbodyEmitAbsorb: return "bb_emit_absorb";
    case SourceKind::Vibration: return "vibration";
    case SourceKind::Gravity: return "gravity";
    case SourceKind::Custom: return "custom";
  }
  return "custom";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PldSource from_gamma_lambda(SourceKind kind, Rate gamma, Length saturation) {
  PldSource s;
  s.kind = kind;
  s.gamma = gamma;
  s.saturation_length = saturation;
  s.lambda_loc = gamma / (saturation * saturation);
  return s;
}

PldSource from_localization(SourceKind kind, LocalizationRate lambda_loc, Length saturation) {
  PldSource s;
  s.kind = kind;
  s.lambda_loc = lambda_loc;
  s.saturation_length = saturation;
  s.gamma = lambda_loc * saturation * saturation;
  return s;
}

PldSource lw_only_source(SourceKind kind, LocalizationRate lambda_loc) {
  PldSource s;
  s.kind = kind;
  s.lambda_loc = lambda_loc;
  s.gamma = Rate{0.0};
  s.saturation_length = Length{kInf};
  s.long_wavelength_only = true;
  return s;
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

// k_B T / (hbar c), the inverse thermal photon length.
Quantity<Dimension{0, -1, 0, 0}> thermal_wavenumber(Temperature t) {
  const auto& k = codata2018;
  return k.boltzmann * t / (k.hbar * k.light_speed);
}

}  // namespace

PldSource PldSource::custom(Rate gamma, LocalizationRate lambda_loc) {
  if (gamma.si() < 0.0 || lambda_loc.si() < 0.0)
    throw DomainError("PldSource: gamma and Lambda must be non-negative");
  if (gamma.si() == 0.0) return lw_only_source(SourceKind::Custom, lambda_loc);
  PldSource s;
  s.kind = SourceKind::Custom;
  s.gamma = gamma;
  s.lambda_loc = lambda_loc;
  s.saturation_length = lambda_loc.si() > 0.0 ? sqrt(gamma / lambda_loc) : Length{kInf};
  return s;
}

void Environment::validate() const {
  require_positive(temperature.si(), "temperature");
  require_positive(gas_mass.si(), "gas mass");
  if (!(pressure.si() >= 0.0)) throw DomainError("pressure must be non-negative");
  if (!(vibration_psd.si() >= 0.0)) throw DomainError("vibration psd must be non-negative");
  if (!std::isfinite(chi_real) || !std::isfinite(chi_imag))
    throw DomainError("chi_real and chi_imag must be finite");
}

Rate decoherence_function(const PldSource& source, Length x) {
  const double l2 = source.lambda_loc.si() * x.si() * x.si();
  if (source.gamma.si() == 0.0) return Rate{l2};
  const double g = source.gamma.si();
  return Rate{-g * std::expm1(-l2 / g)};
}

Velocity mean_gas_speed(const Environment& env) {
  return sqrt(8.0 * codata2018.boltzmann * env.temperature / (kPi * env.gas_mass));
}

PldSource air_scattering(const Environment& env, Length radius) {
  env.validate();
  require_positive(radius.si(), "radius");
  const auto& k = codata2018;
  const Length wavelength =
      2.0 * kPi * k.hbar / sqrt(2.0 * kPi * env.gas_mass * k.boltzmann * env.temperature);
  const Rate gamma = kAirRateGeometricFactor * 16.0 * kPi * std::sqrt(2.0 * kPi) * env.pressure *
                     radius * radius / (mean_gas_speed(env) * env.gas_mass);
  return from_gamma_lambda(SourceKind::AirScattering, gamma, wavelength);
}

Length thermal_photon_wavelength(Temperature t) {
  require_positive(t.si(), "temperature");
  return std::pow(kPi, 2.0 / 3.0) / thermal_wavenumber(t);
}

PldSource blackbody_scattering(const Environment& env, Length radius) {
  env.validate();
  require_positive(radius.si(), "radius");
  const double x = thermal_wavenumber(env.temperature).si();
  const double r = radius.si();
  const LocalizationRate lambda_loc{kBlackbodyScatteringPrefactor * codata2018.light_speed.si() *
                                    std::pow(r, 6) * std::pow(x, 9) * env.chi_real * env.chi_real /
                                    (9.0 * kPi)};
  return from_localization(SourceKind::BlackbodyScattering, lambda_loc,
                           thermal_photon_wavelength(env.temperature));
}

PldSource blackbody_emit_absorb(const Environment& env, Length radius) {
  env.validate();
  require_positive(radius.si(), "radius");
  if (env.chi_imag < 0.0) throw DomainError("chi_imag must be non-negative");
  const double x = thermal_wavenumber(env.temperature).si();
  const double r = radius.si();
  const LocalizationRate lambda_loc{16.0 * std::pow(kPi, 5) * codata2018.light_speed.si() *
                                    r * r * r * std::pow(x, 6) * env.chi_imag / 189.0};
  return from_localization(SourceKind::BlackbodyEmitAbsorb, lambda_loc,
                           thermal_photon_wavelength(env.temperature));
}

PldSource vibration_source(Mass mass, Rate frequency, Psd psd) {
  if (mass.si() < 0.0 || frequency.si() < 0.0 || psd.si() < 0.0)
    throw DomainError("vibration_source: inputs must be non-negative");
  const auto hbar = codata2018.hbar;
  const auto w2 = frequency * frequency;
  return lw_only_source(SourceKind::Vibration, mass * mass * w2 * w2 * psd / (2.0 * hbar * hbar));
}

PldSource gravity_source(Mass mass, Length radius) {
  require_positive(mass.si(), "mass");
  require_positive(radius.si(), "radius");
  const auto& k = codata2018;
  const LocalizationRate lambda_loc =
      k.gravitational_constant * mass * mass / (2.0 * k.hbar * radius * radius * radius);
  return from_localization(SourceKind::Gravity, lambda_loc, radius);
}

EffectivePld combine(std::span<const PldSource> sources, Length coherence_scale) {
  if (!(coherence_scale.si() > 0.0)) throw DomainError("combine: coherence scale must be positive");
  EffectivePld out;
  for (const auto& s : sources) {
    SourceClassification c{s.kind, Regime::LongWavelength, 0.0, false};
    if (!s.long_wavelength_only) {
      c.scale_ratio = coherence_scale / s.saturation_length;
      c.borderline = c.scale_ratio >= 0.1 && c.scale_ratio <= 10.0;
      if (c.scale_ratio >= 1.0) c.regime = Regime::ShortWavelength;
    }
    if (c.regime == Regime::ShortWavelength)
      out.gamma += s.gamma;
    else
      out.lambda_loc += s.lambda_loc;
    out.report.push_back(c);
  }
  return out;
}

}  // namespace cisim
