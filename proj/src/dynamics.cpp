#include "cisim/dynamics.hpp"

#include "series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cisim {

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Free: return "free";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::Inverted: return "inverted";
  }
  return "free";
}

namespace {

using detail::sinh_minus_x;
using detail::x_minus_sin;

void check_cap(const PotentialSegment& seg, double cap) {
  if (seg.kind != PotentialKind::Inverted) return;
  const double wt = seg.omega.si() * seg.duration.si();
  if (wt > cap) {
    std::ostringstream os;
    os << "inverted segment with omega*t = " << wt << " exceeds cap " << cap;
    throw OverflowGuardError(os.str());
  }
}

struct SegmentKernel {
  PhaseSpaceMap map;
  NoiseCovariance noise;
  double noise_det = 0.0;  // det of the added covariance, cancellation-free
};

SegmentKernel kernel(const PotentialSegment& seg, Mass mass) {
  const double M = mass.si();
  const double t = seg.duration.si();
  const double hbar = codata2018.hbar.si();
  const double D = 2.0 * hbar * hbar * seg.lw_lambda.si();  // d v_p / dt from diffusion
  SegmentKernel k;
  switch (seg.kind) {
    case PotentialKind::Free: {
      k.map = {1.0, t / M, 0.0, 1.0};
      k.noise = {D * t * t * t / (3.0 * M * M), D * t * t / (2.0 * M), D * t};
      k.noise_det = D * D * t * t * t * t / (12.0 * M * M);
      break;
    }
    case PotentialKind::Harmonic: {
      const double w = seg.omega.si(), u = w * t;
      const double su = std::sin(u), cu = std::cos(u);
      k.map = {cu, su / (M * w), -M * w * su, cu};
      const double i_ss = x_minus_sin(2.0 * u) / (4.0 * w);
      const double i_cc = (2.0 * u + std::sin(2.0 * u)) / (4.0 * w);
      const double i_sc = su * su / (2.0 * w);
      k.noise = {D * i_ss / (M * M * w * w), D * i_sc / (M * w), D * i_cc};
      k.noise_det = D * D * x_minus_sin(u) * (u + su) / (4.0 * M * M * w * w * w * w);
      break;
    }
    case PotentialKind::Inverted: {
      const double w = seg.omega.si(), u = w * t;
      const double su = std::sinh(u), cu = std::cosh(u);
      k.map = {cu, su / (M * w), M * w * su, cu};
      const double i_ss = sinh_minus_x(2.0 * u) / (4.0 * w);
      const double i_cc = (std::sinh(2.0 * u) + 2.0 * u) / (4.0 * w);
      const double i_sc = su * su / (2.0 * w);
      k.noise = {D * i_ss / (M * M * w * w), D * i_sc / (M * w), D * i_cc};
      k.noise_det = D * D * sinh_minus_x(u) * (su + u) / (4.0 * M * M * w * w * w * w);
      break;
    }
  }
  return k;
}

NoiseCovariance transport(const NoiseCovariance& q, const PhaseSpaceMap& s) {
  // S Q S^T
  const double a = s.x_x, b = s.x_p, c = s.p_x, d = s.p_p;
  return {a * a * q.xx + 2.0 * a * b * q.xp + b * b * q.pp,
          a * c * q.xx + (a * d + b * c) * q.xp + b * d * q.pp,
          c * c * q.xx + 2.0 * c * d * q.xp + d * d * q.pp};
}

}  // namespace

PotentialSegment PotentialSegment::free(Time duration, LocalizationRate lw, Rate sw) {
  PotentialSegment s{PotentialKind::Free, Rate{0.0}, duration, lw, sw};
  s.validate();
  return s;
}

PotentialSegment PotentialSegment::harmonic(Rate omega, Time duration, LocalizationRate lw, Rate sw) {
  PotentialSegment s{PotentialKind::Harmonic, omega, duration, lw, sw};
  s.validate();
  return s;
}

PotentialSegment PotentialSegment::inverted(Rate omega, Time duration, LocalizationRate lw, Rate sw) {
  PotentialSegment s{PotentialKind::Inverted, omega, duration, lw, sw};
  s.validate();
  return s;
}

void PotentialSegment::validate() const {
  if (!(duration.si() >= 0.0) || !std::isfinite(duration.si()))
    throw DomainError("segment duration must be finite and non-negative");
  if (kind != PotentialKind::Free && !(omega.si() > 0.0 && std::isfinite(omega.si())))
    throw DomainError("harmonic and inverted segments need omega > 0");
  if (!(lw_lambda.si() >= 0.0) || !(sw_gamma.si() >= 0.0))
    throw DomainError("segment decoherence parameters must be non-negative");
}

PhaseSpaceMap PhaseSpaceMap::then(const PhaseSpaceMap& n) const {
  return {n.x_x * x_x + n.x_p * p_x, n.x_x * x_p + n.x_p * p_p,
          n.p_x * x_x + n.p_p * p_x, n.p_x * x_p + n.p_p * p_p};
}

PhaseSpaceMap PhaseSpaceMap::inverse() const {
  const double det = determinant();
  return {p_p / det, -x_p / det, -p_x / det, x_x / det};
}

Length Evolution::blur_scale() const { return Length{std::sqrt(2.0 * noise.xx)}; }

double Evolution::sw_decay() const { return std::exp(-sw_exponent); }

Evolution segment_evolution(const PotentialSegment& seg, Mass mass, double cap_omega_t) {
  seg.validate();
  check_cap(seg, cap_omega_t);
  if (!(mass.si() > 0.0)) throw DomainError("segment_evolution: mass must be positive");
  const auto k = kernel(seg, mass);
  return {k.map, k.noise, seg.duration, seg.sw_gamma.si() * seg.duration.si()};
}

Evolution compose(std::span<const PotentialSegment> segments, Mass mass, double cap_omega_t) {
  Evolution total;
  for (const auto& seg : segments) {
    const auto e = segment_evolution(seg, mass, cap_omega_t);
    const auto carried = transport(total.noise, e.map);
    total.map = total.map.then(e.map);
    total.noise = {carried.xx + e.noise.xx, carried.xp + e.noise.xp, carried.pp + e.noise.pp};
    total.elapsed += e.elapsed;
    total.sw_exponent += e.sw_exponent;
  }
  return total;
}

GaussianState propagate_segment(const GaussianState& s, const PotentialSegment& seg, double cap_omega_t) {
  seg.validate();
  check_cap(seg, cap_omega_t);
  const auto k = kernel(seg, s.mass());
  const NoiseCovariance moments =
      transport({s.v_x().si(), s.c().si(), s.v_p().si()}, k.map);
  const double vx = moments.xx + k.noise.xx;
  const double c = moments.xp + k.noise.xp;
  const double vp = moments.pp + k.noise.pp;

  // det(S Sigma S^T + Q) = det Sigma + tr(adj(Sigma) Q~) + det Q, with Q~ = S^-1 Q S^-T
  // the diffusion pulled back to the segment start (Q with its x-p entry negated).
  const double cross = s.v_p().si() * k.noise.xx + s.v_x().si() * k.noise.pp + 2.0 * s.c().si() * k.noise.xp;
  const double det = s.uncertainty_product().si() + std::max(cross, 0.0) + k.noise_det;

  try {
    return GaussianState::from_moments(s.mass(), Area{vx}, MomentumSq{vp}, Action{c}, ActionSq{det});
  } catch (const DomainError& e) {
    throw ConsistencyError(std::string("propagate_segment produced an invalid state: ") + e.what());
  }
}

GaussianState propagate(const GaussianState& s, std::span<const PotentialSegment> segments, double cap_omega_t) {
  GaussianState out = s;
  for (const auto& seg : segments) out = propagate_segment(out, seg, cap_omega_t);
  return out;
}

CiGain ci_gain(Rate omega0, Rate omega_inverted, Time t_inflate, double cap_omega_t) {
  if (!(omega0.si() > 0.0) || !(omega_inverted.si() > 0.0))
    throw DomainError("ci_gain: frequencies must be positive");
  if (!(t_inflate.si() >= 0.0)) throw DomainError("ci_gain: inflation time must be non-negative");

  const double w0 = omega0.si(), wi = omega_inverted.si();
  const double prefactor = (wi * wi + w0 * w0) / (2.0 * wi * w0);
  const double sh = std::sinh(2.0 * t_inflate.si() * wi);
  CiGain out;
  out.g = std::sqrt(1.0 + prefactor * prefactor * sh * sh);

  // g_x and g_p from the propagated ground state; the gain is mass independent.
  const Mass unit_mass{1.0};
  const auto ground = ground_state(unit_mass, omega0);
  const auto after =
      propagate_segment(ground, PotentialSegment::inverted(omega_inverted, t_inflate), cap_omega_t);
  out.g_x = std::sqrt(after.v_x() / ground.v_x());
  out.g_p = std::sqrt(after.v_p() / ground.v_p());
  if (std::fabs(out.g - out.g_x * out.g_p) > 1e-9 * out.g) {
    std::ostringstream os;
    os.precision(17);
    os << "ci_gain: g = " << out.g << " disagrees with g_x g_p = " << out.g_x * out.g_p;
    throw ConsistencyError(os.str());
  }
  return out;
}

GaussianState inflated_state(const GaussianState& ground, const CiGain& gain) {
  const auto hbar = codata2018.hbar;
  const double g2 = gain.g_x * gain.g_x * gain.g_p * gain.g_p;
  return GaussianState::from_moments(ground.mass(), gain.g_x * gain.g_x * ground.v_x(),
                                     gain.g_p * gain.g_p * ground.v_p(),
                                     0.5 * std::sqrt(std::max(g2 - 1.0, 0.0)) * hbar,
                                     ground.uncertainty_product());
}

CoherentGainBound max_coherent_gain(Mass mass, Rate omega0, Rate omega_inverted,
                                    LocalizationRate lambda_inflation) {
  if (!(mass.si() > 0.0) || !(omega0.si() > 0.0) || !(omega_inverted.si() > 0.0) ||
      lambda_inflation.si() < 0.0)
    throw DomainError("max_coherent_gain: inputs must be positive");
  CoherentGainBound out;
  if (lambda_inflation.si() == 0.0) {
    out.unbounded = true;
    out.g_star = std::numeric_limits<double>::infinity();
    out.t_inflate_at_bound = Time{std::numeric_limits<double>::infinity()};
    return out;
  }
  const auto hbar = codata2018.hbar;
  const auto wi = omega_inverted, w0 = omega0;
  out.g_star = wi * wi * mass / (2.0 * hbar * lambda_inflation);
  const double sinh_bound = mass * wi * wi * wi * w0 / (hbar * lambda_inflation * (wi * wi + w0 * w0));
  out.t_inflate_at_bound = std::asinh(sinh_bound) / (2.0 * wi);
  return out;
}

Time rotation_time(Rate omega_inverted) {
  if (!(omega_inverted.si() > 0.0)) throw DomainError("rotation_time: omega must be positive");
  return (kPi / 4.0) / omega_inverted;
}

std::vector<PotentialSegment> momentum_mapping_segments(Rate omega_inverted, Time inverted_duration,
                                                        LocalizationRate lw, Rate sw) {
  return {PotentialSegment::harmonic(omega_inverted, rotation_time(omega_inverted), lw, sw),
          PotentialSegment::inverted(omega_inverted, inverted_duration, lw, sw)};
}

ReducedUnits ReducedUnits::of_ground_state(const GaussianState& ground) {
  const Length x0 = sqrt(ground.v_x());
  const Rate w0 = codata2018.hbar / (2.0 * ground.mass() * ground.v_x());
  return {ground.mass(), x0, w0};
}

}  // namespace cisim
