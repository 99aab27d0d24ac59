#include "cisim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cisim {

namespace {

StepRecord gaussian_record(int step, std::string name, const PotentialSegment& seg, const GaussianState& s,
                           Time elapsed, double sw_factor) {
  StepRecord r;
  r.step = step;
  r.name = std::move(name);
  r.potential = seg.kind;
  r.duration = seg.duration;
  r.elapsed = elapsed;
  r.gamma_eff = seg.sw_gamma;
  r.lambda_eff = seg.lw_lambda;
  r.sw_factor = sw_factor;
  r.state = s;
  r.purity = purity(s);
  r.coherence_length = coherence_length(s) * sw_factor;
  return r;
}

}  // namespace

StepRates step_rates(const ProtocolPlan& plan) {
  const Mass M = plan.sphere.mass();
  const Length R = plan.sphere.radius;
  std::vector<PldSource> env_sources;
  if (plan.sources.air) env_sources.push_back(air_scattering(plan.env, R));
  if (plan.sources.bb_scatter) env_sources.push_back(blackbody_scattering(plan.env, R));
  if (plan.sources.bb_emit_absorb) env_sources.push_back(blackbody_emit_absorb(plan.env, R));
  const auto eff = combine(env_sources, plan.slit_separation);
  StepRates r{eff.gamma, eff.lambda_loc, LocalizationRate{0.0}};
  if (plan.sources.gravity) r.lw += gravity_source(M, R).lambda_loc;
  if (plan.sources.vibration)
    r.vibration = vibration_source(M, plan.omega_inverted, plan.env.vibration_psd).lambda_loc;
  return r;
}

void ProtocolPlan::validate() const {
  if (!(sphere.radius.si() > 0.0) || !(sphere.density.si() > 0.0))
    throw DomainError("plan: sphere radius and density must be positive");
  if (!(omega0.si() > 0.0) || !(omega_inverted.si() > 0.0))
    throw DomainError("plan: trap and inflator frequencies must be positive");
  for (const Time t : {t_inflate, free_time, detection_drift})
    if (!(t.si() >= 0.0) || !std::isfinite(t.si())) throw DomainError("plan: durations must be non-negative");
  if (mapping_duration && !(mapping_duration->si() >= 0.0))
    throw DomainError("plan: mapping duration must be non-negative");
  if (rotation_override && !(rotation_override->si() >= 0.0))
    throw DomainError("plan: rotation time must be non-negative");
  if (!(slit_separation.si() > 0.0)) throw DomainError("plan: slit separation must be positive");
  if (!(detectable_fringe.si() > 0.0)) throw DomainError("plan: detectable fringe size must be positive");
  if (!(cap_omega_t > 0.0)) throw DomainError("plan: omega*t cap must be positive");
  env.validate();
}

Time mapping_duration_for_fringe(Mass mass, Length separation, Rate omega, Length target, double cap_omega_t,
                                 bool* capped) {
  const double arg = std::sqrt(2.0) * mass * omega * separation * target / (2.0 * kPi * codata2018.hbar);
  double wt = arg > 1.0 ? std::log(arg) : 0.0;
  const bool hit = wt > cap_omega_t;
  if (hit) wt = cap_omega_t;
  if (capped) *capped = hit;
  return wt / omega;
}

ProtocolTrace run_protocol(const ProtocolPlan& plan) {
  plan.validate();
  const Mass M = plan.sphere.mass();
  const Rate wi = plan.omega_inverted;
  const auto rates = step_rates(plan);
  const double cap = plan.cap_omega_t;

  ProtocolTrace trace;
  Time elapsed{0.0};
  double sw_exponent = 0.0;

  // 1: ground state of the trap.
  auto state = ground_state(M, plan.omega0);
  trace.steps.push_back(gaussian_record(1, "cool", PotentialSegment::harmonic(plan.omega0, Time{0.0}, rates.lw,
                                                                              rates.gamma),
                                        state, elapsed, 1.0));

  // 2: coherent inflation; 3: free expansion.
  const auto inflate = PotentialSegment::inverted(wi, plan.t_inflate, rates.lw + rates.vibration, rates.gamma);
  state = propagate_segment(state, inflate, cap);
  elapsed += inflate.duration;
  sw_exponent += inflate.sw_gamma.si() * inflate.duration.si();
  trace.steps.push_back(gaussian_record(2, "inflate", inflate, state, elapsed, std::exp(-sw_exponent)));

  const auto expand = PotentialSegment::free(plan.free_time, rates.lw, rates.gamma);
  state = propagate_segment(state, expand, cap);
  elapsed += expand.duration;
  sw_exponent += expand.sw_gamma.si() * expand.duration.si();
  trace.steps.push_back(gaussian_record(3, "free", expand, state, elapsed, std::exp(-sw_exponent)));

  // 4: instantaneous coherent slit.
  trace.slit_coherence_length = *trace.steps.back().coherence_length;
  trace.verdicts.slit_feasible = plan.slit_separation <= trace.slit_coherence_length;
  trace.cat = CatState::make(M, plan.slit_separation, plan.slit_width);
  trace.verdicts.slit_wide_warning = trace.cat.wide_slit_warning();
  {
    StepRecord r;
    r.step = 4;
    r.name = "slit";
    r.elapsed = elapsed;
    r.fringe_separation = mapped_fringe_separation(trace.cat, PhaseSpaceMap{});
    r.blur_scale = Length{0.0};
    trace.steps.push_back(r);
  }

  // 5-7 act on the cat; the SW factor recorded from here on is the one damping its interference term.
  const Time t_rot = plan.rotation_override.value_or(rotation_time(wi));
  trace.verdicts.rotation_nonstandard =
      plan.rotation_override && std::fabs(t_rot.si() - rotation_time(wi).si()) > 1e-12 * rotation_time(wi).si();
  Time t_map{0.0};
  if (plan.mapping_duration) {
    t_map = *plan.mapping_duration;
  } else {
    t_map = mapping_duration_for_fringe(M, plan.slit_separation, wi, plan.detectable_fringe, cap,
                                        &trace.verdicts.mapping_capped);
  }
  const std::vector<std::pair<std::string, PotentialSegment>> post = {
      {"rotate", PotentialSegment::harmonic(wi, t_rot, rates.lw + rates.vibration, rates.gamma)},
      {"map", PotentialSegment::inverted(wi, t_map, rates.lw + rates.vibration, rates.gamma)},
      {"drift", PotentialSegment::free(plan.detection_drift, rates.lw, rates.gamma)}};
  std::vector<PotentialSegment> segments;
  int step = 5;
  for (const auto& [name, seg] : post) {
    segments.push_back(seg);
    const auto evo = compose(segments, M, cap);
    elapsed += seg.duration;
    StepRecord r;
    r.step = step++;
    r.name = name;
    r.potential = seg.kind;
    r.duration = seg.duration;
    r.elapsed = elapsed;
    r.gamma_eff = seg.sw_gamma;
    r.lambda_eff = seg.lw_lambda;
    r.sw_factor = evo.sw_decay();
    r.fringe_separation = mapped_fringe_separation(trace.cat, evo.map);
    r.blur_scale = evo.blur_scale();
    trace.steps.push_back(r);
    trace.post_slit = evo;
  }

  const auto kind = t_map.si() > 0.0 ? EvolutionKind::CiExpansion : EvolutionKind::FreeExpansion;
  const auto grid = resolved_grid(trace.cat, trace.post_slit, plan.grid);
  trace.pattern = synthesize_pattern(trace.cat, trace.post_slit, kind, grid);
  const double norm = trace.pattern.integral();
  if (!(norm >= 0.99 && norm <= 1.0 + 1e-6)) {
    std::ostringstream os;
    os << "final pattern integrates to " << norm;
    throw ConsistencyError(os.str());
  }
  trace.final_visibility = trace.pattern.visibility.value_or(0.0);
  return trace;
}

std::vector<TimelinePoint> free_coherence_curve(const GaussianState& initial, const ReducedUnits& units,
                                                LocalizationRate lambda_loc, Rate gamma,
                                                std::span<const Time> times) {
  std::vector<TimelinePoint> out;
  out.reserve(times.size());
  for (const Time t : times) {
    const auto s = propagate_segment(initial, PotentialSegment::free(t, lambda_loc));
    TimelinePoint p;
    p.t = t;
    p.purity = purity(s);
    p.xi = coherence_length(s) * std::exp(-gamma.si() * t.si());
    p.reduced_time = units.reduced_time(t);
    p.reduced_xi = units.reduced_length(p.xi);
    out.push_back(p);
  }
  return out;
}

std::vector<TimelinePoint> coherence_timeline(const ProtocolPlan& plan, std::size_t n_samples, bool log_spacing) {
  plan.validate();
  if (n_samples < 2) throw DomainError("coherence_timeline: need at least 2 samples");
  const Mass M = plan.sphere.mass();
  const auto rates = step_rates(plan);
  const auto ground = ground_state(M, plan.omega0);
  const auto units = ReducedUnits::of_ground_state(ground);
  const LocalizationRate lw_inflate = rates.lw + rates.vibration;
  const auto inflated = propagate_segment(
      ground, PotentialSegment::inverted(plan.omega_inverted, plan.t_inflate, lw_inflate), plan.cap_omega_t);

  const double t_end = plan.t_inflate.si() + plan.free_time.si();
  std::vector<TimelinePoint> out;
  out.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(n_samples - 1);
    const double t = log_spacing ? t_end * std::pow(1e-6, 1.0 - f) : t_end * f;
    const auto s = t <= plan.t_inflate.si()
                       ? propagate_segment(ground, PotentialSegment::inverted(plan.omega_inverted, Time{t}, lw_inflate),
                                           plan.cap_omega_t)
                       : propagate_segment(inflated, PotentialSegment::free(Time{t - plan.t_inflate.si()}, rates.lw));
    TimelinePoint p;
    p.t = Time{t};
    p.purity = purity(s);
    p.xi = coherence_length(s) * std::exp(-rates.gamma.si() * t);
    p.reduced_time = units.reduced_time(p.t);
    p.reduced_xi = units.reduced_length(p.xi);
    out.push_back(p);
  }
  return out;
}

}  // namespace cisim
