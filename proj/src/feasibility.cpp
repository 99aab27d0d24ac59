#include "cisim/feasibility.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cisim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Time inverse_rate(Rate r) { return Time{r.si() > 0.0 ? 1.0 / r.si() : kInf}; }

}  // namespace

LambdaTimescale t_lambda(Mass mass, Rate omega0, LocalizationRate lambda_loc) {
  if (!(mass.si() > 0.0) || !(omega0.si() > 0.0) || lambda_loc.si() < 0.0)
    throw DomainError("t_lambda: mass and frequency must be positive, Lambda non-negative");
  LambdaTimescale out;
  if (lambda_loc.si() == 0.0) {
    out.infinite = true;
    out.t_lambda = Time{kInf};
    out.xi_at_t_lambda = Length{kInf};
    return out;
  }
  out.t_lambda = cbrt(3.0 * mass / (2.0 * codata2018.hbar * lambda_loc * omega0));
  out.xi_at_t_lambda = sqrt(2.0 / (lambda_loc * out.t_lambda));
  return out;
}

Length free_coherence_length(const GaussianState& initial, LocalizationRate lambda_loc, Time t) {
  return coherence_length(propagate_segment(initial, PotentialSegment::free(t, lambda_loc)));
}

CoherencePeak coherence_peak(const GaussianState& initial, LocalizationRate lambda_loc) {
  if (!(lambda_loc.si() > 0.0)) throw DomainError("coherence_peak: Lambda must be positive");
  const double hbar = codata2018.hbar.si();
  const double M = initial.mass().si();
  // The ground state of w0 has v_p = hbar M w0 / 2; use the equivalent w as the scale.
  const double w_eff = 2.0 * initial.v_p().si() / (hbar * M);
  const double hint = std::cbrt(3.0 * M / (2.0 * hbar * lambda_loc.si() * w_eff));

  const auto neg_xi = [&](double u) {
    return -free_coherence_length(initial, lambda_loc, Time{std::exp(u)}).si();
  };
  double lo = std::log(hint) - std::log(100.0), hi = std::log(hint) + std::log(100.0);
  const double xi0 = coherence_length(initial).si();
  for (int attempt = 0; attempt < 8; ++attempt) {
    const auto [u, f] = boost::math::tools::brent_find_minima(neg_xi, lo, hi, 40);
    const double span = hi - lo;
    if (u - lo > 1e-3 * span && hi - u > 1e-3 * span) return {Time{std::exp(u)}, Length{-f}};
    // Peak at the bracket edge: shift the bracket that way.
    if (u - lo <= 1e-3 * span) {
      // Already shrinking from the start: the maximum is the initial state itself.
      if (-f <= xi0) return {Time{0.0}, Length{xi0}};
      lo -= span / 2.0;
      hi -= span / 2.0;
    } else {
      lo += span / 2.0;
      hi += span / 2.0;
    }
  }
  throw ConsistencyError("coherence_peak: no interior maximum found");
}

std::vector<PldSource> environmental_sources(const Environment& env, const Sphere& sphere) {
  return {air_scattering(env, sphere.radius), blackbody_scattering(env, sphere.radius),
          blackbody_emit_absorb(env, sphere.radius)};
}

Budget budget(const BudgetInputs& in) {
  in.env.validate();
  if (!(in.omega0.si() > 0.0) || !(in.omega_inverted.si() > 0.0))
    throw DomainError("budget: trap and inflator frequencies must be positive");
  if (!(in.margin > 0.0)) throw DomainError("budget: margin must be positive");
  const Mass M = in.sphere.mass();
  const Length d = in.slit_separation.value_or(in.sphere.radius);
  const auto hbar = codata2018.hbar;
  const Rate w0 = in.omega0, wi = in.omega_inverted;

  auto sources = environmental_sources(in.env, in.sphere);
  if (in.include_gravity) sources.push_back(gravity_source(M, in.sphere.radius));
  const auto eff = combine(sources, d);

  Budget b;
  b.lambda_total = eff.lambda_loc;
  b.gamma_total = eff.gamma;
  b.t_lambda_min = Time{kInf};
  for (std::size_t i = 0; i < sources.size(); ++i) {
    SourceTimescale st{sources[i].kind, eff.report[i].regime, sources[i].gamma, sources[i].lambda_loc,
                       Time{kInf}};
    if (st.regime == Regime::LongWavelength) {
      st.t_lambda = t_lambda(M, w0, st.lambda_loc).t_lambda;
      b.t_lambda_min = std::min(b.t_lambda_min, st.t_lambda);
    }
    b.sources.push_back(st);
  }
  b.t_star = std::min(b.t_lambda_min, inverse_rate(b.gamma_total));

  const auto ground = ground_state(M, w0);
  b.xi_star = std::isfinite(b.t_star.si()) ? free_coherence_length(ground, b.lambda_total, b.t_star)
                                           : Length{kInf};

  b.lambda_vibration = vibration_source(M, wi, in.env.vibration_psd).lambda_loc;
  const auto bound = max_coherent_gain(M, w0, wi, b.lambda_vibration);
  b.g_star = bound.g_star;
  b.g_p_star = bound.unbounded ? kInf : std::sqrt(wi.si() * b.g_star / w0.si());
  b.s_xx_max_inflation = hbar / (M * wi * w0);
  b.s_xx_max_fringes = 16.0 * kPi * kPi * hbar * hbar / (d * d * M * M * wi * wi * wi);

  // Inflation: explicit t_I, or the time at which sinh(2 t w_I) sits a margin below the purity bound.
  const LocalizationRate lambda_inflation = b.lambda_vibration + b.lambda_total;
  if (in.t_inflate) {
    b.t_inflate = *in.t_inflate;
  } else if (lambda_inflation.si() > 0.0) {
    const double sinh_bound = M * wi * wi * wi * w0 / (hbar * lambda_inflation * (wi * wi + w0 * w0));
    b.t_inflate = std::min(Time{std::asinh(sinh_bound / in.margin) / (2.0 * wi.si())}, kDefaultOmegaTCap / wi);
  }
  b.gain = ci_gain(w0, wi, b.t_inflate);
  const auto inflated =
      propagate_segment(ground, PotentialSegment::inverted(wi, b.t_inflate, lambda_inflation));
  const Time peak = b.lambda_total.si() > 0.0 ? coherence_peak(inflated, b.lambda_total).time : Time{kInf};
  b.t_star_inflated = std::min(peak, inverse_rate(b.gamma_total));
  b.xi_star_inflated = std::isfinite(b.t_star_inflated.si())
                           ? free_coherence_length(inflated, b.lambda_total, b.t_star_inflated)
                           : Length{kInf};
  return b;
}

FalsificationWindow falsification_window(const FalsificationInputs& in) {
  in.env.validate();
  if (!(in.margin > 0.0)) throw DomainError("falsification_window: margin must be positive");
  const Mass M = in.sphere.mass();
  const Length scale = in.scale.value_or(in.sphere.radius);
  const auto sources = environmental_sources(in.env, in.sphere);
  const auto eff = combine(sources, scale);
  const LocalizationRate lambda_g = in.gravity_lambda.value_or(gravity_source(M, in.sphere.radius).lambda_loc);
  if (lambda_g.si() < 0.0) throw DomainError("falsification_window: Lambda_G must be non-negative");

  Time t_min{kInf};
  for (std::size_t i = 0; i < sources.size(); ++i)
    if (eff.report[i].regime == Regime::LongWavelength)
      t_min = std::min(t_min, t_lambda(M, in.omega0, sources[i].lambda_loc).t_lambda);

  FalsificationWindow w;
  if (in.pre_slit_time) {
    w.evaluated_at = *in.pre_slit_time;
  } else {
    w.evaluated_at = std::min(t_min, inverse_rate(eff.gamma));
    if (!std::isfinite(w.evaluated_at.si()))
      w.evaluated_at = t_lambda(M, in.omega0, eff.lambda_loc + lambda_g).t_lambda;
  }
  if (!std::isfinite(w.evaluated_at.si()))
    throw DomainError("falsification_window: no finite decoherence timescale; give a pre-slit time");

  const auto ground = ground_state(M, in.omega0);
  const LocalizationRate lambda_v = vibration_source(M, in.omega_inverted, in.env.vibration_psd).lambda_loc;
  const auto xi_at = [&](LocalizationRate extra) {
    auto s = ground;
    if (in.t_inflate.si() > 0.0)
      s = propagate_segment(s, PotentialSegment::inverted(in.omega_inverted, in.t_inflate, eff.lambda_loc + lambda_v + extra));
    return free_coherence_length(s, eff.lambda_loc + extra, w.evaluated_at);
  };
  const double sw = std::exp(-eff.gamma.si() * (in.t_inflate.si() + w.evaluated_at.si()));
  w.xi_without_gravity = xi_at(LocalizationRate{0.0}) * sw;
  w.xi_with_gravity = xi_at(lambda_g) * sw;
  w.d_low = w.xi_with_gravity;
  w.d_high = w.xi_without_gravity;
  w.ratio = w.d_low.si() > 0.0 ? w.d_high / w.d_low : kInf;
  w.conclusive = w.ratio >= in.margin;
  return w;
}

}  // namespace cisim
