#include <doctest.h>

#include "approx.hpp"

#include <algorithm>

#include "cisim/protocol.hpp"
#include "oracles.hpp"

using namespace cisim;

namespace {

ProtocolPlan quiet_plan() {
  ProtocolPlan p;
  p.sources = SourceToggles{false, false, false, false, false};
  p.t_inflate = Time{0.01};
  p.free_time = Time{0.05};
  p.slit_separation = Length{1e-7};
  return p;
}

ProtocolPlan reference_plan(double psd) {
  ProtocolPlan p;
  p.env.temperature = Temperature{0.1};
  p.env.pressure = Pressure{1e-14};
  p.env.vibration_psd = Psd{psd};
  p.t_inflate = Time{0.01};
  p.free_time = Time{0.05};
  p.slit_separation = Length{1e-7};
  return p;
}

}  // namespace

TEST_CASE("fully coherent run") {
  const auto trace = run_protocol(quiet_plan());
  REQUIRE(trace.steps.size() == 7);
  CHECK(*trace.steps[2].purity == rel_approx(1.0).epsilon(1e-9));
  CHECK(*trace.steps[1].coherence_length > *trace.steps[0].coherence_length);
  CHECK(*trace.steps[2].coherence_length > *trace.steps[1].coherence_length);
  for (std::size_t i = 1; i < trace.steps.size(); ++i) CHECK(trace.steps[i].elapsed >= trace.steps[i - 1].elapsed);
  CHECK(trace.pattern.integral() == rel_approx(1.0).epsilon(1e-3));
  CHECK(trace.final_visibility > 0.9);

  const auto tl = coherence_timeline(quiet_plan(), 50);
  for (std::size_t i = 1; i < tl.size(); ++i) CHECK(tl[i].xi >= tl[i - 1].xi);
}

TEST_CASE("step 3 reaches the air-limited coherence length") {
  auto plan = reference_plan(0.0);
  plan.t_inflate = Time{0.0};
  plan.slit_separation = Length{1e-6};
  BudgetInputs in;
  in.env = plan.env;
  in.slit_separation = plan.slit_separation;
  const auto b = budget(in);
  plan.free_time = b.t_star;
  const auto trace = run_protocol(plan);
  const auto& s3 = trace.steps[2];
  CHECK(s3.sw_factor == rel_approx(std::exp(-1.0)).epsilon(1e-9));
  CHECK(s3.coherence_length->si() / s3.sw_factor == rel_approx(b.xi_star.si()).epsilon(1e-6));
}

TEST_CASE("final visibility against the vibration ceiling") {
  BudgetInputs in;
  in.slit_separation = Length{1e-7};
  const double ceiling = budget(in).s_xx_max_fringes.si();
  // The measured crossover to visibility 1/2 sits near S = ceiling / 100; well below it the fringes survive.
  const auto quiet = run_protocol(reference_plan(ceiling / 1000.0));
  CHECK(quiet.final_visibility >= 0.5);
  const auto loud = run_protocol(reference_plan(ceiling * 100.0));
  CHECK(loud.final_visibility < 0.05);
}

TEST_CASE("mapping duration and verdicts") {
  const Mass M = sphere_mass(Length{1e-6}, Density{8570.0});
  const Rate w{2.0 * kPi * 50.0};
  bool capped = true;
  const Time t = mapping_duration_for_fringe(M, Length{1e-7}, w, Length{1e-7}, 30.0, &capped);
  CHECK_FALSE(capped);
  CHECK(t.si() == rel_approx(std::log(std::sqrt(2.0) * M.si() * w.si() * 1e-7 * 1e-7 /
                                           (2.0 * kPi * oracle::kHbar)) / w.si()).epsilon(1e-12));
  mapping_duration_for_fringe(M, Length{1e-7}, w, Length{1e-7}, 5.0, &capped);
  CHECK(capped);

  auto plan = quiet_plan();
  plan.rotation_override = Time{1e-3};
  const auto trace = run_protocol(plan);
  CHECK(trace.verdicts.rotation_nonstandard);
  CHECK_FALSE(run_protocol(quiet_plan()).verdicts.rotation_nonstandard);
}

TEST_CASE("slit feasibility verdict") {
  auto plan = quiet_plan();
  const auto ok = run_protocol(plan);
  CHECK(ok.verdicts.slit_feasible == (plan.slit_separation <= ok.slit_coherence_length));
  plan.t_inflate = Time{0.0};
  plan.free_time = Time{1e-3};
  CHECK_FALSE(run_protocol(plan).verdicts.slit_feasible);
}

TEST_CASE("short-wavelength bookkeeping of the coherence curve") {
  const Mass M = sphere_mass(Length{1e-6}, Density{8570.0});
  const auto g = ground_state(M, Rate{2.0 * kPi * 1e5});
  const auto units = ReducedUnits::of_ground_state(g);
  const Rate gamma{3.0};
  const std::vector<Time> times{Time{1.0 / 3.0}};
  const auto curve = free_coherence_curve(g, units, LocalizationRate{0.0}, gamma, times);
  const double coherent = free_coherence_length(g, LocalizationRate{0.0}, times[0]).si();
  CHECK(curve[0].xi.si() == rel_approx(coherent * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("plan validation") {
  auto plan = quiet_plan();
  plan.free_time = Time{-1.0};
  CHECK_THROWS_AS(run_protocol(plan), DomainError);
}

TEST_CASE("emitted pattern is even and normalized") {
  const auto trace = run_protocol(reference_plan(1e-45));
  const auto& p = trace.pattern;
  const double peak = *std::max_element(p.density.begin(), p.density.end());
  double asym = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) asym = std::max(asym, std::fabs(p.density[i] - p.density[p.size() - 1 - i]));
  CHECK(asym <= 1e-9 * peak);
  CHECK(p.integral() == rel_approx(1.0).epsilon(1e-2));
}

TEST_CASE("without decoherence the visibility is that of the ideal cat") {
  const auto trace = run_protocol(quiet_plan());
  Evolution ideal = trace.post_slit;
  ideal.noise = {};
  ideal.sw_exponent = 0.0;
  GridSpec grid = quiet_plan().grid;
  grid.points = trace.pattern.size();
  const auto p = unblurred_pattern(trace.cat, ideal, EvolutionKind::CiExpansion, grid);
  CHECK(trace.final_visibility == rel_approx(visibility(p)).epsilon(1e-3));
}

TEST_CASE("doubling every frequency at fixed omega t leaves reduced quantities unchanged") {
  auto a = quiet_plan();
  a.detectable_fringe = Length{1e-7};
  auto b = a;
  b.omega0 = a.omega0 * 2.0;
  b.omega_inverted = a.omega_inverted * 2.0;
  b.t_inflate = a.t_inflate / 2.0;
  b.free_time = a.free_time / 2.0;
  // Lengths scale with the ground-state width, 1/sqrt(w0).
  b.slit_separation = a.slit_separation / std::sqrt(2.0);
  b.detectable_fringe = a.detectable_fringe / std::sqrt(2.0);
  const auto ta = run_protocol(a), tb = run_protocol(b);
  REQUIRE(ta.steps.size() == tb.steps.size());
  const double x0a = ta.steps[0].coherence_length->si(), x0b = tb.steps[0].coherence_length->si();
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(*tb.steps[i].purity == rel_approx(*ta.steps[i].purity).epsilon(1e-6));
    CHECK(tb.steps[i].coherence_length->si() / x0b ==
          rel_approx(ta.steps[i].coherence_length->si() / x0a).epsilon(1e-6));
  }
  CHECK(tb.final_visibility == rel_approx(ta.final_visibility).epsilon(1e-6));
}
