#include <doctest.h>

#include "approx.hpp"

#include <random>

#include "cisim/dynamics.hpp"
#include "cases.hpp"
#include "oracles.hpp"

using namespace cisim;
using namespace cases;

namespace {

const Mass kM = sphere_mass(Length{1e-6}, Density{8570.0});
const Rate kW0{2.0 * kPi * 1e5};

}  // namespace

TEST_CASE("closed-form moments match adaptive ODE integration") {
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto rc = random_case(rng);
    const auto& s = rc.state;
    const auto out = propagate_segment(s, rc.seg);
    const auto ref = oracle::integrate_moments({s.v_x().si(), s.c().si(), s.v_p().si()}, s.mass().si(),
                                               sign_of(rc.seg.kind), rc.seg.omega.si(), rc.seg.lw_lambda.si(),
                                               rc.seg.duration.si(), std::sqrt(s.v_x().si()), std::sqrt(s.v_p().si()));
    const double e_x = std::fabs(out.v_x().si() - ref.vx) / ref.vx;
    const double e_p = std::fabs(out.v_p().si() - ref.vp) / ref.vp;
    const double e_c = std::fabs(out.c().si() - ref.c) / std::sqrt(ref.vx * ref.vp);
    worst = std::max({worst, e_x, e_p, e_c});
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("ground state is stationary in its own trap") {
  const auto g = ground_state(kM, kW0);
  const auto s = propagate_segment(g, PotentialSegment::harmonic(kW0, Time{1.234e-3}));
  CHECK(s.v_x().si() == rel_approx(g.v_x().si()).epsilon(1e-10));
  CHECK(s.v_p().si() == rel_approx(g.v_p().si()).epsilon(1e-10));
  CHECK(std::fabs(s.c().si()) < 1e-9 * oracle::kHbar);
}

TEST_CASE("free flight of a pure state") {
  const double hb = oracle::kHbar;
  const auto s = GaussianState::from_moments(kM, Area{1e-16}, MomentumSq{(hb * hb / 4.0 + 1e-70) / 1e-16}, Action{1e-35});
  const double t = 3.0;
  const auto out = propagate_segment(s, PotentialSegment::free(Time{t}));
  const double M = kM.si();
  const double expect = s.v_x().si() + 2.0 * s.c().si() * t / M + s.v_p().si() * t * t / (M * M);
  CHECK(out.v_x().si() == rel_approx(expect).epsilon(1e-12));
  CHECK(purity(out) == rel_approx(purity(s)).epsilon(1e-12));
}

TEST_CASE("free diffusion adds half the squared blur scale") {
  const auto g = ground_state(kM, kW0);
  // Large enough that the added variance is comparable to the coherent spread.
  const double lambda = 1e26, t = 0.5;
  const auto with = propagate_segment(g, PotentialSegment::free(Time{t}, LocalizationRate{lambda}));
  const auto without = propagate_segment(g, PotentialSegment::free(Time{t}));
  // Integrating dv_p/dt = 2 hbar^2 Lambda through x = x0 + p t / M by hand.
  const double M = kM.si(), hb = oracle::kHbar;
  const double sigma2 = 4.0 * hb * hb * lambda * t * t * t / (3.0 * M * M);
  CHECK(with.v_x().si() - without.v_x().si() == rel_approx(sigma2 / 2.0).epsilon(1e-9));
  const auto ev = segment_evolution(PotentialSegment::free(Time{t}, LocalizationRate{lambda}), kM);
  CHECK(ev.blur_scale().si() == rel_approx(std::sqrt(sigma2)).epsilon(1e-12));
}

TEST_CASE("Heisenberg product grows under diffusion and is conserved without it") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto rc = random_case(rng);
    const double before = rc.state.uncertainty_product().si();
    if (rc.seg.lw_lambda.si() > 0.0) {
      const auto out = propagate_segment(rc.state, rc.seg);
      CHECK(out.uncertainty_product().si() >= before);
    }
    rc.seg.lw_lambda = LocalizationRate{0.0};
    const auto out = propagate_segment(rc.state, rc.seg);
    CHECK(std::fabs(out.uncertainty_product().si() / before - 1.0) <= 1e-12);
  }
}

TEST_CASE("ci gain matches symplectic evolution of the ground state") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double M = kM.si();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double w0 = std::pow(10.0, 1.0 + 5.0 * u(rng));
    const double wi = std::pow(10.0, 1.0 + 4.0 * u(rng));
    const double t = 8.0 * u(rng) / wi;
    const auto g = ci_gain(Rate{w0}, Rate{wi}, Time{t});
    const auto ref = oracle::ci_gain(M, w0, wi, t);
    worst = std::max({worst, std::fabs(g.g / ref.g - 1.0), std::fabs(g.g_x / ref.g_x - 1.0),
                      std::fabs(g.g_p / ref.g_p - 1.0)});
    CHECK(g.g == rel_approx(g.g_x * g.g_p).epsilon(1e-12));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("ci gain special cases") {
  const auto none = ci_gain(kW0, Rate{100.0}, Time{0.0});
  CHECK(none.g == 1.0);
  CHECK(none.g_x == rel_approx(1.0));
  CHECK(none.g_p == rel_approx(1.0));
  const double t = 2e-6;
  CHECK(ci_gain(kW0, kW0, Time{t}).g == rel_approx(std::cosh(2.0 * t * kW0.si())).epsilon(1e-12));

  const auto big = ci_gain(kW0, Rate{2.0 * kPi * 50.0}, Time{0.05});
  CHECK(big.g > 100.0);
  const double r = kW0.si() / (2.0 * kPi * 50.0);
  CHECK(big.g_x / big.g_p == rel_approx(r).epsilon(std::max(r, 1.0 / r) / big.g));
}

TEST_CASE("inflated state carries the gain") {
  const auto g = ground_state(kM, kW0);
  const CiGain gain{5000.0, 500.0, 10.0};
  const auto s = inflated_state(g, gain);
  CHECK(s.v_x().si() == rel_approx(250000.0 * g.v_x().si()));
  CHECK(s.v_p().si() == rel_approx(100.0 * g.v_p().si()));
  CHECK(2.0 * s.c().si() == rel_approx(oracle::kHbar * std::sqrt(5000.0 * 5000.0 - 1.0)));
  CHECK(purity(s) == rel_approx(1.0).epsilon(1e-9));
}

TEST_CASE("max coherent gain laws") {
  const Rate wi{2.0 * kPi * 50.0};
  const auto a = max_coherent_gain(kM, kW0, wi, LocalizationRate{1e6});
  const auto b = max_coherent_gain(kM, kW0, wi, LocalizationRate{2e6});
  CHECK(b.g_star / a.g_star == rel_approx(0.5).epsilon(1e-12));
  const auto c = max_coherent_gain(kM, kW0, Rate{2.0 * wi.si()}, LocalizationRate{1e6});
  CHECK(c.g_star / a.g_star == rel_approx(4.0).epsilon(1e-12));
  CHECK(max_coherent_gain(kM, kW0, wi, LocalizationRate{0.0}).unbounded);
}

TEST_CASE("momentum mapping") {
  const double M = kM.si(), w = 2.0 * kPi * 50.0;
  const Rate wi{w};
  // Rotation alone: pi/4 in normalized quadratures.
  const auto rot = segment_evolution(PotentialSegment::harmonic(wi, rotation_time(wi)), kM).map;
  CHECK(rot.x_x == rel_approx(std::cos(kPi / 4.0)).epsilon(1e-12));
  CHECK(rot.x_p * M * w == rel_approx(std::sin(kPi / 4.0)).epsilon(1e-12));

  const double t = 10.0 / w;
  const auto segs = momentum_mapping_segments(wi, Time{t});
  const auto map = compose(segs, kM).map;
  const auto ref = oracle::mul(oracle::stretch(M, w, t), oracle::rotation(M, w, kPi / (4.0 * w)));
  CHECK(map.x_p == rel_approx(ref[1]).epsilon(1e-8));
  CHECK(ref[1] == rel_approx(std::exp(w * t) / (std::sqrt(2.0) * M * w)).epsilon(1e-8));

  const auto g = ground_state(kM, kW0);
  const auto s = propagate(g, segs);
  CHECK(purity(s) == rel_approx(1.0).epsilon(1e-9));
}

TEST_CASE("inverted segments respect the exponent cap") {
  const auto g = ground_state(kM, kW0);
  CHECK_THROWS_AS(propagate_segment(g, PotentialSegment::inverted(Rate{1.0}, Time{31.0})), OverflowGuardError);
  CHECK_NOTHROW(propagate_segment(g, PotentialSegment::inverted(Rate{1.0}, Time{31.0}), 40.0));
}

TEST_CASE("composition equals sequential propagation") {
  const auto g = ground_state(kM, kW0);
  const std::vector<PotentialSegment> segs{
      PotentialSegment::inverted(Rate{300.0}, Time{0.01}, LocalizationRate{1e8}),
      PotentialSegment::free(Time{0.02}, LocalizationRate{3e8}),
      PotentialSegment::harmonic(Rate{500.0}, Time{0.004}, LocalizationRate{2e8})};
  const auto seq = propagate(g, segs);
  const auto ev = compose(segs, kM);
  const auto m = oracle::transform({ev.map.x_x, ev.map.x_p, ev.map.p_x, ev.map.p_p},
                                   {g.v_x().si(), g.c().si(), g.v_p().si()});
  CHECK(m.vx + ev.noise.xx == rel_approx(seq.v_x().si()).epsilon(1e-9));
  CHECK(m.vp + ev.noise.pp == rel_approx(seq.v_p().si()).epsilon(1e-9));
  CHECK(ev.elapsed.si() == rel_approx(0.034));
}
