#pragma once
// Randomized and hand-picked inputs shared by the unit tests and the acceptance run.
#include <cmath>
#include <random>
#include <vector>

#include "cisim/dynamics.hpp"
#include "cisim/interferometry.hpp"
#include "oracles.hpp"

namespace cases {

using namespace cisim;

struct RandomCase {
  GaussianState state;
  PotentialSegment seg;
};

inline RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double hb = oracle::kHbar;
  const double mass = std::pow(10.0, -20.0 + 6.0 * u(rng));
  const double vx = std::pow(10.0, -18.0 + 4.0 * u(rng));
  const double c = (u(rng) - 0.5) * 4.0 * hb;
  const double vp = (hb * hb / 4.0 * (1.0 + 3.0 * u(rng)) + c * c) / vx;
  const auto state = GaussianState::from_moments(Mass{mass}, Area{vx}, MomentumSq{vp}, Action{c});

  const int kind = static_cast<int>(u(rng) * 3.0);
  const double omega = std::pow(10.0, 4.0 * u(rng));
  const double t_free = mass * vx / hb;  // time for the spread to double
  PotentialSegment seg;
  double t = 0.0;
  if (kind == 0) {
    t = 10.0 * u(rng) * t_free;
    seg = PotentialSegment::free(Time{t});
  } else if (kind == 1) {
    t = 20.0 * u(rng) / omega;
    seg = PotentialSegment::harmonic(Rate{omega}, Time{t});
  } else {
    t = 6.0 * u(rng) / omega;
    seg = PotentialSegment::inverted(Rate{omega}, Time{t});
  }
  // Diffusion adding between 0 and ~10x the initial momentum variance.
  const double f = u(rng) < 0.2 ? 0.0 : std::pow(10.0, -3.0 + 4.0 * u(rng));
  seg.lw_lambda = LocalizationRate{t > 0.0 ? f * vp / (2.0 * hb * hb * t) : 0.0};
  return {state, seg};
}

inline int sign_of(PotentialKind k) { return k == PotentialKind::Harmonic ? 1 : k == PotentialKind::Inverted ? -1 : 0; }

// Maxima of the pattern within `half` of the center, refined by a parabola.
inline std::vector<double> central_maxima(const FringePattern& p, double half) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    const double x = p.x(i);
    if (std::fabs(x) > half) continue;
    const double a = p.density[i - 1], b = p.density[i], c = p.density[i + 1];
    if (b > a && b >= c) out.push_back(x + 0.5 * p.dx * (a - c) / (a - 2.0 * b + c));
  }
  return out;
}

inline double mean_spacing(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nan("");
  return (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
}

struct OracleCase {
  const char* name;
  double mass, d, sigma;
  std::vector<PotentialSegment> segments;
};

// Sequential oracle propagation: exact matrices and ODE-integrated noise.
inline void oracle_map(const OracleCase& c, oracle::Mat& s, oracle::Moments& q) {
  s = {1.0, 0.0, 0.0, 1.0};
  q = {};
  const double X = c.sigma, P = oracle::kHbar / (2.0 * c.sigma);
  for (const auto& seg : c.segments) {
    const double t = seg.duration.si(), w = seg.omega.si();
    const auto m = seg.kind == PotentialKind::Free       ? oracle::drift(c.mass, t)
                   : seg.kind == PotentialKind::Harmonic ? oracle::rotation(c.mass, w, t)
                                                         : oracle::stretch(c.mass, w, t);
    s = oracle::mul(m, s);
    q = oracle::integrate_moments(q, c.mass, sign_of(seg.kind), w, seg.lw_lambda.si(), t, X, P);
  }
}

// Sets every segment's diffusion so that the blur is `fraction` of the fringe spacing
// (the added position variance is linear in Lambda).
inline OracleCase with_blur(OracleCase c, double fraction) {
  const auto cat = CatState::make(Mass{c.mass}, Length{c.d}, Length{c.sigma});
  for (auto& seg : c.segments) seg.lw_lambda = LocalizationRate{1.0};
  const auto unit = compose(c.segments, cat.mass);
  const double xf = mapped_fringe_separation(cat, unit.map).si();
  const double target = 0.5 * std::pow(fraction * xf, 2);
  for (auto& seg : c.segments) seg.lw_lambda = LocalizationRate{target / unit.noise.xx};
  return c;
}

inline std::vector<OracleCase> oracle_cases() {
  const double M = 1e-22, d = 1e-7, s = 1e-8;
  const double wi = 200.0;
  return {
      {"free far field", M, d, s, {PotentialSegment::free(Time{2e-3})}},
      with_blur({"free with diffusion", M, d, s, {PotentialSegment::free(Time{2e-3})}}, 0.25),
      {"free near field", M, d, s, {PotentialSegment::free(Time{2e-5})}},
      with_blur({"wide slits", M, d, d / 4.5, {PotentialSegment::free(Time{1e-3})}}, 0.2),
      with_blur({"trap rotation", M, d, s, {PotentialSegment::harmonic(Rate{wi}, Time{1.1 / wi})}}, 0.3),
      with_blur({"momentum mapping", M, d, s, momentum_mapping_segments(Rate{wi}, Time{6.0 / wi})}, 0.25),
      with_blur({"heavier free", 1e-20, 2e-7, 3e-8, {PotentialSegment::free(Time{0.3})}}, 0.4),
  };
}


}  // namespace cases
