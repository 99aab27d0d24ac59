#include "cisim/interferometry.hpp"

#include "series.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace cisim {

namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x, double mean, double var) {
  const double z = x - mean;
  return kInvSqrt2Pi / std::sqrt(var) * std::exp(-0.5 * z * z / var);
}

// Moments of the position marginal after the map, for one slit packet.
struct MappedCat {
  double var = 0.0;         // V
  double mean = 0.0;        // mu, the packets sit at +/- mu
  double kappa = 0.0;       // fringe wavenumber
  double cross_weight = 0.0;  // exp(-q_p^2 hbar^2 / (8 V))
  double norm = 1.0;        // 2 (1 + overlap)
};

void check_symplectic(const PhaseSpaceMap& s) {
  // Composed stretching maps carry rounding of order eps*|S|^2 in the determinant, measured in
  // the balanced (unit-free) form of S.
  const double balanced = std::fabs(s.x_x) + std::fabs(s.p_p) + 2.0 * std::sqrt(std::fabs(s.x_p * s.p_x));
  const double tol = 1e-9 + 64.0 * std::numeric_limits<double>::epsilon() * balanced * balanced;
  if (!(std::fabs(s.determinant() - 1.0) <= tol))
    throw DomainError("pattern synthesis needs a symplectic map (det = 1)");
}

MappedCat mapped(const CatState& cat, const PhaseSpaceMap& s) {
  const double hbar = codata2018.hbar.si();
  const double sigma = cat.slit_width.si(), d = cat.slit_separation.si();
  const double h = hbar * hbar / (4.0 * sigma * sigma);  // initial momentum variance
  const double a = s.x_x, b = s.x_p;
  MappedCat m;
  m.var = a * a * sigma * sigma + b * b * h;
  m.mean = a * d / 2.0;
  // q = S^-T (0, d/hbar); kappa = q_x + q_p Sigma_xp / V simplifies to d b h / (hbar V)
  // for det S = 1, which avoids cancelling the large stretched entries.
  m.kappa = d * b * h / (hbar * m.var);
  m.cross_weight = std::exp(-a * a * d * d / (8.0 * m.var));
  m.norm = 2.0 * (1.0 + cat.branch_overlap());
  return m;
}

double density_at(const MappedCat& m, double x, double damping) {
  return (normal_pdf(x, m.mean, m.var) + normal_pdf(x, -m.mean, m.var) +
          2.0 * damping * m.cross_weight * normal_pdf(x, 0.0, m.var) * std::cos(m.kappa * x)) /
         m.norm;
}

double interpolate(const FringePattern& p, double x) {
  const double u = (x - p.x_min) / p.dx;
  if (u <= 0.0) return p.density.front();
  const auto i = static_cast<std::size_t>(u);
  if (i + 1 >= p.size()) return p.density.back();
  const double f = u - static_cast<double>(i);
  return (1.0 - f) * p.density[i] + f * p.density[i + 1];
}

// Parabola-refined extremum near `x0` within +/- half_range; nullopt when the
// pattern has no interior extremum there.
std::optional<double> extremum_near(const FringePattern& p, double x0, double half_range, bool maximum) {
  const auto index_of = [&](double x) {
    return static_cast<long>(std::lround((x - p.x_min) / p.dx));
  };
  const long n = static_cast<long>(p.size());
  const long lo = std::max<long>(1, index_of(x0 - half_range));
  const long hi = std::min<long>(n - 2, index_of(x0 + half_range));
  long best = -1;
  for (long i = lo; i <= hi; ++i) {
    const double y = p.density[i];
    const bool is_ext = maximum ? (y >= p.density[i - 1] && y >= p.density[i + 1] &&
                                   (y > p.density[i - 1] || y > p.density[i + 1]))
                                : (y <= p.density[i - 1] && y <= p.density[i + 1] &&
                                   (y < p.density[i - 1] || y < p.density[i + 1]));
    if (!is_ext) continue;
    if (best < 0 || (maximum ? y > p.density[best] : y < p.density[best])) best = i;
  }
  if (best < 0) return std::nullopt;
  const double ym = p.density[best - 1], y0 = p.density[best], yp = p.density[best + 1];
  const double denom = ym - 2.0 * y0 + yp;
  if (denom == 0.0) return y0;
  const double off = 0.5 * (ym - yp) / denom;
  return y0 - 0.25 * (ym - yp) * off;
}

std::optional<double> try_visibility(const FringePattern& p) {
  try {
    return visibility(p);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string_view to_string(EvolutionKind kind) {
  return kind == EvolutionKind::CiExpansion ? "ci" : "free";
}

CatState CatState::make(Mass mass, Length separation, std::optional<Length> width) {
  if (!(mass.si() > 0.0)) throw DomainError("cat state: mass must be positive");
  if (!(separation.si() > 0.0) || !std::isfinite(separation.si()))
    throw DomainError("cat state: slit separation must be positive");
  const Length sigma = width.value_or(separation / 10.0);
  if (!(sigma.si() > 0.0)) throw DomainError("cat state: slit width must be positive");
  if (!(sigma * 2.0 < separation)) throw DomainError("cat state: slit width must be below d/2");
  return {separation, sigma, mass};
}

double CatState::branch_overlap() const {
  const double r = slit_separation.si() / slit_width.si();
  return std::exp(-r * r / 8.0);
}

double FringePattern::x(std::size_t i) const { return x_min + dx * static_cast<double>(i); }

double FringePattern::integral() const {
  if (density.size() < 2) return 0.0;
  double sum = 0.5 * (density.front() + density.back());
  for (std::size_t i = 1; i + 1 < density.size(); ++i) sum += density[i];
  return sum * dx;
}

double cat_density(const CatState& cat, const PhaseSpaceMap& map, Length x, double interference_damping) {
  check_symplectic(map);
  return density_at(mapped(cat, map), x.si(), interference_damping);
}

Length mapped_fringe_separation(const CatState& cat, const PhaseSpaceMap& map) {
  check_symplectic(map);
  const double k = std::fabs(mapped(cat, map).kappa);
  return Length{k > 0.0 ? 2.0 * kPi / k : std::numeric_limits<double>::infinity()};
}

namespace {

double auto_half_width(const MappedCat& m, const Evolution& evolution) {
  return std::fabs(m.mean) + 5.0 * std::sqrt(m.var) + 3.0 * evolution.blur_scale().si();
}

}  // namespace

GridSpec resolved_grid(const CatState& cat, const Evolution& evolution, const GridSpec& base,
                       std::size_t max_points) {
  check_symplectic(evolution.map);
  GridSpec g = base;
  const auto m = mapped(cat, evolution.map);
  const double xf = m.kappa != 0.0 ? 2.0 * kPi / std::fabs(m.kappa) : std::numeric_limits<double>::infinity();
  if (!std::isfinite(xf)) return g;
  const double half = g.half_width ? g.half_width->si() : auto_half_width(m, evolution);
  const double needed = std::ceil(2.0 * half / xf * g.min_samples_per_fringe) + 1.0;
  if (needed > static_cast<double>(max_points)) {
    std::ostringstream os;
    os << "pattern needs " << needed << " grid points (limit " << max_points << ")";
    throw ResolutionError(os.str());
  }
  g.points = std::max(g.points, static_cast<std::size_t>(needed));
  return g;
}

FringePattern unblurred_pattern(const CatState& cat, const Evolution& evolution, EvolutionKind kind,
                                const GridSpec& grid) {
  check_symplectic(evolution.map);
  if (grid.points < 16) throw ResolutionError("pattern grid needs at least 16 points");
  const auto m = mapped(cat, evolution.map);
  const double half = grid.half_width ? grid.half_width->si() : auto_half_width(m, evolution);
  if (!(half > 0.0) || !std::isfinite(half)) throw DomainError("pattern grid half-width must be positive");

  FringePattern p;
  p.kind = kind;
  p.dx = 2.0 * half / static_cast<double>(grid.points - 1);
  p.x_min = -half;
  p.fringe_separation = mapped_fringe_separation(cat, evolution.map);
  const double xf = p.fringe_separation.si();
  if (std::isfinite(xf) && xf < grid.min_samples_per_fringe * p.dx) {
    std::ostringstream os;
    os << "grid spacing " << p.dx << " m resolves fringes of " << xf << " m with fewer than "
       << grid.min_samples_per_fringe << " samples";
    throw ResolutionError(os.str());
  }

  const double damping = evolution.sw_decay();
  p.density.resize(grid.points);
  // Evaluate symmetric pairs from the same |x| so the pattern is exactly even.
  for (std::size_t i = 0; i < grid.points; ++i) {
    const std::size_t j = grid.points - 1 - i;
    if (j < i) {
      p.density[i] = p.density[j];
      continue;
    }
    p.density[i] = density_at(m, std::fabs(p.x(i)), damping);
  }
  p.visibility = try_visibility(p);
  return p;
}

FringePattern blurred_pattern(const FringePattern& p0, Length blur) {
  const double sigma = blur.si();
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw DomainError("blur scale must be non-negative");
  const double extent = p0.x_max() - p0.x_min;
  if (sigma > extent / 6.0) {
    std::ostringstream os;
    os << "blur scale " << sigma << " m exceeds grid extent / 6 (" << extent / 6.0 << " m)";
    throw DomainError(os.str());
  }
  FringePattern out = p0;
  out.blur_scale = blur;
  if (sigma == 0.0) return out;

  // Zero-padded spectral convolution; the kernel exp(-y^2/s^2)/(s sqrt(pi)) has
  // Fourier multiplier exp(-k^2 s^2 / 4).
  const std::size_t n = p0.size();
  const std::size_t len = 2 * n;
  const std::size_t bins = len / 2 + 1;
  double* buf = fftw_alloc_real(len);
  fftw_complex* spec = fftw_alloc_complex(bins);
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), buf, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec, buf, FFTW_ESTIMATE);
  }
  std::copy(p0.density.begin(), p0.density.end(), buf);
  std::fill(buf + n, buf + len, 0.0);
  fftw_execute(fwd);
  const double dk = 2.0 * kPi / (static_cast<double>(len) * p0.dx);
  for (std::size_t j = 0; j < bins; ++j) {
    const double k = dk * static_cast<double>(j);
    const double w = std::exp(-0.25 * k * k * sigma * sigma) / static_cast<double>(len);
    spec[j][0] *= w;
    spec[j][1] *= w;
  }
  fftw_execute(bwd);
  for (std::size_t i = 0; i < n; ++i) out.density[i] = std::max(buf[i], 0.0);
  // Restore exact parity lost to rounding in the transform.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double avg = 0.5 * (out.density[i] + out.density[n - 1 - i]);
    out.density[i] = out.density[n - 1 - i] = avg;
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  fftw_free(buf);
  fftw_free(spec);
  out.visibility = try_visibility(out);
  return out;
}

FringePattern synthesize_pattern(const CatState& cat, const Evolution& evolution, EvolutionKind kind,
                                 const GridSpec& grid) {
  return blurred_pattern(unblurred_pattern(cat, evolution, kind, grid), evolution.blur_scale());
}

double visibility(const FringePattern& p, Length window) {
  const double xf = p.fringe_separation.si();
  if (!(xf > 0.0) || !std::isfinite(xf)) throw DomainError("visibility undefined: no fringe separation");
  const double w = window.si();
  if (w < 3.0 * xf) throw DomainError("visibility window must cover at least 3 fringe periods");
  if (xf < 4.0 * p.dx) throw ResolutionError("visibility: fringes are not resolved by the grid");

  const double half = std::min(0.5 * w, std::min(-p.x_min, p.x_max()) - 0.5 * xf);
  const int kmax = static_cast<int>(std::floor(half / xf + 1e-9));
  if (2 * kmax + 1 < 2) throw DomainError("visibility undefined: fewer than 2 maxima in window");

  // Aggregate Michelson contrast: each maximum against the mean of its two neighbouring minima.
  // A fringe whose extrema have been blurred away contributes no contrast.
  double sum_diff = 0.0, sum_total = 0.0;
  int maxima = 0;
  for (int k = -kmax; k <= kmax; ++k) {
    const double xm = k * xf;
    const auto pmax = extremum_near(p, xm, 0.25 * xf, true);
    const auto left = extremum_near(p, xm - 0.5 * xf, 0.25 * xf, false);
    const auto right = extremum_near(p, xm + 0.5 * xf, 0.25 * xf, false);
    if (pmax && left && right) {
      const double pmin = 0.5 * (*left + *right);
      sum_diff += *pmax - pmin;
      sum_total += *pmax + pmin;
    } else {
      // Erased fringe: no contrast, weighted by the local density.
      sum_total += 2.0 * interpolate(p, xm);
    }
    ++maxima;
  }
  if (maxima < 2 || !(sum_total > 0.0)) throw DomainError("visibility undefined: fewer than 2 maxima in window");
  return std::clamp(sum_diff / sum_total, 0.0, 1.0);
}

double visibility(const FringePattern& p) { return visibility(p, 5.0 * p.fringe_separation); }

Length free_fringe_separation(Mass mass, Length separation, Time t) {
  if (!(mass.si() > 0.0) || !(separation.si() > 0.0) || t.si() < 0.0)
    throw DomainError("free_fringe_separation: invalid input");
  return 2.0 * kPi * codata2018.hbar * t / (mass * separation);
}

Length free_blur_scale(Mass mass, LocalizationRate lambda_loc, Time t) {
  if (!(mass.si() > 0.0) || lambda_loc.si() < 0.0 || t.si() < 0.0)
    throw DomainError("free_blur_scale: invalid input");
  const auto hbar = codata2018.hbar;
  return sqrt(4.0 * hbar * hbar * lambda_loc * t * t * t / (3.0 * mass * mass));
}

Length free_blur_scale(Mass mass, const PldSource& source, Length scale, Time t) {
  if (!source.long_wavelength_only && scale >= source.saturation_length) {
    std::ostringstream os;
    os << "free_blur_scale: source " << to_string(source.kind) << " is short-wavelength at scale "
       << scale.si() << " m (saturation length " << source.saturation_length.si() << " m)";
    throw DomainError(os.str());
  }
  return free_blur_scale(mass, source.lambda_loc, t);
}

Length ci_blur_scale(Mass mass, LocalizationRate lambda_inflation, Rate omega, Time t, double cap_omega_t) {
  if (!(mass.si() > 0.0) || lambda_inflation.si() < 0.0 || !(omega.si() > 0.0) || t.si() < 0.0)
    throw DomainError("ci_blur_scale: invalid input");
  const double wt = omega.si() * t.si();
  if (wt > cap_omega_t) throw OverflowGuardError("ci_blur_scale: omega*t exceeds cap");
  const auto hbar = codata2018.hbar;
  const auto w3 = omega * omega * omega;
  return sqrt(hbar * hbar * lambda_inflation / (mass * mass * w3) * detail::sinh_minus_x(2.0 * wt));
}

Length ci_fringe_separation(Mass mass, Length separation, Rate omega, Time t, double cap_omega_t) {
  if (!(mass.si() > 0.0) || !(separation.si() > 0.0) || !(omega.si() > 0.0) || t.si() < 0.0)
    throw DomainError("ci_fringe_separation: invalid input");
  const double wt = omega.si() * t.si();
  if (wt > cap_omega_t) throw OverflowGuardError("ci_fringe_separation: omega*t exceeds cap");
  return std::exp(wt) * 2.0 * kPi * codata2018.hbar / (mass * separation * omega);
}

LocalizationRate ci_visibility_lambda_ceiling(Rate omega, Length separation) {
  if (!(omega.si() > 0.0) || !(separation.si() > 0.0))
    throw DomainError("ci_visibility_lambda_ceiling: invalid input");
  return 8.0 * kPi * kPi * omega / (separation * separation);
}

}  // namespace cisim
