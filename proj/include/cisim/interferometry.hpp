#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cisim/decoherence.hpp"
#include "cisim/dynamics.hpp"
#include "cisim/quantities.hpp"

namespace cisim {

/// Post-slit superposition psi(x) = N [phi(x - d/2) + phi(x + d/2)],
/// phi(x) = exp(-x^2 / (4 sigma^2)).
struct CatState {
  Length slit_separation;
  Length slit_width;
  Mass mass;

  /// sigma < d/2 is enforced; the default width is d/10.
  static CatState make(Mass mass, Length separation, std::optional<Length> width = std::nullopt);

  /// sigma > d/4: still accepted but the branches are not well separated.
  bool wide_slit_warning() const { return slit_width * 4.0 > slit_separation; }
  /// <phi(x - d/2) | phi(x + d/2)> normalized, exp(-d^2 / (8 sigma^2)).
  double branch_overlap() const;
};

enum class EvolutionKind { FreeExpansion, CiExpansion };

std::string_view to_string(EvolutionKind kind);

struct GridSpec {
  std::size_t points = 4096;
  /// Overrides the automatic +/-(5 envelope sigma + 3 blur) extent.
  std::optional<Length> half_width;
  double min_samples_per_fringe = 16.0;
};

/// P(x) sampled on a uniform, symmetric grid.
struct FringePattern {
  double x_min = 0.0;  // m
  double dx = 0.0;     // m
  std::vector<double> density;  // 1/m
  Length fringe_separation{0.0};
  Length blur_scale{0.0};
  std::optional<double> visibility;
  EvolutionKind kind = EvolutionKind::FreeExpansion;

  std::size_t size() const { return density.size(); }
  double x(std::size_t i) const;
  double x_max() const { return x(size() - 1); }
  /// Trapezoid rule over the grid.
  double integral() const;
};

/// Exact position density of the cat after the linear map, with the
/// interference term scaled by `interference_damping` (short-wavelength loss).
double cat_density(const CatState& cat, const PhaseSpaceMap& map, Length x, double interference_damping = 1.0);

/// Spacing of the interference maxima produced by the map, 2 pi / |k|.
Length mapped_fringe_separation(const CatState& cat, const PhaseSpaceMap& map);

/// `base` with the point count raised (up to max_points) until the fringes of
/// the blurred pattern get min_samples_per_fringe; ResolutionError beyond that.
GridSpec resolved_grid(const CatState& cat, const Evolution& evolution, const GridSpec& base = {},
                       std::size_t max_points = std::size_t{1} << 22);

/// Pattern without long-wavelength blur. The evolution's noise only sizes the
/// grid; its short-wavelength exponent damps the interference term.
FringePattern unblurred_pattern(const CatState& cat, const Evolution& evolution, EvolutionKind kind,
                                const GridSpec& grid = {});

/// Convolution with exp(-y^2 / sigma^2) / (sigma sqrt(pi)).
FringePattern blurred_pattern(const FringePattern& p0, Length blur);

/// unblurred_pattern followed by blurred_pattern with the evolution's blur scale.
FringePattern synthesize_pattern(const CatState& cat, const Evolution& evolution, EvolutionKind kind,
                                 const GridSpec& grid = {});

/// Michelson contrast of the fringes within `window` around the center.
/// Local extrema near the expected fringe positions are refined with a
/// parabola; where the blur has erased an extremum the pattern value at the
/// expected position is used, so fully blurred patterns give ~0.
double visibility(const FringePattern& p, Length window);
/// Window of five fringe periods.
double visibility(const FringePattern& p);

Length free_fringe_separation(Mass mass, Length separation, Time t);
/// sqrt(4 hbar^2 Lambda t^3 / (3 M^2)).
Length free_blur_scale(Mass mass, LocalizationRate lambda_loc, Time t);
/// As above for a catalog source; DomainError if it is short-wavelength at `scale`.
Length free_blur_scale(Mass mass, const PldSource& source, Length scale, Time t);
/// sqrt(hbar^2 Lambda_I / (M^2 w^3) [sinh(2 w t) - 2 w t]).
Length ci_blur_scale(Mass mass, LocalizationRate lambda_inflation, Rate omega, Time t,
                     double cap_omega_t = kDefaultOmegaTCap);
/// e^(w t) 2 pi hbar / (M d w).
Length ci_fringe_separation(Mass mass, Length separation, Rate omega, Time t,
                            double cap_omega_t = kDefaultOmegaTCap);
/// Lambda_I below which x_f / sigma stays large during inflation, 8 pi^2 w / d^2.
LocalizationRate ci_visibility_lambda_ceiling(Rate omega, Length separation);

}  // namespace cisim
