#pragma once

// Dimension-checked physical scalars.
//
// Quantity<D> carries its exponent vector over (kg, m, s, K) in the type, so
// mixing incompatible dimensions fails to compile. PhysicalQuantity is the
// runtime counterpart used at configuration and CLI boundaries, where unit
// names arrive as strings. Both store the SI value.

#include <cmath>
#include <compare>
#include <string>
#include <string_view>

#include "cisim/errors.hpp"

namespace cisim {

struct Dimension {
  int kg = 0;
  int m = 0;
  int s = 0;
  int K = 0;

  friend constexpr bool operator==(const Dimension&, const Dimension&) = default;
  friend constexpr Dimension operator+(Dimension a, Dimension b) {
    return {a.kg + b.kg, a.m + b.m, a.s + b.s, a.K + b.K};
  }
  friend constexpr Dimension operator-(Dimension a, Dimension b) {
    return {a.kg - b.kg, a.m - b.m, a.s - b.s, a.K - b.K};
  }
  constexpr Dimension scaled(int n) const { return {kg * n, m * n, s * n, K * n}; }
  constexpr bool divisible_by(int n) const {
    return kg % n == 0 && m % n == 0 && s % n == 0 && K % n == 0;
  }
  constexpr Dimension divided(int n) const { return {kg / n, m / n, s / n, K / n}; }
};

std::string to_string(Dimension d);

inline constexpr Dimension kDimensionless{};

template <Dimension D>
class Quantity {
 public:
  static constexpr Dimension dimension = D;

  constexpr Quantity() = default;
  constexpr explicit Quantity(double si_value) : value_(si_value) {}

  constexpr double si() const { return value_; }

  constexpr operator double() const
    requires(D == kDimensionless)
  {
    return value_;
  }

  constexpr Quantity operator-() const { return Quantity{-value_}; }
  constexpr Quantity& operator+=(Quantity o) {
    value_ += o.value_;
    return *this;
  }
  constexpr Quantity& operator-=(Quantity o) {
    value_ -= o.value_;
    return *this;
  }
  constexpr Quantity& operator*=(double k) {
    value_ *= k;
    return *this;
  }
  constexpr Quantity& operator/=(double k) {
    value_ /= k;
    return *this;
  }

  friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity{a.value_ + b.value_}; }
  friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity{a.value_ - b.value_}; }
  friend constexpr Quantity operator*(Quantity a, double k) { return Quantity{a.value_ * k}; }
  friend constexpr Quantity operator*(double k, Quantity a) { return Quantity{k * a.value_}; }
  friend constexpr Quantity operator/(Quantity a, double k) { return Quantity{a.value_ / k}; }
  friend constexpr auto operator<=>(Quantity a, Quantity b) { return a.value_ <=> b.value_; }
  friend constexpr bool operator==(Quantity a, Quantity b) { return a.value_ == b.value_; }

 private:
  double value_ = 0.0;
};

template <Dimension A, Dimension B>
constexpr Quantity<A + B> operator*(Quantity<A> a, Quantity<B> b) {
  return Quantity<A + B>{a.si() * b.si()};
}

template <Dimension A, Dimension B>
constexpr Quantity<A - B> operator/(Quantity<A> a, Quantity<B> b) {
  return Quantity<A - B>{a.si() / b.si()};
}

template <Dimension D>
constexpr Quantity<kDimensionless - D> operator/(double k, Quantity<D> q) {
  return Quantity<kDimensionless - D>{k / q.si()};
}

template <Dimension D>
  requires(D.divisible_by(2))
Quantity<D.divided(2)> sqrt(Quantity<D> q) {
  return Quantity<D.divided(2)>{std::sqrt(q.si())};
}

template <Dimension D>
  requires(D.divisible_by(3))
Quantity<D.divided(3)> cbrt(Quantity<D> q) {
  return Quantity<D.divided(3)>{std::cbrt(q.si())};
}

template <int N, Dimension D>
Quantity<D.scaled(N)> pow(Quantity<D> q) {
  return Quantity<D.scaled(N)>{std::pow(q.si(), N)};
}

template <Dimension D>
Quantity<D> abs(Quantity<D> q) {
  return Quantity<D>{std::fabs(q.si())};
}

template <Dimension D>
bool isfinite(Quantity<D> q) {
  return std::isfinite(q.si());
}

using Dimensionless = Quantity<kDimensionless>;
using Mass = Quantity<Dimension{1, 0, 0, 0}>;
using Length = Quantity<Dimension{0, 1, 0, 0}>;
using Time = Quantity<Dimension{0, 0, 1, 0}>;
using Temperature = Quantity<Dimension{0, 0, 0, 1}>;
/// Hz. Used for decoherence rates and angular frequencies alike.
using Rate = Quantity<Dimension{0, 0, -1, 0}>;
using Area = Quantity<Dimension{0, 2, 0, 0}>;
using Volume = Quantity<Dimension{0, 3, 0, 0}>;
using Velocity = Quantity<Dimension{0, 1, -1, 0}>;
using Momentum = Quantity<Dimension{1, 1, -1, 0}>;
using MomentumSq = Quantity<Dimension{2, 2, -2, 0}>;
/// kg m^2/s: both the action unit of hbar and the x-p covariance c.
using Action = Quantity<Dimension{1, 2, -1, 0}>;
using ActionSq = Quantity<Dimension{2, 4, -2, 0}>;
using Energy = Quantity<Dimension{1, 2, -2, 0}>;
using Pressure = Quantity<Dimension{1, -1, -2, 0}>;
using Density = Quantity<Dimension{1, -3, 0, 0}>;
/// Hz/m^2, the long-wavelength localization parameter.
using LocalizationRate = Quantity<Dimension{0, -2, -1, 0}>;
/// m^2/Hz, displacement power spectral density.
using Psd = Quantity<Dimension{0, 2, 1, 0}>;
using HeatCapacity = Quantity<Dimension{1, 2, -2, -1}>;
using GravitationalCoupling = Quantity<Dimension{-1, 3, -2, 0}>;

// CODATA 2018.
struct Constants {
  Action hbar;
  HeatCapacity boltzmann;
  Velocity light_speed;
  GravitationalCoupling gravitational_constant;
  Mass amu;
};

inline constexpr Constants codata2018{
    Action{1.054571817e-34},
    HeatCapacity{1.380649e-23},
    Velocity{299792458.0},
    GravitationalCoupling{6.67430e-11},
    Mass{1.66053906660e-27},
};

inline constexpr double kPi = 3.141592653589793238462643383279502884;

namespace units {
inline constexpr Mass kg{1.0};
inline constexpr Mass amu = codata2018.amu;
inline constexpr Length m{1.0};
inline constexpr Length mm{1e-3};
inline constexpr Length um{1e-6};
inline constexpr Length nm{1e-9};
inline constexpr Time s{1.0};
inline constexpr Rate Hz{1.0};
inline constexpr Temperature K{1.0};
inline constexpr Temperature mK{1e-3};
inline constexpr Pressure Pa{1.0};
inline constexpr Pressure mbar{100.0};
inline constexpr Density kg_per_m3{1.0};
inline constexpr Psd m2_per_Hz{1.0};
inline constexpr LocalizationRate Hz_per_m2{1.0};
}  // namespace units

/// Runtime-dimensioned scalar for I/O boundaries.
struct PhysicalQuantity {
  double value = 0.0;  // SI
  Dimension dimension{};

  constexpr PhysicalQuantity() = default;
  constexpr PhysicalQuantity(double si_value, Dimension dim) : value(si_value), dimension(dim) {}
  template <Dimension D>
  constexpr PhysicalQuantity(Quantity<D> q) : value(q.si()), dimension(D) {}

  /// Throws UnitError unless the runtime dimension equals D.
  template <Dimension D>
  Quantity<D> as() const {
    if (dimension != D)
      throw UnitError("dimension mismatch: have " + to_string(dimension) + ", need " + to_string(D));
    return Quantity<D>{value};
  }
};

PhysicalQuantity operator+(const PhysicalQuantity& a, const PhysicalQuantity& b);
PhysicalQuantity operator-(const PhysicalQuantity& a, const PhysicalQuantity& b);
PhysicalQuantity operator*(const PhysicalQuantity& a, const PhysicalQuantity& b);
PhysicalQuantity operator/(const PhysicalQuantity& a, const PhysicalQuantity& b);

struct UnitInfo {
  std::string_view name;
  double scale;  // SI value of one unit
  Dimension dimension;
};

/// Throws UnitError for unknown names.
const UnitInfo& lookup_unit(std::string_view name);

PhysicalQuantity from_unit(double value, std::string_view unit);

/// Numeric value of q expressed in `unit`; UnitError on dimension mismatch.
double convert(const PhysicalQuantity& q, std::string_view unit);

/// Homogeneous sphere, (4 pi / 3) rho R^3.
Mass sphere_mass(Length radius, Density density);

}  // namespace cisim
