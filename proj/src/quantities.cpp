#include "cisim/quantities.hpp"

#include <array>
#include <sstream>

namespace cisim {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Unit: return "unit";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::OverflowGuard: return "overflow_guard";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Consistency: return "consistency";
  }
  return "unknown";
}

std::string to_string(Dimension d) {
  std::ostringstream os;
  os << "kg^" << d.kg << " m^" << d.m << " s^" << d.s << " K^" << d.K;
  return os.str();
}

namespace {

constexpr std::array kUnits{
    UnitInfo{"kg", 1.0, Mass::dimension},
    UnitInfo{"amu", codata2018.amu.si(), Mass::dimension},
    UnitInfo{"m", 1.0, Length::dimension},
    UnitInfo{"mm", 1e-3, Length::dimension},
    UnitInfo{"um", 1e-6, Length::dimension},
    UnitInfo{"nm", 1e-9, Length::dimension},
    UnitInfo{"s", 1.0, Time::dimension},
    UnitInfo{"ms", 1e-3, Time::dimension},
    UnitInfo{"us", 1e-6, Time::dimension},
    UnitInfo{"Hz", 1.0, Rate::dimension},
    UnitInfo{"K", 1.0, Temperature::dimension},
    UnitInfo{"mK", 1e-3, Temperature::dimension},
    UnitInfo{"Pa", 1.0, Pressure::dimension},
    UnitInfo{"mbar", 100.0, Pressure::dimension},
    UnitInfo{"m2_per_Hz", 1.0, Psd::dimension},
    UnitInfo{"Hz_per_m2", 1.0, LocalizationRate::dimension},
    UnitInfo{"kg_per_m3", 1.0, Density::dimension},
    UnitInfo{"m_per_s", 1.0, Velocity::dimension},
    UnitInfo{"nm_per_s", 1e-9, Velocity::dimension},
};

void require_same(const PhysicalQuantity& a, const PhysicalQuantity& b, const char* op) {
  if (a.dimension != b.dimension)
    throw UnitError(std::string("cannot ") + op + " " + to_string(a.dimension) + " and " +
                    to_string(b.dimension));
}

}  // namespace

PhysicalQuantity operator+(const PhysicalQuantity& a, const PhysicalQuantity& b) {
  require_same(a, b, "add");
  return {a.value + b.value, a.dimension};
}

PhysicalQuantity operator-(const PhysicalQuantity& a, const PhysicalQuantity& b) {
  require_same(a, b, "subtract");
  return {a.value - b.value, a.dimension};
}

PhysicalQuantity operator*(const PhysicalQuantity& a, const PhysicalQuantity& b) {
  return {a.value * b.value, a.dimension + b.dimension};
}

PhysicalQuantity operator/(const PhysicalQuantity& a, const PhysicalQuantity& b) {
  return {a.value / b.value, a.dimension - b.dimension};
}

const UnitInfo& lookup_unit(std::string_view name) {
  for (const auto& u : kUnits)
    if (u.name == name) return u;
  throw UnitError("unknown unit '" + std::string(name) + "'");
}

PhysicalQuantity from_unit(double value, std::string_view unit) {
  const auto& u = lookup_unit(unit);
  return {value * u.scale, u.dimension};
}

double convert(const PhysicalQuantity& q, std::string_view unit) {
  const auto& u = lookup_unit(unit);
  if (u.dimension != q.dimension)
    throw UnitError("cannot express " + to_string(q.dimension) + " in '" + std::string(unit) + "'");
  return q.value / u.scale;
}

Mass sphere_mass(Length radius, Density density) {
  if (!(radius.si() > 0.0) || !(density.si() > 0.0))
    throw DomainError("sphere_mass: radius and density must be positive");
  return (4.0 * kPi / 3.0) * density * (radius * radius * radius);
}

}  // namespace cisim
