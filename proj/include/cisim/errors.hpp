#pragma once

#include <stdexcept>
#include <string>

namespace cisim {

enum class ErrorKind {
  Domain,         // input outside an operation's domain
  Unit,           // dimension mismatch or unknown unit name
  Resolution,     // sampling grid cannot resolve the requested pattern
  OverflowGuard,  // inverted-potential exponent cap exceeded
  Parse,          // malformed configuration
  Consistency,    // internal invariant broken (e.g. Heisenberg on output)
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define CISIM_DEFINE_ERROR(Name, Kind)                                  \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

CISIM_DEFINE_ERROR(DomainError, Domain)
CISIM_DEFINE_ERROR(UnitError, Unit)
CISIM_DEFINE_ERROR(ResolutionError, Resolution)
CISIM_DEFINE_ERROR(OverflowGuardError, OverflowGuard)
CISIM_DEFINE_ERROR(ParseError, Parse)
CISIM_DEFINE_ERROR(ConsistencyError, Consistency)

#undef CISIM_DEFINE_ERROR

}  // namespace cisim
