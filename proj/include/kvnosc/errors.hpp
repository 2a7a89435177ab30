#pragma once

#include <stdexcept>
#include <string>

namespace kvnosc {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain (t before a profile's start, rho <= 0, |theta| >= pi/2).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Tabulated profile queried outside its knot range.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

// Closed form requested for a profile that has none.
class UnsupportedProfile : public Error {
 public:
  using Error::Error;
};

// rho fell below the collapse floor during integration.
class RhoCollapse : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Generator is not a linear first-order advection field.
class NotAdvection : public Error {
 public:
  using Error::Error;
};

// Classical invariant vanishes at t=0, so relative drift is undefined.
class DegenerateInvariant : public Error {
 public:
  using Error::Error;
};

}  // namespace kvnosc
