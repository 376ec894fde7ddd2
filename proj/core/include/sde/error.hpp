#pragma once

#include <stdexcept>
#include <string>

namespace sde {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (negative face value,
/// type outside the support, efficiency outside (0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Zero-profit collateral is undefined because the contract carries no default risk.
class NoDefaultRisk : public Error {
 public:
  using Error::Error;
};

/// The face value alone over-repays the financier; zero profit would need m < 0.
class OverRepaid : public Error {
 public:
  using Error::Error;
};

/// A pool carries (numerically) zero probability mass.
class DegeneratePool : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class NoConvergence : public Error {
 public:
  using Error::Error;
};

class AllUnfinanceable : public Error {
 public:
  using Error::Error;
};

class MarketUnravels : public Error {
 public:
  using Error::Error;
};

class NoFeasiblePoint : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sde
