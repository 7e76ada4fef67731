// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace wlanpace {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A rate vector violates w'x < 1 (or has a negative component).
class InfeasibleRateError : public Error {
 public:
  InfeasibleRateError(const std::string& what, double airtime)
      : Error(what), airtime_(airtime) {}
  double airtime() const { return airtime_; }

 private:
  double airtime_;
};

/// Mean delay requested for a station with zero send rate.
class UndefinedDelayError : public Error {
 public:
  UndefinedDelayError(const std::string& what, std::size_t station)
      : Error(what), station_(station) {}
  std::size_t station() const { return station_; }

 private:
  std::size_t station_;
};

/// Unknown (MCS, NSS) combination in the VHT rate table.
class McsLookupError : public Error {
 public:
  using Error::Error;
};

/// Vector lengths disagree with the configured station count.
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

/// Candidate solution violates a constraint of the rate-allocation problem.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

/// Brute-force oracle invoked above its supported problem size.
class UnsupportedSizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value; message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wlanpace
