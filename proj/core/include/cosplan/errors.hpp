// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace cosplan {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (JSON syntax, missing key, non-finite number).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a domain invariant (inverted bounds, open ring).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Bad configuration value or unknown name.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Allocation would exceed a configured budget.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// A planner could not produce a trajectory for a scenario.
class PlanningError : public Error {
 public:
  using Error::Error;
};

/// Endpoint sampling exhausted its retries; the scenario should be skipped.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace cosplan
