// Copyright 2026 The discovery authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace discovery {

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad configuration values, unsupported k, malformed
/// model strings, populations that violate a precondition.
class ConfigError : public Error
{
  public:
    using Error::Error;
};

/// A least-squares fit could not be carried out (rank deficiency, exact fit).
class FitError : public Error
{
  public:
    using Error::Error;
};

/// Data generation produced a degenerate sample.
class GenerationError : public Error
{
  public:
    using Error::Error;
};

/// Numerical analysis of a transition matrix failed.
class AnalysisError : public Error
{
  public:
    using Error::Error;
};

/// Monte Carlo estimation failed (too many fit failures).
class EstimationError : public Error
{
  public:
    using Error::Error;
};

/// Filesystem or parse failure on persisted artifacts.
class IoError : public Error
{
  public:
    using Error::Error;
};

} // namespace discovery
