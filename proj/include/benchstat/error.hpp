#pragma once

#include <stdexcept>
#include <string>

namespace benchstat
{

/// Bad user input: malformed files, contract violations on arguments.
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Internal numerical failure (non-finite likelihood, failed factorization).
/// The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

}  // namespace benchstat
