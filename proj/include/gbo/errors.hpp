#pragma once

#include <stdexcept>
#include <string>

namespace gbo {

// Linear algebra gave up (factorization failure after jitter escalation, all
// grid points failing, ...).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// The neighborhood graph fell apart into components; the caller should retry
// with a larger connectivity radius.
struct ConnectivityError : std::runtime_error {
  explicit ConnectivityError(const std::string& what) : std::runtime_error(what) {}
};

// No unvisited candidate left to query.
struct ExhaustionError : std::runtime_error {
  explicit ExhaustionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gbo
