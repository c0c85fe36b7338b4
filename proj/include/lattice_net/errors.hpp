#pragma once

#include <stdexcept>
#include <string>

namespace lattice_net {

// 64-bit intermediate would not fit.
struct OverflowError : std::overflow_error {
  explicit OverflowError(const std::string& what) : std::overflow_error(what) {}
};

struct SingularMatrixError : std::domain_error {
  explicit SingularMatrixError(const std::string& what) : std::domain_error(what) {}
};

struct PreconditionError : std::invalid_argument {
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

struct UnsupportedError : std::runtime_error {
  explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

// Requested computation exceeds the configured size caps.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace lattice_net
