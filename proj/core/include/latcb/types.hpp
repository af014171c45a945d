#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace latcb {

// Small vectors and matrices with a runtime dimension d <= 3. The fixed
// maximum keeps them on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using IVec = Eigen::Matrix<int, Eigen::Dynamic, 1, 0, 3, 1>;

inline constexpr int kMaxDim = 3;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stencil left the admissible set D_kappa, i.e. |g_rho| / |rho| > kappa.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent experiment / object configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver failed to converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// A configuration or solution was found to be unstable.
class StabilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace latcb
