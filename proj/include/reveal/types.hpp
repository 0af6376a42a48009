#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <stdexcept>

namespace reveal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Malformed arguments: dimension mismatches, out-of-range indices, non-finite data.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A run or experiment configuration that cannot be executed.
class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The instance has no spread in best-context rewards (u_max == u_min).
class DegenerateInstance : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Absolute slack for every feasibility comparison on accumulated quantities.
inline constexpr double kFeasibilityTol = 1e-9;

}  // namespace reveal
