#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nibt {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr cplx kJ{0.0, 1.0};

// Bad input: malformed files, violated preconditions, inconsistent flags.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The data or model is well formed but the requested computation has no
// (stable, unique, finite) answer.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Requested truncation order exceeds the numerical rank.
class RankError : public InfeasibleError {
 public:
  RankError(const std::string& what, int max_order)
      : InfeasibleError(what), max_order_(max_order) {}
  int max_order() const { return max_order_; }

 private:
  int max_order_;
};

// "Coincident" frequencies in rad/s.
inline bool coincident(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

std::vector<double> logspace(double lo_exp, double hi_exp, int count);

}  // namespace nibt
