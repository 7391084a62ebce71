#pragma once

#include <optional>
#include <variant>

#include <Eigen/Eigenvalues>

#include "nibt/common.hpp"

namespace nibt {

struct SampleSet;

struct StateSpaceModel {
  Mat A, B, C, D;

  int n() const { return static_cast<int>(A.rows()); }
  int m() const { return static_cast<int>(B.cols()); }
  int p() const { return static_cast<int>(C.rows()); }

  // Throws ValidationError on inconsistent shapes or non-finite entries.
  void check() const;
};

bool is_hurwitz(const Mat& A);

struct RlcLadder {
  int sections = 1;
  double R = 0.1;
  double Lind = 0.1;
  double Cap = 0.1;
  double Rload = 1.0;
  double feedthrough = 0.0;
};

struct Modal {
  int num_modes = 1;
  double freq_lo = 1.0;
  double freq_hi = 1.0;
  double damping_ratio = 0.01;
  unsigned seed = 0;
  std::optional<double> zero_dip_at;
  double feedthrough = 0.0;
};

using ModelKind = std::variant<RlcLadder, Modal>;

StateSpaceModel generate_model(const ModelKind& kind);

// Rescale C so that the peak gain of G = H - D over a dense grid equals
// `target`, then set D = feedthrough * I (square systems only).
StateSpaceModel normalize_model(const StateSpaceModel& model, double target,
                                double feedthrough);

// Frequency response via a one-time Hessenberg reduction; each evaluation
// is O(n^2).
class FrequencyResponse {
 public:
  explicit FrequencyResponse(const StateSpaceModel& model);

  CMat H(double omega) const;
  CMat G(double omega) const;
  // H'(s) = -C (sI - A)^{-2} B at s = j*omega.
  CMat dH(double omega) const;
  // Largest singular value of G over the grid.
  double peak_gain(const std::vector<double>& omegas) const;

  const StateSpaceModel& model() const { return model_; }

 private:
  CMat resolvent_solve(double omega, const CMat& rhs) const;

  StateSpaceModel model_;
  Mat Hess_;
  CMat QtB_;
  CMat CQ_;
};

SampleSet sample_transfer(const StateSpaceModel& model,
                          const std::vector<double>& freqs,
                          bool with_derivative);

// Log grid that also hits the imaginary parts of the poles.
std::vector<double> peak_search_grid(const StateSpaceModel& model, int count);

}  // namespace nibt
