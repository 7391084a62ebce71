#pragma once

#include <optional>

#include "nibt/common.hpp"
#include "nibt/variant.hpp"

namespace nibt {

// Transfer-function samples on the imaginary axis. Right points sigma_i =
// j*right_freqs[i], left points mu_i = j*left_freqs[i]. Derivative vectors
// are either empty or aligned with their frequency list.
struct SampleSet {
  std::vector<double> right_freqs;
  std::vector<CMat> right_samples;
  std::vector<CMat> right_derivs;
  std::vector<double> left_freqs;
  std::vector<CMat> left_samples;
  std::vector<CMat> left_derivs;
  Mat D;
  bool conjugate_closed = false;
  bool derivatives_approximate = false;

  int m() const { return static_cast<int>(D.cols()); }
  int p() const { return static_cast<int>(D.rows()); }
  int ns() const { return static_cast<int>(right_freqs.size()); }
  int nu() const { return static_cast<int>(left_freqs.size()); }

  bool matched() const;
  bool has_derivatives() const;

  // G = H - D on either grid.
  CMat right_G(int i) const { return right_samples[i] - D.cast<cplx>(); }
  CMat left_G(int i) const { return left_samples[i] - D.cast<cplx>(); }

  // H'(j w) for a right/left point, looking in both derivative lists for a
  // coincident frequency. Empty optional when unavailable.
  std::optional<CMat> derivative_at(double omega) const;

  // Throws ValidationError on shape mismatch, non-finite values or
  // repeated frequencies.
  void check() const;

  // Left grid = right grid.
  static SampleSet matched_grid(std::vector<double> freqs,
                                std::vector<CMat> samples,
                                std::vector<CMat> derivs, Mat D);
};

struct InterpolationGrid {
  std::vector<double> omega;
  double eps = 1e-4;

  int ns() const { return static_cast<int>(omega.size()); }
  double delta_min() const;
  cplx sigma(int i) const { return kJ * omega[i]; }
  cplx lambda(int i) const { return cplx(-eps, omega[i]); }
};

double delta_min(const std::vector<double>& freqs);

SampleSet conjugate_close(const SampleSet& samples);

struct Diagnostics {
  bool ok = true;
  bool approximate_derivatives = false;
  std::vector<std::string> reasons;
};

Diagnostics validate_for_variant(const SampleSet& samples,
                                 const VariantConfig& cfg);

// Fill missing derivatives with nonuniform three-point differences over
// neighbouring samples of the same grid.
SampleSet with_approximate_derivatives(const SampleSet& samples);

}  // namespace nibt
