#pragma once

#include <iosfwd>

#include "nibt/data.hpp"

namespace nibt {

struct LoewnerQuadruplet {
  CMat L;     // (p*nu) x (m*ns)
  CMat Ls;    // (p*nu) x (m*ns)
  CMat Bhat;  // (p*nu) x m
  CMat Chat;  // p x (m*ns)
  Mat D;
  std::vector<double> right_freqs;
  std::vector<double> left_freqs;

  int m() const { return static_cast<int>(D.cols()); }
  int p() const { return static_cast<int>(D.rows()); }
};

LoewnerQuadruplet build_loewner(const SampleSet& samples);

struct InterpolationReport {
  double max_deviation = 0.0;
  double max_derivative_deviation = 0.0;
  double worst_frequency = 0.0;
};

// H~(s) = Chat (sL - Ls)^{-1} Bhat + D checked at every sample point and,
// at coincident points, H~' against H'.
InterpolationReport interpolation_check(const LoewnerQuadruplet& quad,
                                        const SampleSet& samples);

void write_quadruplet_binary(std::ostream& out, const LoewnerQuadruplet& quad);
LoewnerQuadruplet read_quadruplet_binary(std::istream& in);

}  // namespace nibt
