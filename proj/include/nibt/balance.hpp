#pragma once

#include "nibt/loewner.hpp"
#include "nibt/weights.hpp"

namespace nibt {

struct ReducedModel {
  CMat A, B, C;
  Mat D;
  Vec sigma;  // full singular spectrum of the balancing SVD, descending

  int r() const { return static_cast<int>(A.rows()); }
  CVec poles() const;
  int unstable_count() const;
};

// Orders 1..max are admissible when sigma_r > max(ns,nu) * eps_mach * sigma_1.
int max_admissible_order(const Vec& sigma, int ns, int nu);
// Smallest r with sigma_{r+1}/sigma_1 < tol.
int auto_order(const Vec& sigma, double tol = 1e-8);

// Square-root balancing of Zq^* L Zp. r <= 0 selects `auto_order`.
ReducedModel balance_reduce(const LoewnerQuadruplet& quad,
                            const GramianFactors& factors, int r);

// Same with explicit dense factors (tests, identity weights).
ReducedModel balance_reduce(const LoewnerQuadruplet& quad, const CMat& Zp,
                            const CMat& Zq, int r);

CMat evaluate_rom(const ReducedModel& rom, double omega);
std::vector<CMat> evaluate_rom(const ReducedModel& rom,
                               const std::vector<double>& freqs);

// Deviation of H~ from the samples (and derivatives at coincident points).
InterpolationReport interpolation_check(const ReducedModel& rom, const SampleSet& samples);

// Reflect eigenvalues with positive real part across the imaginary axis.
ReducedModel flip_unstable(const ReducedModel& rom);

}  // namespace nibt
