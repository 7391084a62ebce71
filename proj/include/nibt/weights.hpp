#pragma once

#include "nibt/data.hpp"
#include "nibt/variant.hpp"

namespace nibt {

// Block-diagonal factors Zp (right grid, m x m blocks) and Zq (left grid,
// p x p blocks).
struct GramianFactors {
  VariantConfig cfg;
  std::vector<CMat> zp;
  std::vector<CMat> zq;
  // Spectral radius of alpha*beta per point, where the variant has one.
  std::vector<double> rho_p;
  std::vector<double> rho_q;
  bool approximate = false;

  CMat Zp() const;
  CMat Zq() const;
  // Zq^* M Zp without forming the dense factors.
  CMat weigh(const CMat& M) const;
  CMat left_apply_adjoint(const CMat& M) const;  // Zq^* M
  CMat right_apply(const CMat& M) const;         // M Zp
};

GramianFactors compute_factors(const SampleSet& samples, const VariantConfig& cfg);

GramianFactors bt_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors flbt_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors tlbt_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors swbt_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors lqg_hinf_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors prbt_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors brbt_factors(const SampleSet& samples, const VariantConfig& cfg);
GramianFactors bst_factors(const SampleSet& samples, const VariantConfig& cfg);

// L(a, w) = (j/2pi) Log((jw + a)/(-jw + a)), principal branch; L(a, 0) = 0
// and L(a, inf) = 1/2 sign-consistently for Re a < 0.
cplx flbt_L(cplx a, double w);
cplx flbt_L_band(cplx a, double w1, double w2);

// eps * alpha^{-1} (I - (I - alpha beta)^{1/2}), evaluated as
// eps * beta (I + (I - alpha beta)^{1/2})^{-1}. `rho` receives the spectral
// radius of alpha*beta. Throws InfeasibleError when it exceeds one.
CMat riccati_block(const CMat& alpha, const CMat& beta, double eps, double* rho);

// Hermitian PSD square root factor F with F F^* = block. Negative
// eigenvalues below -1e-12*||block|| are an InfeasibleError.
CMat psd_factor(const CMat& block);

// Scalar map of the LQG/Hinf blocks: eps (sqrt(1+theta s) - 1)/(theta s).
double lqg_map(double s, double theta, double eps);

}  // namespace nibt
