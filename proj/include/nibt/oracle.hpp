#pragma once

#include "nibt/balance.hpp"
#include "nibt/model.hpp"
#include "nibt/variant.hpp"

namespace nibt {

// A X + X B + C = 0 by complex Schur forms of A and B (Bartels-Stewart).
// Falls back to the Kronecker system for tiny problems when the Schur path
// fails its residual check.
CMat solve_sylvester(const CMat& A, const CMat& B, const CMat& C);
// A X + X A^* + RHS = 0.
CMat solve_lyapunov(const CMat& A, const CMat& RHS);
Mat solve_lyapunov(const Mat& A, const Mat& RHS);
CMat solve_sylvester_kronecker(const CMat& A, const CMat& B, const CMat& C);

// ||AX + XB + C|| / ((||A|| + ||B||) ||X|| + ||C||), Frobenius norms.
double sylvester_residual(const CMat& A, const CMat& B, const CMat& C,
                          const CMat& X);

struct CareSolution {
  CMat X;
  double residual = 0.0;  // relative to ||R|| + 2||A|| ||X|| + ||S|| ||X||^2
  int newton_steps = 0;
  CVec closed_loop_poles;
};

// Stabilizing X of A^* X + X A + R - X S X = 0.
CareSolution solve_care(const CMat& A, const CMat& S, const CMat& R);
double care_residual(const CMat& A, const CMat& S, const CMat& R, const CMat& X);

CMat matrix_exp(const CMat& M);
CMat matrix_log(const CMat& M);

// L_Omega(A) = L(A, w2) - L(A, w1) with L(A, w) = (j/2pi) Log((jwI + A)(-jwI + A)^{-1}).
CMat flbt_L_matrix(const Mat& A, double w1, double w2);

struct GramianPair {
  Mat P;
  Mat Q;
  VariantConfig cfg;
  double residual_p = 0.0;
  double residual_q = 0.0;
};

// FLBT or TLBT Gramians.
GramianPair limited_gramians(const StateSpaceModel& model, const VariantConfig& cfg);
// Gramian pair for any of the nine variants.
GramianPair variant_gramians(const StateSpaceModel& model, const VariantConfig& cfg);

// Square-root balancing with Hermitian factors of a Gramian pair.
class IntrusiveBalancer {
 public:
  IntrusiveBalancer(const StateSpaceModel& model, const GramianPair& gramians);

  // sqrt(lambda(PQ)), descending.
  const Vec& hankel_values() const { return hsv_; }
  ReducedModel reduce(int r) const;

 private:
  StateSpaceModel model_;
  Mat Lp_, Lq_;
  Mat U_, V_;
  Vec hsv_;
};

struct IntrusiveResult {
  ReducedModel rom;
  Vec hsv;
};

IntrusiveResult intrusive_reduce(const StateSpaceModel& model,
                                 const VariantConfig& cfg, int r);

// Hermitian PSD factor L with L L^T = X (eigenvalues clipped at zero).
Mat psd_sqrt_factor(const Mat& X);

}  // namespace nibt
