#pragma once

#include <random>

#include "nibt/model.hpp"

namespace nibt::helpers {

inline double rel(const CMat& a, const CMat& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

inline CMat random_cmat(std::mt19937& g, int r, int c) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = cplx(n(g), n(g));
  return M;
}

inline Mat random_mat(std::mt19937& g, int r, int c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = n(g);
  return M;
}

// Random matrix shifted so that every eigenvalue has real part <= -margin.
inline Mat random_hurwitz(std::mt19937& g, int n, double margin = 0.5) {
  Mat A = random_mat(g, n, n);
  Eigen::EigenSolver<Mat> es(A, false);
  const double mx = es.eigenvalues().real().maxCoeff();
  return A - (mx + margin) * Mat::Identity(n, n);
}

inline CMat random_hurwitz_c(std::mt19937& g, int n, double margin = 0.5) {
  CMat A = random_cmat(g, n, n);
  Eigen::ComplexEigenSolver<CMat> es(A, false);
  const double mx = es.eigenvalues().real().maxCoeff();
  return A - (mx + margin) * CMat::Identity(n, n);
}

// Square SISO modal model with ||G||_inf = 0.4 and D = 0.5.
inline StateSpaceModel protocol_modal(int order, unsigned seed = 1) {
  Modal m;
  m.num_modes = order / 2;
  m.freq_lo = 0.5;
  m.freq_hi = 500.0;
  m.damping_ratio = 0.02;
  m.seed = seed;
  return normalize_model(generate_model(m), 0.4, 0.5);
}

}  // namespace nibt::helpers
