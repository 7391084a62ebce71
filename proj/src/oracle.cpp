#include "nibt/oracle.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace nibt {

namespace {

constexpr double kMach = std::numeric_limits<double>::epsilon();

double fro(const CMat& M) { return M.norm(); }

void clash(const char* where) {
  throw InfeasibleError(std::string(where) + ": spectra clash, no unique solution");
}

CMat hermitian_part(const CMat& X) { return 0.5 * (X + X.adjoint()); }

lapack_logical stable_z(const lapack_complex_double* z) { return z->real() < 0; }
lapack_logical stable_d(const double* re, const double*) { return *re < 0; }

// M = U T U^*; with `sort` the eigenvalues in the open left half-plane lead.
void complex_schur(const CMat& M, CMat& T, CMat& U, bool sort, lapack_int* sdim = nullptr) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  T = M;
  U.resize(n, n);
  CVec w(n);
  lapack_int sd = 0;
  const lapack_int info = LAPACKE_zgees(LAPACK_COL_MAJOR, 'V', sort ? 'S' : 'N',
                                        sort ? stable_z : nullptr, n, T.data(), n, &sd, w.data(),
                                        U.data(), n);
  if (info != 0) throw InfeasibleError("complex Schur decomposition failed");
  if (sdim) *sdim = sd;
}

}  // namespace

double sylvester_residual(const CMat& A, const CMat& B, const CMat& C, const CMat& X) {
  const double scale = (fro(A) + fro(B)) * fro(X) + fro(C);
  return fro(A * X + X * B + C) / std::max(scale, std::numeric_limits<double>::min());
}

CMat solve_sylvester_kronecker(const CMat& A, const CMat& B, const CMat& C) {
  const Eigen::Index n = A.rows(), m = B.rows();
  const CMat In = CMat::Identity(n, n), Im = CMat::Identity(m, m);
  CMat K(n * m, n * m);
  // vec(AX + XB) = (I (x) A + B^T (x) I) vec(X)
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index l = 0; l < m; ++l) {
      CMat blk = B(l, j) * In;
      if (j == l) blk += A;
      K.block(j * n, l * n, n, n) = blk;
    }
  Eigen::FullPivLU<CMat> lu(K);
  if (!lu.isInvertible()) clash("sylvester (kronecker)");
  const CVec x = lu.solve(-C.reshaped());
  return x.reshaped(n, m);
}

namespace {

// T Y + Y S = -F with T, S upper triangular.
CMat triangular_sylvester(const CMat& T, const CMat& S, const CMat& F) {
  const Eigen::Index n = T.rows(), m = S.rows();
  const double scale = std::max({T.cwiseAbs().maxCoeff(), S.cwiseAbs().maxCoeff(), 1e-300});
  CMat Y(n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    CVec rhs = -F.col(k);
    if (k > 0) rhs -= Y.leftCols(k) * S.col(k).head(k);
    CMat M = T;
    M.diagonal().array() += S(k, k);
    if (M.diagonal().cwiseAbs().minCoeff() <= 10 * kMach * scale) clash("sylvester");
    Y.col(k) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  return Y;
}

// T Y + Y T^* = -F with T upper triangular; columns from the right.
CMat triangular_lyapunov(const CMat& T, const CMat& F) {
  const Eigen::Index n = T.rows();
  const double scale = std::max(T.cwiseAbs().maxCoeff(), 1e-300);
  CMat Y(n, n);
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    CVec rhs = -F.col(k);
    const Eigen::Index tail = n - k - 1;
    if (tail > 0) rhs -= Y.rightCols(tail) * T.row(k).tail(tail).adjoint();
    CMat M = T;
    M.diagonal().array() += std::conj(T(k, k));
    if (M.diagonal().cwiseAbs().minCoeff() <= 10 * kMach * scale) clash("lyapunov");
    Y.col(k) = M.triangularView<Eigen::Upper>().solve(rhs);
  }
  return Y;
}

}  // namespace

CMat solve_sylvester(const CMat& A, const CMat& B, const CMat& C) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || C.rows() != A.rows() || C.cols() != B.rows())
    throw ValidationError("sylvester: incompatible shapes");
  if (!A.allFinite() || !B.allFinite() || !C.allFinite())
    throw ValidationError("sylvester: non-finite input");
  CMat X;
  try {
    CMat Ta, Ua, Tb, Ub;
    complex_schur(A, Ta, Ua, false);
    complex_schur(B, Tb, Ub, false);
    const CMat Y = triangular_sylvester(Ta, Tb, Ua.adjoint() * C * Ub);
    X = Ua * Y * Ub.adjoint();
  } catch (const InfeasibleError&) {
    if (A.rows() > 30 || B.rows() > 30) throw;
  }
  if (X.size() == 0 || !(sylvester_residual(A, B, C, X) <= 1e-8)) {
    if (A.rows() <= 30 && B.rows() <= 30) X = solve_sylvester_kronecker(A, B, C);
    if (!(sylvester_residual(A, B, C, X) <= 1e-8))
      throw InfeasibleError("sylvester: residual certificate failed (nearly singular operator)");
  }
  return X;
}

CMat solve_lyapunov(const CMat& A, const CMat& RHS) {
  if (A.rows() != A.cols() || RHS.rows() != A.rows() || RHS.cols() != A.rows())
    throw ValidationError("lyapunov: incompatible shapes");
  if (!A.allFinite() || !RHS.allFinite()) throw ValidationError("lyapunov: non-finite input");
  const bool herm = (RHS - RHS.adjoint()).norm() <= 1e-14 * std::max(RHS.norm(), 1e-300);
  CMat X;
  const CMat Aa = A.adjoint();
  try {
    CMat T, U;
    complex_schur(A, T, U, false);
    const CMat Y = triangular_lyapunov(T, U.adjoint() * RHS * U);
    X = U * Y * U.adjoint();
    if (herm) X = hermitian_part(X);
  } catch (const InfeasibleError&) {
    if (A.rows() > 30) throw;
  }
  if (X.size() == 0 || !(sylvester_residual(A, Aa, RHS, X) <= 1e-8)) {
    if (A.rows() <= 30) {
      X = solve_sylvester_kronecker(A, Aa, RHS);
      if (herm) X = hermitian_part(X);
    }
    if (!(sylvester_residual(A, Aa, RHS, X) <= 1e-8))
      throw InfeasibleError("lyapunov: residual certificate failed (nearly singular operator)");
  }
  return X;
}

Mat solve_lyapunov(const Mat& A, const Mat& RHS) {
  return solve_lyapunov(CMat(A.cast<cplx>()), CMat(RHS.cast<cplx>())).real();
}

double care_residual(const CMat& A, const CMat& S, const CMat& R, const CMat& X) {
  const CMat res = A.adjoint() * X + X * A + R - X * S * X;
  const double xn = X.norm();
  const double scale = R.norm() + 2 * A.norm() * xn + S.norm() * xn * xn;
  return res.norm() / std::max(scale, std::numeric_limits<double>::min());
}

CareSolution solve_care(const CMat& A, const CMat& S, const CMat& R) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || S.rows() != n || S.cols() != n || R.rows() != n || R.cols() != n)
    throw ValidationError("care: incompatible shapes");
  if (!A.allFinite() || !S.allFinite() || !R.allFinite())
    throw ValidationError("care: non-finite input");
  // Stable invariant subspace of the Hamiltonian [[A, -S], [-R, -A^*]] from an
  // ordered Schur form; real data stay in real arithmetic.
  const bool real = A.imag().isZero(0.0) && S.imag().isZero(0.0) && R.imag().isZero(0.0);
  const lapack_int n2 = static_cast<lapack_int>(2 * n);
  lapack_int sdim = 0;
  CVec ev(2 * n);
  CMat U1, U2;
  if (real) {
    Mat T(2 * n, 2 * n), V(2 * n, 2 * n);
    T << A.real(), -S.real(), -R.real(), -A.real().transpose();
    std::vector<double> wr(2 * n), wi(2 * n);
    const lapack_int info = LAPACKE_dgees(LAPACK_COL_MAJOR, 'V', 'S', stable_d, n2, T.data(), n2,
                                          &sdim, wr.data(), wi.data(), V.data(), n2);
    if (info != 0 && info != n2 + 2) throw InfeasibleError("care: Schur decomposition failed");
    for (Eigen::Index i = 0; i < 2 * n; ++i) ev(i) = cplx(wr[i], wi[i]);
    U1 = V.topLeftCorner(n, n).cast<cplx>();
    U2 = V.bottomLeftCorner(n, n).cast<cplx>();
  } else {
    CMat H(2 * n, 2 * n), T, U;
    H << A, -S, -R, -A.adjoint();
    complex_schur(H, T, U, true, &sdim);
    ev = T.diagonal();
    U1 = U.topLeftCorner(n, n);
    U2 = U.bottomLeftCorner(n, n);
  }
  const double hn = std::max({A.cwiseAbs().maxCoeff(), S.cwiseAbs().maxCoeff(),
                              R.cwiseAbs().maxCoeff(), 1e-300});
  int stable = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    const double re = ev(i).real();
    if (std::abs(re) <= 1e-10 * hn)
      throw InfeasibleError("care: Hamiltonian has eigenvalues on the imaginary axis");
    if (re < 0) ++stable;
  }
  if (stable != n) throw InfeasibleError("care: no stabilizing solution (unbalanced spectrum)");
  if (sdim != n) throw InfeasibleError("care: Schur reordering failed");
  Eigen::FullPivLU<CMat> lu(U1.adjoint());
  if (!lu.isInvertible()) throw InfeasibleError("care: stable subspace is not a graph");
  CareSolution sol;
  sol.X = hermitian_part(lu.solve(U2.adjoint()).adjoint());
  sol.residual = care_residual(A, S, R, sol.X);
  for (int step = 0; step < 6 && sol.residual > 1e-14; ++step) {
    const CMat Acl = A - S * sol.X;
    const CMat res = A.adjoint() * sol.X + sol.X * A + R - sol.X * S * sol.X;
    CMat dX;
    try {
      dX = solve_lyapunov(CMat(Acl.adjoint()), res);
    } catch (const InfeasibleError&) {
      break;
    }
    const CMat Xn = hermitian_part(sol.X + dX);
    const double rn = care_residual(A, S, R, Xn);
    if (!(rn < sol.residual)) break;
    sol.X = Xn;
    sol.residual = rn;
    ++sol.newton_steps;
  }
  Eigen::ComplexEigenSolver<CMat> es(A - S * sol.X, false);
  sol.closed_loop_poles = es.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(sol.closed_loop_poles(i).real() < 0))
      throw InfeasibleError("care: closed loop is not stable");
  if (!(sol.residual <= 1e-8)) throw InfeasibleError("care: residual certificate failed");
  return sol;
}

CMat matrix_exp(const CMat& M) { return M.exp(); }
CMat matrix_log(const CMat& M) { return M.log(); }

namespace {

CMat flbt_L_single(const CMat& A, double w) {
  const Eigen::Index n = A.rows();
  const CMat I = CMat::Identity(n, n);
  if (w == 0.0) return CMat::Zero(n, n);
  if (std::isinf(w)) return 0.5 * I;
  Eigen::PartialPivLU<CMat> lu(-kJ * w * I + A);
  if (!(lu.rcond() > 1e-14)) {
    std::ostringstream os;
    os << "matrix log branch failure: jw close to an eigenvalue at w = " << w;
    throw InfeasibleError(os.str());
  }
  const CMat ratio = (kJ * w * I + A) * lu.inverse();
  const CMat L = kJ / (2.0 * M_PI) * ratio.log();
  if (!L.allFinite()) throw InfeasibleError("matrix log branch failure");
  return L;
}

}  // namespace

CMat flbt_L_matrix(const Mat& A, double w1, double w2) {
  const CMat Ac = A.cast<cplx>();
  return flbt_L_single(Ac, w2) - flbt_L_single(Ac, w1);
}

namespace {

Mat expm_t(const Mat& A, double t) {
  if (t == 0.0) return Mat::Identity(A.rows(), A.cols());
  if (std::isinf(t)) return Mat::Zero(A.rows(), A.cols());
  return Mat(A * t).exp();
}

Mat symmetric(const Mat& X) { return 0.5 * (X + X.transpose()); }

double lyap_res(const Mat& A, const Mat& X, const Mat& RHS) {
  const double scale = 2 * A.norm() * X.norm() + RHS.norm();
  return (A * X + X * A.transpose() + RHS).norm() / std::max(scale, 1e-300);
}

void require_hurwitz(const StateSpaceModel& m) {
  m.check();
  if (!is_hurwitz(m.A)) throw InfeasibleError("model is not Hurwitz");
}

GramianPair lyapunov_pair(const Mat& A, const Mat& RP, const Mat& RQ, const VariantConfig& cfg) {
  GramianPair g;
  g.cfg = cfg;
  g.P = symmetric(solve_lyapunov(A, RP));
  g.Q = symmetric(solve_lyapunov(Mat(A.transpose()), RQ));
  g.residual_p = lyap_res(A, g.P, RP);
  g.residual_q = lyap_res(A.transpose(), g.Q, RQ);
  return g;
}

Mat care_real(const Mat& A, const Mat& S, const Mat& R, double* residual) {
  const CareSolution sol = solve_care(A.cast<cplx>(), S.cast<cplx>(), R.cast<cplx>());
  if (residual) *residual = sol.residual;
  return symmetric(sol.X.real());
}

}  // namespace

GramianPair limited_gramians(const StateSpaceModel& model, const VariantConfig& cfg) {
  require_hurwitz(model);
  cfg.check();
  const Mat& A = model.A;
  const Mat BB = model.B * model.B.transpose();
  const Mat CC = model.C.transpose() * model.C;
  if (cfg.tag == Variant::FLBT) {
    const Mat L = flbt_L_matrix(A, cfg.omega1, cfg.omega2).real();
    return lyapunov_pair(A, L * BB + BB * L.transpose(), L.transpose() * CC + CC * L, cfg);
  }
  if (cfg.tag == Variant::TLBT) {
    const Mat E1 = expm_t(A, cfg.t1), E2 = expm_t(A, cfg.t2);
    const Mat RP = E1 * BB * E1.transpose() - E2 * BB * E2.transpose();
    const Mat RQ = E1.transpose() * CC * E1 - E2.transpose() * CC * E2;
    return lyapunov_pair(A, RP, RQ, cfg);
  }
  throw ValidationError("limited_gramians needs FLBT or TLBT");
}

GramianPair variant_gramians(const StateSpaceModel& model, const VariantConfig& cfg) {
  require_hurwitz(model);
  cfg.check();
  const Mat &A = model.A, &B = model.B, &C = model.C, &D = model.D;
  const int n = model.n(), m = model.m(), p = model.p();
  const Mat BB = B * B.transpose();
  const Mat CC = C.transpose() * C;
  GramianPair g;
  g.cfg = cfg;
  switch (cfg.tag) {
    case Variant::BT: return lyapunov_pair(A, BB, CC, cfg);
    case Variant::FLBT:
    case Variant::TLBT: return limited_gramians(model, cfg);
    case Variant::SWBT: {
      if (m != p || std::abs(D.determinant()) <= 1e-12 * std::max(1.0, D.norm()))
        throw ValidationError("SWBT needs a square system with invertible D");
      const Mat Az = A - B * D.inverse() * C;
      if (!is_hurwitz(Az)) throw InfeasibleError("SWBT needs a minimum-phase model");
      g.P = symmetric(solve_lyapunov(A, BB));
      g.residual_p = lyap_res(A, g.P, BB);
      const Mat RQ = C.transpose() * (D * D.transpose()).inverse() * C;
      g.Q = symmetric(solve_lyapunov(Mat(Az.transpose()), RQ));
      g.residual_q = lyap_res(Az.transpose(), g.Q, RQ);
      return g;
    }
    case Variant::LQG:
    case Variant::HINF: {
      const double th = cfg.theta();
      g.P = care_real(A.transpose(), th * CC, BB, &g.residual_p);
      g.Q = care_real(A, th * BB, CC, &g.residual_q);
      return g;
    }
    case Variant::PRBT: {
      if (m != p) throw ValidationError("PRBT needs a square system");
      const Mat DD = D + D.transpose();
      if (std::abs(DD.determinant()) <= 1e-12 * std::max(1.0, DD.norm()))
        throw ValidationError("PRBT needs D+D^T nonsingular");
      const Mat R = DD.inverse();
      const Mat Ap = A - B * R * C;
      g.P = care_real(Ap.transpose(), -C.transpose() * R * C, B * R * B.transpose(), &g.residual_p);
      g.Q = care_real(Ap, -B * R * B.transpose(), C.transpose() * R * C, &g.residual_q);
      return g;
    }
    case Variant::BRBT: {
      const Mat Ip_DDt = Mat::Identity(p, p) - D * D.transpose();
      const Mat Im_DtD = Mat::Identity(m, m) - D.transpose() * D;
      Eigen::SelfAdjointEigenSolver<Mat> es(Ip_DDt, Eigen::EigenvaluesOnly);
      if (!(es.eigenvalues()(0) > 1e-12)) throw ValidationError("BRBT needs I-DD^T positive definite");
      const Mat R2 = Ip_DDt.inverse();
      const Mat R1 = Im_DtD.inverse();
      const Mat Ap = A + B * D.transpose() * R2 * C;
      g.P = care_real(Ap.transpose(), -C.transpose() * R2 * C,
                      B * (Mat::Identity(m, m) + D.transpose() * R2 * D) * B.transpose(), &g.residual_p);
      const Mat Aq = A + B * R1 * D.transpose() * C;
      g.Q = care_real(Aq, -B * R1 * B.transpose(),
                      C.transpose() * (Mat::Identity(p, p) + D * R1 * D.transpose()) * C, &g.residual_q);
      return g;
    }
    case Variant::BST: {
      if (m != p || std::abs(D.determinant()) <= 1e-12 * std::max(1.0, D.norm()))
        throw ValidationError("BST needs a square system with invertible D");
      g.P = symmetric(solve_lyapunov(A, BB));
      g.residual_p = lyap_res(A, g.P, BB);
      const Mat Ri = (D * D.transpose()).inverse();
      const Mat Bw = g.P * C.transpose() + B * D.transpose();
      g.Q = care_real(A - Bw * Ri * C, -Bw * Ri * Bw.transpose(), C.transpose() * Ri * C,
                      &g.residual_q);
      return g;
    }
  }
  (void)n;
  throw ValidationError("unknown variant");
}

Mat psd_sqrt_factor(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric(X));
  const Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

IntrusiveBalancer::IntrusiveBalancer(const StateSpaceModel& model, const GramianPair& gramians)
    : model_(model) {
  Lp_ = psd_sqrt_factor(gramians.P);
  Lq_ = psd_sqrt_factor(gramians.Q);
  Eigen::BDCSVD<Mat> svd(Lq_.transpose() * Lp_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  U_ = svd.matrixU();
  V_ = svd.matrixV();
  hsv_ = svd.singularValues();
}

ReducedModel IntrusiveBalancer::reduce(int r) const {
  const int n = static_cast<int>(hsv_.size());
  int rmax = 0;
  const double tol = n * kMach * (n > 0 ? hsv_(0) : 0.0);
  while (rmax < n && hsv_(rmax) > tol) ++rmax;
  if (r < 1 || r > rmax) {
    std::ostringstream os;
    os << "order " << r << " exceeds the numerical rank; largest admissible order is " << rmax;
    throw RankError(os.str(), rmax);
  }
  const Vec isq = hsv_.head(r).cwiseSqrt().cwiseInverse();
  const Mat W = Lq_ * U_.leftCols(r) * isq.asDiagonal();
  const Mat V = Lp_ * V_.leftCols(r) * isq.asDiagonal();
  ReducedModel rom;
  rom.A = (W.transpose() * model_.A * V).cast<cplx>();
  rom.B = (W.transpose() * model_.B).cast<cplx>();
  rom.C = (model_.C * V).cast<cplx>();
  rom.D = model_.D;
  rom.sigma = hsv_;
  return rom;
}

IntrusiveResult intrusive_reduce(const StateSpaceModel& model, const VariantConfig& cfg, int r) {
  IntrusiveBalancer bal(model, variant_gramians(model, cfg));
  return {bal.reduce(r), bal.hankel_values()};
}

}  // namespace nibt
