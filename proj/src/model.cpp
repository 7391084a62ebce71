#include "nibt/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "nibt/data.hpp"

namespace nibt {

void StateSpaceModel::check() const {
  if (A.rows() != A.cols()) throw ValidationError("A must be square");
  if (B.rows() != A.rows()) throw ValidationError("B must have n rows");
  if (C.cols() != A.rows()) throw ValidationError("C must have n columns");
  if (D.rows() != C.rows() || D.cols() != B.cols())
    throw ValidationError("D must be p x m");
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite())
    throw ValidationError("model matrices contain non-finite entries");
}

bool is_hurwitz(const Mat& A) {
  if (A.rows() == 0) return true;
  Eigen::EigenSolver<Mat> es(A, false);
  if (es.info() != Eigen::Success) return false;
  return (es.eigenvalues().real().array() < 0.0).all();
}

namespace {

StateSpaceModel rlc_ladder(const RlcLadder& k) {
  if (k.sections < 1) throw ValidationError("RLC ladder needs at least one section");
  if (!(k.R > 0 && k.Lind > 0 && k.Cap > 0 && k.Rload > 0))
    throw ValidationError("RLC parameters must be positive");
  const int N = k.sections;
  const int n = 2 * N;
  StateSpaceModel s;
  s.A = Mat::Zero(n, n);
  s.B = Mat::Zero(n, 1);
  s.C = Mat::Zero(1, n);
  s.D = Mat::Constant(1, 1, k.feedthrough);
  // states: i_1..i_N, then v_1..v_N
  for (int q = 0; q < N; ++q) {
    const int ii = q, vi = N + q;
    if (q > 0) s.A(ii, N + q - 1) = 1.0 / k.Lind;
    s.A(ii, vi) = -1.0 / k.Lind;
    s.A(ii, ii) = -k.R / k.Lind;
    s.A(vi, ii) = 1.0 / k.Cap;
    if (q + 1 < N)
      s.A(vi, q + 1) = -1.0 / k.Cap;
    else
      s.A(vi, vi) = -1.0 / (k.Cap * k.Rload);
  }
  s.B(0, 0) = 1.0 / k.Lind;
  s.C(0, 0) = 1.0;
  return s;
}

StateSpaceModel modal(const Modal& k) {
  if (k.num_modes < 1) throw ValidationError("modal model needs at least one mode");
  if (!(k.freq_lo > 0 && k.freq_lo <= k.freq_hi))
    throw ValidationError("modal model needs 0 < freq_lo <= freq_hi");
  if (k.num_modes > 1 && !(k.freq_lo < k.freq_hi))
    throw ValidationError("modal model needs freq_lo < freq_hi");
  if (!(k.damping_ratio > 0 && k.damping_ratio < 1))
    throw ValidationError("damping ratio must lie in (0,1)");
  const int K = k.num_modes;
  std::vector<double> w =
      logspace(std::log10(k.freq_lo), std::log10(k.freq_hi), K);
  std::mt19937 rng(k.seed);
  std::uniform_real_distribution<double> mag(0.5, 1.5);
  std::bernoulli_distribution coin(0.5);
  std::vector<double> b(K), c(K);
  for (int q = 0; q < K; ++q) {
    b[q] = mag(rng);
    c[q] = mag(rng);
  }
  if (k.zero_dip_at) {
    const double W = *k.zero_dip_at;
    auto it = std::lower_bound(w.begin(), w.end(), W);
    const int iw = static_cast<int>(it - w.begin());
    if (iw == 0 || iw == K || w[iw] == W)
      throw ValidationError("zero_dip_at must lie strictly between two mode frequencies");
    // Alternate signs outward from the dip so neighbouring residues oppose.
    for (int q = 0; q < K; ++q) {
      int dist = q < iw ? iw - 1 - q : q - iw;
      if (dist % 2) c[q] = -c[q];
    }
    double below = 0.0, above = 0.0;
    for (int q = 0; q < K; ++q) {
      double t = c[q] * b[q] * w[q] / (w[q] * w[q] - W * W);
      (q < iw ? below : above) += t;
    }
    double scale = -below / above;
    if (!(scale > 0) || !std::isfinite(scale))
      throw ValidationError("cannot plant a zero at the requested frequency");
    for (int q = iw; q < K; ++q) c[q] *= scale;
  } else {
    for (int q = 0; q < K; ++q)
      if (coin(rng)) c[q] = -c[q];
  }
  StateSpaceModel s;
  const int n = 2 * K;
  s.A = Mat::Zero(n, n);
  s.B = Mat::Zero(n, 1);
  s.C = Mat::Zero(1, n);
  s.D = Mat::Constant(1, 1, k.feedthrough);
  for (int q = 0; q < K; ++q) {
    const double z = k.damping_ratio * w[q];
    s.A(2 * q, 2 * q) = -z;
    s.A(2 * q, 2 * q + 1) = w[q];
    s.A(2 * q + 1, 2 * q) = -w[q];
    s.A(2 * q + 1, 2 * q + 1) = -z;
    s.B(2 * q + 1, 0) = b[q];
    s.C(0, 2 * q) = c[q];
  }
  return s;
}

}  // namespace

StateSpaceModel generate_model(const ModelKind& kind) {
  StateSpaceModel s = std::visit(
      [](const auto& k) -> StateSpaceModel {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, RlcLadder>)
          return rlc_ladder(k);
        else
          return modal(k);
      },
      kind);
  s.check();
  if (!is_hurwitz(s.A)) throw InfeasibleError("generated model is not Hurwitz");
  return s;
}

std::vector<double> peak_search_grid(const StateSpaceModel& model, int count) {
  Eigen::EigenSolver<Mat> es(model.A, false);
  std::vector<double> im;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    double v = std::abs(es.eigenvalues()[i].imag());
    double r = std::abs(es.eigenvalues()[i]);
    im.push_back(v);
    if (r > 0) im.push_back(r);
  }
  double lo = 1e-2, hi = 1e2;
  std::vector<double> pos;
  for (double v : im)
    if (v > 0) pos.push_back(v);
  if (!pos.empty()) {
    lo = *std::min_element(pos.begin(), pos.end()) * 1e-2;
    hi = *std::max_element(pos.begin(), pos.end()) * 1e2;
  }
  std::vector<double> grid = logspace(std::log10(lo), std::log10(hi), count);
  grid.push_back(0.0);
  grid.insert(grid.end(), pos.begin(), pos.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

StateSpaceModel normalize_model(const StateSpaceModel& model, double target,
                                double feedthrough) {
  StateSpaceModel s = model;
  s.D.setZero();
  FrequencyResponse fr(s);
  double peak = fr.peak_gain(peak_search_grid(s, 4000));
  if (!(peak > 0)) throw InfeasibleError("model has zero gain");
  s.C *= target / peak;
  s.D = feedthrough * Mat::Identity(s.p(), s.m());
  return s;
}

FrequencyResponse::FrequencyResponse(const StateSpaceModel& model) : model_(model) {
  model_.check();
  const int n = model_.n();
  if (n == 0) return;
  Eigen::HessenbergDecomposition<Mat> hd(model_.A);
  Hess_ = hd.matrixH();
  Mat Q = hd.matrixQ();
  QtB_ = (Q.transpose() * model_.B).cast<cplx>();
  CQ_ = (model_.C * Q).cast<cplx>();
}

CMat FrequencyResponse::resolvent_solve(double omega, const CMat& rhs) const {
  const int n = static_cast<int>(Hess_.rows());
  CMat M = -Hess_.cast<cplx>();
  M.diagonal().array() += kJ * omega;
  CMat y = rhs;
  double scale = std::max(1.0, Hess_.cwiseAbs().maxCoeff() + std::abs(omega));
  // Gaussian elimination with adjacent-row pivoting on the Hessenberg form.
  for (int k = 0; k + 1 < n; ++k) {
    if (std::abs(M(k + 1, k)) > std::abs(M(k, k))) {
      M.row(k).tail(n - k).swap(M.row(k + 1).tail(n - k));
      y.row(k).swap(y.row(k + 1));
    }
    if (M(k + 1, k) == 0.0) continue;
    cplx l = M(k + 1, k) / M(k, k);
    M.row(k + 1).tail(n - k) -= l * M.row(k).tail(n - k);
    y.row(k + 1) -= l * y.row(k);
  }
  for (int k = n - 1; k >= 0; --k) {
    if (std::abs(M(k, k)) <= 1e-14 * scale) {
      std::ostringstream os;
      os << "resolvent (jwI - A) is singular at w = " << omega << " rad/s";
      throw InfeasibleError(os.str());
    }
    if (k + 1 < n) y.row(k) -= M.row(k).tail(n - k - 1) * y.bottomRows(n - k - 1);
    y.row(k) /= M(k, k);
  }
  return y;
}

CMat FrequencyResponse::G(double omega) const {
  if (model_.n() == 0) return CMat::Zero(model_.p(), model_.m());
  return CQ_ * resolvent_solve(omega, QtB_);
}

CMat FrequencyResponse::H(double omega) const {
  return G(omega) + model_.D.cast<cplx>();
}

CMat FrequencyResponse::dH(double omega) const {
  if (model_.n() == 0) return CMat::Zero(model_.p(), model_.m());
  CMat y = resolvent_solve(omega, QtB_);
  return -CQ_ * resolvent_solve(omega, y);
}

double FrequencyResponse::peak_gain(const std::vector<double>& omegas) const {
  double peak = 0.0;
  for (double w : omegas) {
    CMat g = G(w);
    double s = g.size() == 1 ? std::abs(g(0, 0))
                             : Eigen::JacobiSVD<CMat>(g).singularValues()(0);
    peak = std::max(peak, s);
  }
  return peak;
}

SampleSet sample_transfer(const StateSpaceModel& model,
                          const std::vector<double>& freqs, bool with_derivative) {
  FrequencyResponse fr(model);
  std::vector<CMat> H(freqs.size()), dH;
  if (with_derivative) dH.resize(freqs.size());
  for (size_t i = 0; i < freqs.size(); ++i) {
    H[i] = fr.H(freqs[i]);
    if (with_derivative) dH[i] = fr.dH(freqs[i]);
  }
  SampleSet s = SampleSet::matched_grid(freqs, std::move(H), std::move(dH), model.D);
  bool closed = true;
  for (double w : freqs) {
    bool found = false;
    for (double v : freqs)
      if (coincident(v, -w)) found = true;
    closed = closed && found;
  }
  s.conjugate_closed = closed && !freqs.empty();
  return s;
}

}  // namespace nibt
