#include "nibt/weights.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace nibt {

CMat GramianFactors::left_apply_adjoint(const CMat& M) const {
  const int p = zq.empty() ? 0 : static_cast<int>(zq[0].rows());
  CMat out(M.rows(), M.cols());
  for (size_t i = 0; i < zq.size(); ++i)
    out.middleRows(i * p, p) = zq[i].adjoint() * M.middleRows(i * p, p);
  return out;
}

CMat GramianFactors::right_apply(const CMat& M) const {
  const int m = zp.empty() ? 0 : static_cast<int>(zp[0].rows());
  CMat out(M.rows(), M.cols());
  for (size_t j = 0; j < zp.size(); ++j)
    out.middleCols(j * m, m) = M.middleCols(j * m, m) * zp[j];
  return out;
}

CMat GramianFactors::weigh(const CMat& M) const { return right_apply(left_apply_adjoint(M)); }

namespace {

CMat block_diag(const std::vector<CMat>& blocks) {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.rows());
  CMat Z = CMat::Zero(n, n);
  int o = 0;
  for (const auto& b : blocks) {
    Z.block(o, o, b.rows(), b.cols()) = b;
    o += static_cast<int>(b.rows());
  }
  return Z;
}

std::string at_freq(const char* what, double w) {
  std::ostringstream os;
  os << what << " at w = " << w << " rad/s";
  return os.str();
}

CMat scaled_identity(int n, double v) { return v * CMat::Identity(n, n); }

}  // namespace

CMat GramianFactors::Zp() const { return block_diag(zp); }
CMat GramianFactors::Zq() const { return block_diag(zq); }

cplx flbt_L(cplx a, double w) {
  if (w == 0.0) return 0.0;
  if (std::isinf(w)) return 0.5;
  const cplx ratio = (kJ * w + a) / (-kJ * w + a);
  return kJ / (2.0 * std::numbers::pi) * std::log(ratio);
}

cplx flbt_L_band(cplx a, double w1, double w2) { return flbt_L(a, w2) - flbt_L(a, w1); }

double lqg_map(double s, double theta, double eps) {
  const double q = 1.0 + theta * s;
  if (!(q > 0.0)) throw InfeasibleError("1 + (1-gamma^2) s must be positive");
  return eps / (std::sqrt(q) + 1.0);
}

CMat psd_factor(const CMat& block) {
  const int n = static_cast<int>(block.rows());
  if (n == 1) {
    const double v = block(0, 0).real();
    const double tol = 1e-12 * std::abs(block(0, 0));
    if (v < -tol) throw InfeasibleError("weight block is not positive semidefinite");
    return CMat::Constant(1, 1, std::sqrt(std::max(v, 0.0)));
  }
  const CMat H = 0.5 * (block + block.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  Vec lam = es.eigenvalues();
  const double tol = 1e-12 * lam.cwiseAbs().maxCoeff();
  if (lam.minCoeff() < -tol) throw InfeasibleError("weight block is not positive semidefinite");
  lam = lam.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

CMat riccati_block(const CMat& alpha, const CMat& beta, double eps, double* rho) {
  const int n = static_cast<int>(alpha.rows());
  if (n == 1) {
    const double a = alpha(0, 0).real(), b = beta(0, 0).real();
    const double ab = a * b;
    if (rho) *rho = ab;
    if (ab > 1.0 + 1e-12 || ab < -1e-12 || b < 0)
      throw InfeasibleError("spectral radius of alpha*beta exceeds one");
    const double root = std::sqrt(std::max(0.0, 1.0 - ab));
    return CMat::Constant(1, 1, eps * b / (1.0 + root));
  }
  const CMat I = CMat::Identity(n, n);
  const CMat X = alpha * beta;
  Eigen::ComplexEigenSolver<CMat> es(X);
  const CVec mu = es.eigenvalues();
  const double r = mu.cwiseAbs().maxCoeff();
  if (rho) *rho = r;
  if (r > 1.0 + 1e-12) throw InfeasibleError("spectral radius of alpha*beta exceeds one");
  CMat S;
  const CMat& V = es.eigenvectors();
  Eigen::JacobiSVD<CMat> svd(V);
  const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
  if (std::isfinite(cond) && cond < 1e8) {
    CVec sq(n);
    for (int k = 0; k < n; ++k) {
      cplx v = 1.0 - mu(k);
      if (std::abs(v.imag()) <= 1e-12 && v.real() < 0 && v.real() > -1e-12) v = 0.0;
      sq(k) = std::sqrt(v);
    }
    S = V * sq.asDiagonal() * V.inverse();
  } else {
    S = (I - X).sqrt();
  }
  return eps * beta * (I + S).inverse();
}

namespace {

void require_square_invertible_D(const SampleSet& s, const char* name) {
  if (s.p() != s.m()) throw ValidationError(std::string(name) + " needs a square system");
  if (std::abs(s.D.determinant()) <= 1e-12 * std::max(1.0, s.D.norm()))
    throw ValidationError(std::string(name) + " needs an invertible D");
}

GramianFactors start(const SampleSet& s, const VariantConfig& cfg) {
  cfg.check();
  s.check();
  GramianFactors f;
  f.cfg = cfg;
  f.approximate = s.derivatives_approximate;
  return f;
}

void constant_p(GramianFactors& f, const SampleSet& s, double w) {
  f.zp.assign(s.ns(), scaled_identity(s.m(), w));
}
void constant_q(GramianFactors& f, const SampleSet& s, double w) {
  f.zq.assign(s.nu(), scaled_identity(s.p(), w));
}

}  // namespace

GramianFactors bt_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  const double w = std::sqrt(cfg.eps / 2.0);
  constant_p(f, s, w);
  constant_q(f, s, w);
  return f;
}

GramianFactors flbt_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  std::vector<double> bad;
  auto weight = [&](double w) {
    const double v = cfg.eps * flbt_L_band(cplx(-cfg.eps, w), cfg.omega1, cfg.omega2).real();
    if (!(v > 0.0)) {
      bad.push_back(w);
      return 0.0;
    }
    return std::sqrt(v);
  };
  for (double w : s.right_freqs) f.zp.push_back(scaled_identity(s.m(), weight(w)));
  for (double w : s.left_freqs) f.zq.push_back(scaled_identity(s.p(), weight(w)));
  if (!bad.empty()) {
    std::ostringstream os;
    os << "FLBT weight is not positive (sample outside the band) at w =";
    for (double w : bad) os << ' ' << w;
    throw InfeasibleError(os.str());
  }
  return f;
}

GramianFactors tlbt_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  const double e = cfg.eps;
  const double w = std::sqrt((e / 2.0) * (std::exp(-2.0 * e * cfg.t1) - std::exp(-2.0 * e * cfg.t2)));
  constant_p(f, s, w);
  constant_q(f, s, w);
  return f;
}

GramianFactors swbt_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  require_square_invertible_D(s, "SWBT");
  const double w = std::sqrt(cfg.eps / 2.0);
  constant_p(f, s, w);
  const int p = s.p();
  for (int i = 0; i < s.nu(); ++i) {
    const CMat H = s.left_samples[i];
    if (p == 1) {
      const double g = std::abs(H(0, 0));
      if (!(g > 1e-150) || !std::isfinite(w / g))
        throw InfeasibleError(at_freq("G + D is singular", s.left_freqs[i]));
      f.zq.push_back(CMat::Constant(1, 1, w / g));
      continue;
    }
    Eigen::LLT<CMat> llt(H * H.adjoint());
    if (llt.info() != Eigen::Success)
      throw InfeasibleError(at_freq("G + D is singular", s.left_freqs[i]));
    CMat Linv = CMat(llt.matrixL()).inverse();
    if (!Linv.allFinite()) throw InfeasibleError(at_freq("G + D is singular", s.left_freqs[i]));
    f.zq.push_back(w * Linv.adjoint());
  }
  return f;
}

namespace {

CMat lqg_block(const CMat& gram, double theta, double eps, double w) {
  const int n = static_cast<int>(gram.rows());
  if (n == 1) {
    const double q = 1.0 + theta * gram(0, 0).real();
    if (!(q > 0.0)) throw InfeasibleError(at_freq("I + (1-gamma^2) G^*G is not positive definite", w));
    return CMat::Constant(1, 1, std::sqrt(lqg_map(gram(0, 0).real(), theta, eps)));
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (gram + gram.adjoint()));
  Vec fs(n);
  for (int k = 0; k < n; ++k) {
    const double sk = std::max(0.0, es.eigenvalues()(k));
    if (!(1.0 + theta * sk > 0.0))
      throw InfeasibleError(at_freq("I + (1-gamma^2) G^*G is not positive definite", w));
    fs(k) = std::sqrt(lqg_map(sk, theta, eps));
  }
  return es.eigenvectors() * fs.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

GramianFactors lqg_hinf_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  const double theta = cfg.theta();
  for (int i = 0; i < s.ns(); ++i) {
    const CMat G = s.right_G(i);
    f.zp.push_back(lqg_block(G.adjoint() * G, theta, cfg.eps, s.right_freqs[i]));
  }
  for (int i = 0; i < s.nu(); ++i) {
    const CMat G = s.left_G(i);
    f.zq.push_back(lqg_block(G * G.adjoint(), theta, cfg.eps, s.left_freqs[i]));
  }
  return f;
}

namespace {

template <class Fn>
void riccati_blocks(GramianFactors& f, const SampleSet& s, double eps, Fn alpha_beta_p,
                    Fn alpha_beta_q, const char* infeasible) {
  for (int i = 0; i < s.ns(); ++i) {
    auto [a, b] = alpha_beta_p(s.right_G(i));
    double rho = 0;
    try {
      f.zp.push_back(psd_factor(riccati_block(a, b, eps, &rho)));
    } catch (const InfeasibleError&) {
      throw InfeasibleError(at_freq(infeasible, s.right_freqs[i]));
    }
    f.rho_p.push_back(rho);
  }
  for (int i = 0; i < s.nu(); ++i) {
    auto [a, b] = alpha_beta_q(s.left_G(i));
    double rho = 0;
    try {
      f.zq.push_back(psd_factor(riccati_block(a, b, eps, &rho)));
    } catch (const InfeasibleError&) {
      throw InfeasibleError(at_freq(infeasible, s.left_freqs[i]));
    }
    f.rho_q.push_back(rho);
  }
}

using AB = std::pair<CMat, CMat>;

}  // namespace

GramianFactors prbt_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  if (s.p() != s.m()) throw ValidationError("PRBT needs a square system");
  const Mat DDt = s.D + s.D.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(DDt, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 1e-12 * std::max(1.0, DDt.norm())))
    throw ValidationError("PRBT needs D+D^T positive definite");
  const CMat R = DDt.inverse().cast<cplx>();
  const CMat I = CMat::Identity(s.m(), s.m());
  std::function<AB(const CMat&)> fp = [&](const CMat& G) {
    const CMat Mi = (I + R * G).inverse();
    return AB{G.adjoint() * R * G, Mi * R * Mi.adjoint()};
  };
  std::function<AB(const CMat&)> fq = [&](const CMat& G) {
    const CMat Mi = (I + R * G.adjoint()).inverse();
    return AB{G * R * G.adjoint(), Mi * R * Mi.adjoint()};
  };
  riccati_blocks(f, s, cfg.eps, fp, fq, "data not positive-real");
  return f;
}

GramianFactors brbt_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  const int p = s.p(), m = s.m();
  const Mat& D = s.D;
  const Mat Ip_DDt = Mat::Identity(p, p) - D * D.transpose();
  const Mat Im_DtD = Mat::Identity(m, m) - D.transpose() * D;
  Eigen::SelfAdjointEigenSolver<Mat> es(Ip_DDt, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 1e-12)) throw ValidationError("BRBT needs I-DD^T positive definite");
  const CMat Rp = Ip_DDt.inverse().cast<cplx>();
  const CMat Rq = Im_DtD.inverse().cast<cplx>();
  const CMat Dc = D.cast<cplx>();
  const CMat Kp = CMat::Identity(m, m) + Dc.transpose() * Rp * Dc;
  const CMat Kq = CMat::Identity(p, p) + Dc * Rq * Dc.transpose();
  std::function<AB(const CMat&)> fp = [&](const CMat& G) {
    const CMat Mi = (CMat::Identity(m, m) - Dc.transpose() * Rp * G).inverse();
    return AB{G.adjoint() * Rp * G, Mi * Kp * Mi.adjoint()};
  };
  std::function<AB(const CMat&)> fq = [&](const CMat& G) {
    const CMat Mi = (CMat::Identity(p, p) - Dc * Rq * G.adjoint()).inverse();
    return AB{G * Rq * G.adjoint(), Mi * Kq * Mi.adjoint()};
  };
  riccati_blocks(f, s, cfg.eps, fp, fq, "data not bounded-real");
  return f;
}

GramianFactors bst_factors(const SampleSet& s, const VariantConfig& cfg) {
  GramianFactors f = start(s, cfg);
  require_square_invertible_D(s, "BST");
  const int p = s.p();
  constant_p(f, s, std::sqrt(cfg.eps / 2.0));
  const CMat Dc = s.D.cast<cplx>();
  const CMat R = (s.D * s.D.transpose()).inverse().cast<cplx>();
  const CMat I = CMat::Identity(p, p);
  const bool paired = s.ns() == s.nu();
  if (!paired) f.approximate = true;
  for (int i = 0; i < s.nu(); ++i) {
    const double nu = s.left_freqs[i];
    int j = i;
    if (!paired) {
      j = 0;
      for (int k = 1; k < s.ns(); ++k)
        if (std::abs(s.right_freqs[k] - nu) < std::abs(s.right_freqs[j] - nu)) j = k;
    }
    const double om = s.right_freqs[j];
    const CMat Gl = s.left_G(i);
    const CMat Gr = s.right_G(j);
    CMat dd;
    if (coincident(om, nu)) {
      auto d = s.derivative_at(nu);
      if (!d) throw ValidationError(at_freq("BST needs a derivative sample", nu));
      dd = *d;
    } else {
      dd = (Gr - Gl) / (kJ * om - kJ * nu);
    }
    const CMat T = Gl * Dc.transpose() - (cfg.eps / 2.0) * dd * Gr.adjoint();
    Eigen::PartialPivLU<CMat> lu(I + T * R);
    if (!(std::abs(lu.determinant()) > 1e-300))
      throw InfeasibleError(at_freq("BST inner matrix is singular", nu));
    const CMat Mi = lu.inverse();
    const CMat alpha = T * R * T.adjoint();
    const CMat beta = Mi.adjoint() * R * Mi;
    double rho = 0;
    try {
      f.zq.push_back(psd_factor(riccati_block(alpha, beta, cfg.eps, &rho)));
    } catch (const InfeasibleError&) {
      throw InfeasibleError(at_freq("BST weight infeasible (alpha*beta spectral radius > 1)", nu));
    }
    f.rho_q.push_back(rho);
  }
  return f;
}

GramianFactors compute_factors(const SampleSet& s, const VariantConfig& cfg) {
  switch (cfg.tag) {
    case Variant::BT: return bt_factors(s, cfg);
    case Variant::FLBT: return flbt_factors(s, cfg);
    case Variant::TLBT: return tlbt_factors(s, cfg);
    case Variant::SWBT: return swbt_factors(s, cfg);
    case Variant::LQG:
    case Variant::HINF: return lqg_hinf_factors(s, cfg);
    case Variant::PRBT: return prbt_factors(s, cfg);
    case Variant::BRBT: return brbt_factors(s, cfg);
    case Variant::BST: return bst_factors(s, cfg);
  }
  throw ValidationError("unknown variant");
}

}  // namespace nibt
