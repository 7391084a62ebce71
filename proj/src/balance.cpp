#include "nibt/balance.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace nibt {

CVec ReducedModel::poles() const {
  if (A.rows() == 0) return CVec();
  Eigen::ComplexEigenSolver<CMat> es(A, false);
  return es.eigenvalues();
}

int ReducedModel::unstable_count() const {
  const CVec ev = poles();
  int k = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i).real() > 0) ++k;
  return k;
}

int max_admissible_order(const Vec& sigma, int ns, int nu) {
  if (sigma.size() == 0 || !(sigma(0) > 0)) return 0;
  const double tol = std::max(ns, nu) * std::numeric_limits<double>::epsilon() * sigma(0);
  int r = 0;
  while (r < sigma.size() && sigma(r) > tol) ++r;
  return r;
}

int auto_order(const Vec& sigma, double tol) {
  if (sigma.size() == 0 || !(sigma(0) > 0)) return 0;
  for (Eigen::Index r = 1; r < sigma.size(); ++r)
    if (sigma(r) / sigma(0) < tol) return static_cast<int>(r);
  return static_cast<int>(sigma.size());
}

namespace {

// Builds the ROM from the weighted pencil pieces: WL = Zq^* L Zp,
// WLs = Zq^* Ls Zp, WB = Zq^* Bhat, CW = Chat Zp.
ReducedModel project(const CMat& WL, const CMat& WLs, const CMat& WB, const CMat& CW,
                     const Mat& D, int ns, int nu, int r) {
  Eigen::BDCSVD<CMat> svd(WL, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ReducedModel rom;
  rom.sigma = svd.singularValues();
  rom.D = D;
  const int rmax = max_admissible_order(rom.sigma, ns, nu);
  if (r <= 0) r = std::min(auto_order(rom.sigma), rmax);
  if (r < 1 || r > rmax) {
    std::ostringstream os;
    os << "order " << r << " exceeds the numerical rank; largest admissible order is " << rmax;
    throw RankError(os.str(), rmax);
  }
  const Vec isq = rom.sigma.head(r).cwiseSqrt().cwiseInverse();
  const CMat U1 = svd.matrixU().leftCols(r) * isq.cast<cplx>().asDiagonal();
  const CMat V1 = svd.matrixV().leftCols(r) * isq.cast<cplx>().asDiagonal();
  rom.A = U1.adjoint() * WLs * V1;
  rom.B = U1.adjoint() * WB;
  rom.C = CW * V1;
  return rom;
}

void check_shapes(const LoewnerQuadruplet& q, int zp_rows, int zq_rows) {
  if (q.L.cols() != zp_rows || q.L.rows() != zq_rows)
    throw ValidationError("factor sizes do not match the Loewner matrix");
}

}  // namespace

ReducedModel balance_reduce(const LoewnerQuadruplet& quad, const GramianFactors& f, int r) {
  const int ns = static_cast<int>(quad.right_freqs.size());
  const int nu = static_cast<int>(quad.left_freqs.size());
  if (static_cast<int>(f.zp.size()) != ns || static_cast<int>(f.zq.size()) != nu)
    throw ValidationError("factor block counts do not match the grid");
  return project(f.weigh(quad.L), f.weigh(quad.Ls), f.left_apply_adjoint(quad.Bhat),
                 f.right_apply(quad.Chat), quad.D, ns, nu, r);
}

ReducedModel balance_reduce(const LoewnerQuadruplet& quad, const CMat& Zp, const CMat& Zq, int r) {
  check_shapes(quad, static_cast<int>(Zp.rows()), static_cast<int>(Zq.rows()));
  const CMat Zqa = Zq.adjoint();
  return project(Zqa * quad.L * Zp, Zqa * quad.Ls * Zp, Zqa * quad.Bhat, quad.Chat * Zp, quad.D,
                 static_cast<int>(quad.right_freqs.size()),
                 static_cast<int>(quad.left_freqs.size()), r);
}

namespace {

Eigen::PartialPivLU<CMat> resolvent(const ReducedModel& rom, double omega) {
  const int r = rom.r();
  CMat M = kJ * omega * CMat::Identity(r, r) - rom.A;
  Eigen::PartialPivLU<CMat> lu(M);
  if (!(lu.rcond() > 1e-15)) {
    std::ostringstream os;
    os << "singular resolvent at w = " << omega << " rad/s";
    throw InfeasibleError(os.str());
  }
  return lu;
}

}  // namespace

CMat evaluate_rom(const ReducedModel& rom, double omega) {
  auto lu = resolvent(rom, omega);
  return rom.C * lu.solve(rom.B) + rom.D.cast<cplx>();
}

std::vector<CMat> evaluate_rom(const ReducedModel& rom, const std::vector<double>& freqs) {
  std::vector<CMat> out;
  out.reserve(freqs.size());
  for (double w : freqs) out.push_back(evaluate_rom(rom, w));
  return out;
}

InterpolationReport interpolation_check(const ReducedModel& rom, const SampleSet& s) {
  InterpolationReport rep;
  auto visit = [&](double w, const CMat& H) {
    double dev;
    try {
      const CMat Ht = evaluate_rom(rom, w);
      dev = (Ht - H).norm() / std::max(H.norm(), 1e-300);
    } catch (const InfeasibleError&) {
      dev = std::numeric_limits<double>::infinity();
    }
    if (dev > rep.max_deviation || std::isnan(dev)) {
      rep.max_deviation = dev;
      rep.worst_frequency = w;
    }
    if (auto d = s.derivative_at(w)) {
      double ddev;
      try {
        auto lu = resolvent(rom, w);
        const CMat dHt = -rom.C * lu.solve(lu.solve(rom.B));
        ddev = (dHt - *d).norm() / std::max(d->norm(), 1e-300);
      } catch (const InfeasibleError&) {
        ddev = std::numeric_limits<double>::infinity();
      }
      rep.max_derivative_deviation = std::max(rep.max_derivative_deviation, ddev);
    }
  };
  for (int i = 0; i < s.ns(); ++i) visit(s.right_freqs[i], s.right_samples[i]);
  for (int i = 0; i < s.nu(); ++i) visit(s.left_freqs[i], s.left_samples[i]);
  return rep;
}

ReducedModel flip_unstable(const ReducedModel& rom) {
  Eigen::ComplexEigenSolver<CMat> es(rom.A);
  CVec ev = es.eigenvalues();
  bool any = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i).real() > 0) {
      ev(i) = cplx(-ev(i).real(), ev(i).imag());
      any = true;
    }
  if (!any) return rom;
  ReducedModel out = rom;
  const CMat& V = es.eigenvectors();
  out.A = V * ev.asDiagonal() * V.inverse();
  return out;
}

}  // namespace nibt
