#include "nibt/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nibt/weights.hpp"

namespace nibt {

SampleSet SampleSet::matched_grid(std::vector<double> freqs, std::vector<CMat> samples,
                                  std::vector<CMat> derivs, Mat D) {
  SampleSet s;
  s.right_freqs = freqs;
  s.left_freqs = std::move(freqs);
  s.right_samples = samples;
  s.left_samples = std::move(samples);
  s.right_derivs = derivs;
  s.left_derivs = std::move(derivs);
  s.D = std::move(D);
  return s;
}

bool SampleSet::matched() const {
  if (right_freqs.size() != left_freqs.size()) return false;
  for (size_t i = 0; i < right_freqs.size(); ++i)
    if (!coincident(right_freqs[i], left_freqs[i])) return false;
  return true;
}

bool SampleSet::has_derivatives() const {
  return !right_derivs.empty() || !left_derivs.empty();
}

std::optional<CMat> SampleSet::derivative_at(double omega) const {
  for (size_t i = 0; i < right_derivs.size(); ++i)
    if (coincident(right_freqs[i], omega)) return right_derivs[i];
  for (size_t i = 0; i < left_derivs.size(); ++i)
    if (coincident(left_freqs[i], omega)) return left_derivs[i];
  return std::nullopt;
}

namespace {

void check_grid(const std::vector<double>& f, const std::vector<CMat>& h,
                const std::vector<CMat>& d, int p, int m, const char* side) {
  std::ostringstream os;
  if (h.size() != f.size()) {
    os << side << " grid: " << f.size() << " frequencies but " << h.size() << " samples";
    throw ValidationError(os.str());
  }
  if (!d.empty() && d.size() != f.size()) {
    os << side << " grid: derivative count does not match frequency count";
    throw ValidationError(os.str());
  }
  for (size_t i = 0; i < f.size(); ++i) {
    if (!std::isfinite(f[i])) throw ValidationError("non-finite frequency");
    if (h[i].rows() != p || h[i].cols() != m)
      throw ValidationError("sample shape does not match D");
    if (!h[i].allFinite()) throw ValidationError("non-finite sample value");
    if (!d.empty() && (d[i].rows() != p || d[i].cols() != m || !d[i].allFinite()))
      throw ValidationError("bad derivative sample");
  }
  if (f.size() > 1 && !(delta_min(f) > 0.0)) {
    os << side << " grid has repeated frequencies";
    throw ValidationError(os.str());
  }
}

}  // namespace

void SampleSet::check() const {
  if (D.size() == 0) throw ValidationError("static gain D is required");
  if (!D.allFinite()) throw ValidationError("non-finite static gain");
  if (right_freqs.empty() || left_freqs.empty())
    throw ValidationError("sample set has an empty grid");
  check_grid(right_freqs, right_samples, right_derivs, p(), m(), "right");
  check_grid(left_freqs, left_samples, left_derivs, p(), m(), "left");
}

double delta_min(const std::vector<double>& freqs) {
  if (freqs.size() < 2) return std::numeric_limits<double>::infinity();
  std::vector<double> f = freqs;
  std::sort(f.begin(), f.end());
  double dm = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < f.size(); ++i) dm = std::min(dm, f[i] - f[i - 1]);
  return dm;
}

double InterpolationGrid::delta_min() const { return nibt::delta_min(omega); }

namespace {

void close_side(const std::vector<double>& f, const std::vector<CMat>& h,
                const std::vector<CMat>& d, std::vector<double>& fo,
                std::vector<CMat>& ho, std::vector<CMat>& dout) {
  std::vector<size_t> idx(f.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return f[a] < f[b]; });
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
    if (f[*it] == 0.0) continue;
    fo.push_back(-f[*it]);
    ho.push_back(h[*it].conjugate());
    if (!d.empty()) dout.push_back(d[*it].conjugate());
  }
  for (size_t i : idx) {
    fo.push_back(f[i]);
    ho.push_back(h[i]);
    if (!d.empty()) dout.push_back(d[i]);
  }
}

}  // namespace

SampleSet conjugate_close(const SampleSet& s) {
  for (double w : s.right_freqs)
    if (w < 0) throw ValidationError("conjugate closure expects nonnegative frequencies");
  for (double w : s.left_freqs)
    if (w < 0) throw ValidationError("conjugate closure expects nonnegative frequencies");
  SampleSet out;
  out.D = s.D;
  out.derivatives_approximate = s.derivatives_approximate;
  close_side(s.right_freqs, s.right_samples, s.right_derivs, out.right_freqs,
             out.right_samples, out.right_derivs);
  close_side(s.left_freqs, s.left_samples, s.left_derivs, out.left_freqs,
             out.left_samples, out.left_derivs);
  out.conjugate_closed = true;
  out.check();
  return out;
}

namespace {

// Three-point derivative in omega on each sign-half of the grid, mapped to
// d/ds via dH/ds = -j dH/domega.
std::vector<CMat> approx_side(const std::vector<double>& f, const std::vector<CMat>& h) {
  std::vector<CMat> d(f.size());
  for (int sign : {-1, 1}) {
    std::vector<size_t> idx;
    for (size_t i = 0; i < f.size(); ++i)
      if ((sign < 0 && f[i] < 0) || (sign > 0 && f[i] >= 0)) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return f[a] < f[b]; });
    const size_t K = idx.size();
    if (K == 0) continue;
    if (K == 1) {
      std::ostringstream os;
      os << "cannot approximate a derivative at w = " << f[idx[0]]
         << " without neighbouring samples";
      throw ValidationError(os.str());
    }
    for (size_t k = 0; k < K; ++k) {
      CMat dw;
      if (K == 2) {
        dw = (h[idx[1]] - h[idx[0]]) / (f[idx[1]] - f[idx[0]]);
      } else {
        size_t c = std::clamp<size_t>(k, 1, K - 2);
        double x0 = f[idx[c - 1]], x1 = f[idx[c]], x2 = f[idx[c + 1]];
        const CMat &f0 = h[idx[c - 1]], &f1 = h[idx[c]], &f2 = h[idx[c + 1]];
        double h1 = x1 - x0, h2 = x2 - x1;
        if (k == c) {
          dw = -h2 / (h1 * (h1 + h2)) * f0 + (h2 - h1) / (h1 * h2) * f1 +
               h1 / (h2 * (h1 + h2)) * f2;
        } else if (k < c) {
          dw = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f0 + (h1 + h2) / (h1 * h2) * f1 -
               h1 / (h2 * (h1 + h2)) * f2;
        } else {
          dw = h2 / (h1 * (h1 + h2)) * f0 - (h1 + h2) / (h1 * h2) * f1 +
               (h1 + 2 * h2) / (h2 * (h1 + h2)) * f2;
        }
      }
      d[idx[k]] = -kJ * dw;
    }
  }
  return d;
}

}  // namespace

SampleSet with_approximate_derivatives(const SampleSet& s) {
  SampleSet out = s;
  if (out.right_derivs.empty()) out.right_derivs = approx_side(s.right_freqs, s.right_samples);
  if (out.left_derivs.empty()) out.left_derivs = approx_side(s.left_freqs, s.left_samples);
  out.derivatives_approximate = true;
  return out;
}

Diagnostics validate_for_variant(const SampleSet& s, const VariantConfig& cfg) {
  Diagnostics d;
  d.approximate_derivatives = s.derivatives_approximate;
  auto fail = [&](const std::string& why) {
    d.ok = false;
    d.reasons.push_back(why);
  };
  try {
    cfg.check();
    s.check();
  } catch (const std::exception& e) {
    fail(e.what());
    return d;
  }
  const int p = s.p(), m = s.m();
  const Mat& D = s.D;
  const bool square = p == m;
  auto min_sym_eig = [](const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  const double tol = 1e-12 * std::max(1.0, D.norm());

  auto missing = [&]() -> std::optional<double> {
    for (double wr : s.right_freqs)
      for (double wl : s.left_freqs)
        if (coincident(wr, wl) && !s.derivative_at(wr)) return wr;
    return std::nullopt;
  }();
  if (missing) {
    std::ostringstream os;
    os << "missing derivative at coincident frequency " << *missing;
    fail(os.str());
  }

  switch (cfg.tag) {
    case Variant::SWBT:
    case Variant::BST:
      if (!square) {
        fail("system must be square");
      } else if (std::abs(D.determinant()) <= tol) {
        fail("D is singular");
      }
      break;
    case Variant::PRBT:
      if (!square) {
        fail("system must be square");
      } else {
        double e = min_sym_eig(D + D.transpose());
        if (std::abs(e) <= tol)
          fail("D+D^T singular");
        else if (e < 0)
          fail("D+D^T not positive definite");
      }
      break;
    case Variant::BRBT: {
      double e = min_sym_eig(Mat::Identity(p, p) - D * D.transpose());
      if (!(e > tol)) fail("I-DD^T not positive definite");
      break;
    }
    case Variant::HINF:
      if (cfg.theta() < 0) {
        for (int i = 0; i < s.ns(); ++i) {
          CMat G = s.right_G(i);
          Eigen::SelfAdjointEigenSolver<CMat> es(G.adjoint() * G, Eigen::EigenvaluesOnly);
          if (1.0 + cfg.theta() * es.eigenvalues().maxCoeff() <= 0) {
            std::ostringstream os;
            os << "I + (1-gamma^2) G^*G not positive definite at w = " << s.right_freqs[i];
            fail(os.str());
            break;
          }
        }
      }
      break;
    default:
      break;
  }
  if (d.ok) {
    try {
      GramianFactors f = compute_factors(s, cfg);
      d.approximate_derivatives = d.approximate_derivatives || f.approximate;
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  return d;
}

}  // namespace nibt
