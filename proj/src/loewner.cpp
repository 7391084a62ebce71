#include "nibt/loewner.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace nibt {

LoewnerQuadruplet build_loewner(const SampleSet& s) {
  s.check();
  const int p = s.p(), m = s.m(), ns = s.ns(), nu = s.nu();
  LoewnerQuadruplet q;
  q.D = s.D;
  q.right_freqs = s.right_freqs;
  q.left_freqs = s.left_freqs;
  q.L.resize(p * nu, m * ns);
  q.Ls.resize(p * nu, m * ns);
  q.Bhat.resize(p * nu, m);
  q.Chat.resize(p, m * ns);

  std::vector<CMat> Gr(ns), Gl(nu);
  for (int j = 0; j < ns; ++j) Gr[j] = s.right_G(j);
  for (int i = 0; i < nu; ++i) Gl[i] = s.left_G(i);
  for (int j = 0; j < ns; ++j) q.Chat.middleCols(j * m, m) = Gr[j];
  for (int i = 0; i < nu; ++i) q.Bhat.middleRows(i * p, p) = Gl[i];

  for (int i = 0; i < nu; ++i) {
    const cplx mu = kJ * s.left_freqs[i];
    for (int j = 0; j < ns; ++j) {
      const cplx sg = kJ * s.right_freqs[j];
      auto Lb = q.L.block(i * p, j * m, p, m);
      auto Lsb = q.Ls.block(i * p, j * m, p, m);
      if (coincident(s.right_freqs[j], s.left_freqs[i])) {
        auto d = s.derivative_at(s.right_freqs[j]);
        if (!d) {
          std::ostringstream os;
          os << "missing derivative at coincident frequency " << s.right_freqs[j]
             << " rad/s";
          throw ValidationError(os.str());
        }
        Lb = -*d;
        Lsb = -Gr[j] - sg * *d;
      } else {
        const cplx den = sg - mu;
        Lb = -(Gr[j] - Gl[i]) / den;
        Lsb = -(sg * Gr[j] - mu * Gl[i]) / den;
      }
    }
  }
  return q;
}

InterpolationReport interpolation_check(const LoewnerQuadruplet& q, const SampleSet& s) {
  if (q.L.rows() != q.L.cols())
    throw ValidationError("interpolation check needs a square Loewner pencil");
  InterpolationReport rep;
  const CMat Dc = q.D.cast<cplx>();
  auto visit = [&](double w, const CMat& H, const std::optional<CMat>& dH) {
    const cplx z = kJ * w;
    Eigen::FullPivLU<CMat> lu(z * q.L - q.Ls);
    if (!lu.isInvertible()) {
      rep.max_deviation = std::numeric_limits<double>::infinity();
      rep.worst_frequency = w;
      return;
    }
    CMat X = lu.solve(q.Bhat);
    CMat Ht = q.Chat * X + Dc;
    double dev = (Ht - H).norm() / std::max(H.norm(), 1e-300);
    if (dev > rep.max_deviation) {
      rep.max_deviation = dev;
      rep.worst_frequency = w;
    }
    if (dH) {
      // d/ds Chat (sL - Ls)^{-1} Bhat = -Chat (sL-Ls)^{-1} L (sL-Ls)^{-1} Bhat
      CMat dHt = -q.Chat * lu.solve(q.L * X);
      double dd = (dHt - *dH).norm() / std::max(dH->norm(), 1e-300);
      rep.max_derivative_deviation = std::max(rep.max_derivative_deviation, dd);
    }
  };
  for (int j = 0; j < s.ns(); ++j) {
    std::optional<CMat> d;
    for (double wl : s.left_freqs)
      if (coincident(wl, s.right_freqs[j])) d = s.derivative_at(s.right_freqs[j]);
    visit(s.right_freqs[j], s.right_samples[j], d);
  }
  for (int i = 0; i < s.nu(); ++i) visit(s.left_freqs[i], s.left_samples[i], std::nullopt);
  return rep;
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary dump assumes a little-endian host");

constexpr char kMagic[8] = {'N', 'I', 'B', 'T', 'L', 'Q', '0', '1'};

void put_i32(std::ostream& o, int32_t v) { o.write(reinterpret_cast<const char*>(&v), 4); }
void put_f64(std::ostream& o, double v) { o.write(reinterpret_cast<const char*>(&v), 8); }
int32_t get_i32(std::istream& in) {
  int32_t v;
  in.read(reinterpret_cast<char*>(&v), 4);
  return v;
}
double get_f64(std::istream& in) {
  double v;
  in.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void put_cmat(std::ostream& o, const CMat& M) {
  for (int r = 0; r < M.rows(); ++r)
    for (int c = 0; c < M.cols(); ++c) {
      put_f64(o, M(r, c).real());
      put_f64(o, M(r, c).imag());
    }
}
CMat get_cmat(std::istream& in, int rows, int cols) {
  CMat M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      double re = get_f64(in);
      double im = get_f64(in);
      M(r, c) = cplx(re, im);
    }
  return M;
}

}  // namespace

void write_quadruplet_binary(std::ostream& o, const LoewnerQuadruplet& q) {
  o.write(kMagic, 8);
  const int p = q.p(), m = q.m();
  const int nu = static_cast<int>(q.left_freqs.size());
  const int ns = static_cast<int>(q.right_freqs.size());
  put_i32(o, p);
  put_i32(o, m);
  put_i32(o, nu);
  put_i32(o, ns);
  for (double w : q.right_freqs) put_f64(o, w);
  for (double w : q.left_freqs) put_f64(o, w);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < m; ++c) put_f64(o, q.D(r, c));
  put_cmat(o, q.L);
  put_cmat(o, q.Ls);
  put_cmat(o, q.Bhat);
  put_cmat(o, q.Chat);
}

LoewnerQuadruplet read_quadruplet_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || !std::equal(magic, magic + 8, kMagic))
    throw ValidationError("not a Loewner quadruplet dump");
  LoewnerQuadruplet q;
  const int p = get_i32(in), m = get_i32(in), nu = get_i32(in), ns = get_i32(in);
  if (!in || p <= 0 || m <= 0 || nu <= 0 || ns <= 0)
    throw ValidationError("corrupt quadruplet header");
  q.right_freqs.resize(ns);
  q.left_freqs.resize(nu);
  for (auto& w : q.right_freqs) w = get_f64(in);
  for (auto& w : q.left_freqs) w = get_f64(in);
  q.D.resize(p, m);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < m; ++c) q.D(r, c) = get_f64(in);
  q.L = get_cmat(in, p * nu, m * ns);
  q.Ls = get_cmat(in, p * nu, m * ns);
  q.Bhat = get_cmat(in, p * nu, m);
  q.Chat = get_cmat(in, p, m * ns);
  if (!in) throw ValidationError("truncated quadruplet dump");
  return q;
}

}  // namespace nibt
