#include "nibt/theory.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nibt/oracle.hpp"

namespace nibt {

namespace {

double spec_norm(const CMat& M) {
  if (M.size() == 1) return std::abs(M(0, 0));
  Eigen::JacobiSVD<CMat> svd(M);
  return svd.singularValues()(0);
}

double condition_number(const CMat& X) {
  Eigen::JacobiSVD<CMat> svd(X);
  const Vec& s = svd.singularValues();
  return s(s.size() - 1) > 0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

cplx coeff(const InterpolationGrid& g, int i, int j) {
  return cplx(g.eps, g.omega[j] - g.omega[i]);
}

void check_grid(const InterpolationGrid& g) {
  if (g.omega.empty()) throw ValidationError("empty interpolation grid");
  if (!(g.eps > 0)) throw ValidationError("eps must be positive");
  if (g.ns() > 1 && !(g.delta_min() > 0)) throw ValidationError("grid frequencies must be distinct");
}

CMat kron_I(const CMat& Y, int m) {
  const Eigen::Index n = Y.rows();
  CMat X = CMat::Zero(n * m, Y.cols() * m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
      X.block(i * m, j * m, m, m).diagonal().setConstant(Y(i, j));
  return X;
}

CMat diag_kron(const CVec& d, int m) {
  CVec full(d.size() * m);
  for (Eigen::Index i = 0; i < d.size(); ++i) full.segment(i * m, m).setConstant(d(i));
  return full.asDiagonal();
}

CMat ones_kron(int ns, int m) { return kron_I(CMat::Ones(ns, ns), m); }

CMat Lv(int ns, int m) { return kron_I(CMat::Ones(1, ns), m); }

CMat Sv(const InterpolationGrid& g, int m) {
  CVec d(g.ns());
  for (int i = 0; i < g.ns(); ++i) d(i) = g.sigma(i);
  return diag_kron(d, m);
}

// -S_p^* = diag(lambda_i) (x) I.
CMat neg_Sp_adj(const InterpolationGrid& g, int m) {
  CVec d(g.ns());
  for (int i = 0; i < g.ns(); ++i) d(i) = g.lambda(i);
  return diag_kron(d, m);
}

CMat hcat(const std::vector<CMat>& G) {
  const Eigen::Index p = G[0].rows(), m = G[0].cols();
  CMat C(p, m * static_cast<Eigen::Index>(G.size()));
  for (size_t j = 0; j < G.size(); ++j) C.middleCols(j * m, m) = G[j];
  return C;
}

std::vector<CMat> m_blocks(const std::vector<CMat>& G, const CMat& R) {
  std::vector<CMat> M;
  for (const auto& Gj : G) {
    const CMat Mj = CMat::Identity(Gj.cols(), Gj.cols()) + R * Gj;
    if (!(Mj.norm() > 0)) throw InfeasibleError("M_j is numerically zero");
    M.push_back(Mj);
  }
  return M;
}

PlacedRom rom_from_X(const InterpolationGrid& g, const CMat& X, const std::vector<CMat>& G) {
  const int m = static_cast<int>(G[0].cols());
  PlacedRom rom;
  const CMat L = Lv(g.ns(), m);
  Eigen::PartialPivLU<CMat> lu(X);
  rom.B = lu.solve(L.transpose());
  rom.A = Sv(g, m) - rom.B * L;
  rom.C = hcat(G);
  return rom;
}

}  // namespace

SylvesterSolution xp_closed_form(const InterpolationGrid& grid, int m) {
  check_grid(grid);
  const int ns = grid.ns();
  CMat Y(ns, ns);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) Y(i, j) = 1.0 / coeff(grid, i, j);
  SylvesterSolution s;
  s.X = kron_I(Y, m);
  s.kind = SylvesterKind::Xp;
  s.grid = grid;
  s.block_size = m;
  s.condition = condition_number(Y);
  return s;
}

Prop2Bounds prop2_bounds(const InterpolationGrid& grid) {
  check_grid(grid);
  const int ns = grid.ns();
  Prop2Bounds b;
  double off2 = 0.0;
  b.dominance_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ns; ++i) {
    double row = 0.0;
    for (int j = 0; j < ns; ++j) {
      if (i == j) continue;
      const double a = 1.0 / std::abs(coeff(grid, i, j));
      off2 += a * a;
      row += a;
    }
    b.dominance_margin = std::min(b.dominance_margin, 1.0 / grid.eps - row);
  }
  // Diagonal of X_p equals I/eps exactly, so only off-diagonal entries count.
  b.rel_error = std::sqrt(off2) / (std::sqrt(static_cast<double>(ns)) / grid.eps);
  if (ns > 1) {
    const double dm = grid.delta_min();
    b.bound = grid.eps * std::sqrt(ns - 1.0) / dm;
    b.dominance_threshold = dm / (ns - 1.0);
  } else {
    b.bound = 0.0;
    b.dominance_threshold = std::numeric_limits<double>::infinity();
  }
  return b;
}

BlockDominance block_dominance(const SylvesterSolution& sol) {
  const int m = sol.block_size;
  const int ns = static_cast<int>(sol.X.rows()) / m;
  BlockDominance d;
  d.min_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < ns; ++i) {
    double off = 0.0;
    for (int j = 0; j < ns; ++j)
      if (j != i) off += spec_norm(sol.block(i, j));
    const double diag = spec_norm(sol.block(i, i));
    d.margin.push_back(diag - off);
    d.off_weight.push_back(off / diag);
    d.min_margin = std::min(d.min_margin, diag - off);
  }
  return d;
}

SylvesterSolution xz_solution(const InterpolationGrid& grid, const std::vector<CMat>& G,
                              const CMat& R) {
  check_grid(grid);
  if (static_cast<int>(G.size()) != grid.ns()) throw ValidationError("sample count must match grid");
  const int ns = grid.ns();
  const int m = static_cast<int>(G[0].cols());
  const auto M = m_blocks(G, R);
  SylvesterSolution s;
  s.X.resize(ns * m, ns * m);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < ns; ++j) s.X.block(i * m, j * m, m, m) = M[j] / coeff(grid, i, j);
  s.kind = SylvesterKind::Xz;
  s.grid = grid;
  s.block_size = m;
  s.condition = condition_number(s.X);
  return s;
}

ZeroPlacementBounds zero_placement_bounds(const InterpolationGrid& grid,
                                          const std::vector<CMat>& G, const CMat& R) {
  check_grid(grid);
  const auto M = m_blocks(G, R);
  std::vector<double> nm;
  double total = 0.0;
  for (const auto& Mj : M) {
    nm.push_back(spec_norm(Mj));
    total += nm.back();
  }
  ZeroPlacementBounds b;
  b.eps_threshold = std::numeric_limits<double>::infinity();
  const double dm = grid.ns() > 1 ? grid.delta_min() : std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < nm.size(); ++i) {
    const double others = total - nm[i];
    if (others > 0) b.eps_threshold = std::min(b.eps_threshold, dm * nm[i] / others);
    b.off_weight_bound.push_back(grid.eps / dm * others / nm[i]);
  }
  return b;
}

SylvesterSolution xsp_solution(const InterpolationGrid& grid, const CMat& Qshift, int m) {
  check_grid(grid);
  const int n = grid.ns() * m;
  if (Qshift.rows() != n || Qshift.cols() != n) throw ValidationError("Q_shift has the wrong size");
  SylvesterSolution s;
  s.X = solve_sylvester(neg_Sp_adj(grid, m), CMat(-(Sv(grid, m) - Qshift)), ones_kron(grid.ns(), m));
  s.kind = SylvesterKind::Xsp;
  s.grid = grid;
  s.block_size = m;
  s.condition = condition_number(s.X);
  return s;
}

CMat xz_dense(const InterpolationGrid& grid, const std::vector<CMat>& G, const CMat& R) {
  check_grid(grid);
  const int m = static_cast<int>(G[0].cols());
  const CMat L = Lv(grid.ns(), m);
  const CMat rhs = L.transpose() * (L + R * hcat(G));
  return solve_sylvester(neg_Sp_adj(grid, m), CMat(-Sv(grid, m)), rhs);
}

CMat xp_dense(const InterpolationGrid& grid, int m) {
  check_grid(grid);
  return solve_sylvester(neg_Sp_adj(grid, m), CMat(-Sv(grid, m)), ones_kron(grid.ns(), m));
}

PlacedRom pole_placement_rom(const InterpolationGrid& grid, const std::vector<CMat>& G) {
  return rom_from_X(grid, xp_closed_form(grid, static_cast<int>(G[0].cols())).X, G);
}

PlacedRom zero_placement_rom(const InterpolationGrid& grid, const std::vector<CMat>& G,
                             const Mat& D) {
  if (D.rows() != D.cols() || std::abs(D.determinant()) <= 1e-12 * std::max(1.0, D.norm()))
    throw ValidationError("zero placement needs an invertible D");
  const CMat R = D.inverse().cast<cplx>();
  return rom_from_X(grid, xz_solution(grid, G, R).X, G);
}

PlacedRom shifted_pole_rom(const InterpolationGrid& grid, const std::vector<CMat>& G,
                           const CMat& Qshift) {
  return rom_from_X(grid, xsp_solution(grid, Qshift, static_cast<int>(G[0].cols())).X, G);
}

CVec placement_targets(const InterpolationGrid& grid, int m) {
  CVec t(grid.ns() * m);
  for (int i = 0; i < grid.ns(); ++i) t.segment(i * m, m).setConstant(grid.lambda(i));
  return t;
}

double pole_zero_certificate(const CMat& M, const CVec& targets) {
  if (M.rows() != targets.size()) throw ValidationError("target count must match matrix size");
  Eigen::ComplexEigenSolver<CMat> es(M, false);
  const CVec ev = es.eigenvalues();
  const Eigen::Index n = ev.size();
  Mat cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = std::abs(ev(i) - targets(j));
  const auto pick = optimal_assignment(cost);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, cost(i, pick[i]));
  return worst;
}

// Hungarian method with row/column potentials, O(n^3).
std::vector<int> optimal_assignment(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw ValidationError("assignment needs a square cost matrix");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> ans(n);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) ans[p[j] - 1] = j - 1;
  return ans;
}

}  // namespace nibt
