#pragma once

#include "nibt/data.hpp"

namespace nibt {

enum class SylvesterKind { Xp, Xz, Xsp };

struct SylvesterSolution {
  CMat X;
  SylvesterKind kind = SylvesterKind::Xp;
  InterpolationGrid grid;
  int block_size = 1;
  double condition = 0.0;

  CMat block(int i, int j) const {
    return X.block(i * block_size, j * block_size, block_size, block_size);
  }
};

// X_p = Y (x) I_m with Y_ij = 1/(eps + j(w_j - w_i)).
SylvesterSolution xp_closed_form(const InterpolationGrid& grid, int m = 1);

struct Prop2Bounds {
  double rel_error = 0.0;            // ||X_p - I/eps||_F / ||I/eps||_F
  double bound = 0.0;                // eps sqrt(ns-1) / delta_min
  double dominance_margin = 0.0;     // min_i |Y_ii| - sum_j |Y_ij|
  double dominance_threshold = 0.0;  // delta_min / (ns-1)
  bool bound_holds() const { return rel_error <= bound * (1.0 + 1e-12); }
};

Prop2Bounds prop2_bounds(const InterpolationGrid& grid);

struct BlockDominance {
  std::vector<double> margin;      // ||X_ii|| - sum_{j!=i} ||X_ij||
  std::vector<double> off_weight;  // sum_{j!=i} ||X_ij|| / ||X_ii||
  double min_margin = 0.0;
  bool dominant() const { return min_margin > 0.0; }
};

BlockDominance block_dominance(const SylvesterSolution& sol);

// Blocks M_j/(eps + j(w_j - w_i)) with M_j = I + R G_j; G_j = G(j w_j).
SylvesterSolution xz_solution(const InterpolationGrid& grid,
                              const std::vector<CMat>& G, const CMat& R);

struct ZeroPlacementBounds {
  double eps_threshold = 0.0;          // delta_min * min_i ||M_i|| / sum_{j!=i} ||M_j||
  std::vector<double> off_weight_bound;  // (eps/delta_min) sum_{j!=i} ||M_j|| / ||M_i||
};

ZeroPlacementBounds zero_placement_bounds(const InterpolationGrid& grid,
                                          const std::vector<CMat>& G,
                                          const CMat& R);

// Dense solve of -S^* X - X (S_v - Qshift) + Lv^T Lv = 0.
SylvesterSolution xsp_solution(const InterpolationGrid& grid, const CMat& Qshift,
                               int m);

// Dense solve of the zero-placement equation (oracle path).
CMat xz_dense(const InterpolationGrid& grid, const std::vector<CMat>& G,
              const CMat& R);
CMat xp_dense(const InterpolationGrid& grid, int m);

struct PlacedRom {
  CMat A, B, C;
};

// A = S_v - B L_v, B = X^{-1} L_v^T, C = [G_1 ... G_ns].
PlacedRom pole_placement_rom(const InterpolationGrid& grid,
                             const std::vector<CMat>& G);
PlacedRom zero_placement_rom(const InterpolationGrid& grid,
                             const std::vector<CMat>& G, const Mat& D);
PlacedRom shifted_pole_rom(const InterpolationGrid& grid,
                           const std::vector<CMat>& G, const CMat& Qshift);

// Each lambda_i repeated m times.
CVec placement_targets(const InterpolationGrid& grid, int m);

// Max distance between eig(M) and targets under the min-sum assignment.
double pole_zero_certificate(const CMat& M, const CVec& targets);

// Min-cost perfect matching on a square cost matrix; returns col index per row.
std::vector<int> optimal_assignment(const Mat& cost);

}  // namespace nibt
