#pragma once

#include <functional>
#include <iosfwd>

#include "nibt/balance.hpp"
#include "nibt/model.hpp"

namespace nibt {

Vec hankel_like_values(const LoewnerQuadruplet& quad, const GramianFactors& factors);

struct GridSpec {
  double lo = 1e-3;
  double hi = 1e5;
  int points = 2000;
  int refine_levels = 3;
  int refine_points = 41;
  bool two_sided = true;
};

// [1e-2 * min |w|, 1e2 * max |w|] over the nonzero sample frequencies.
GridSpec default_grid(const std::vector<double>& freqs);

using Sampler = std::function<CMat(double)>;

struct HinfEstimate {
  double ratio = 0.0;
  double num = 0.0;  // sup sigma_max(H - H~)
  double den = 0.0;  // sup sigma_max(H)
  double argmax = 0.0;
  int evaluations = 0;
};

HinfEstimate relative_hinf_error(const Sampler& ref, const Sampler& rom,
                                 const GridSpec& grid);
HinfEstimate relative_hinf_error(const Sampler& ref, const ReducedModel& rom,
                                 const GridSpec& grid);

struct Tolerances {
  double sv_top20 = 0.10;
  double sv_top10 = 0.05;
  double err_factor = 10.0;
  // NIBT_SV_TOP20, NIBT_SV_TOP10, NIBT_ERR_FACTOR override the defaults.
  static Tolerances from_env();
};

struct ComparisonReport {
  VariantConfig cfg;
  std::vector<int> orders;
  Vec sv_data;
  Vec sv_true;
  std::vector<double> err_data;
  std::vector<double> err_intrusive;
  std::vector<int> unstable_data;
  GridSpec grid;
};

ComparisonReport compare_variant(const StateSpaceModel& model,
                                 const SampleSet& samples, const VariantConfig& cfg,
                                 const std::vector<int>& orders,
                                 const GridSpec& grid);

void write_report_csv(std::ostream& out, const ComparisonReport& report);
void write_response_csv(std::ostream& out, const std::vector<double>& freqs,
                        const std::vector<std::vector<double>>& columns,
                        const std::vector<std::string>& names);

}  // namespace nibt
