#include "nibt/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>

#include <Eigen/SVD>

#include "nibt/oracle.hpp"

namespace nibt {

Vec hankel_like_values(const LoewnerQuadruplet& quad, const GramianFactors& factors) {
  Eigen::BDCSVD<CMat> svd(factors.weigh(quad.L));
  return svd.singularValues();
}

GridSpec default_grid(const std::vector<double>& freqs) {
  GridSpec g;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double w : freqs) {
    const double a = std::abs(w);
    if (a == 0.0) continue;
    lo = std::min(lo, a);
    hi = std::max(hi, a);
  }
  if (hi > 0.0) {
    g.lo = 1e-2 * lo;
    g.hi = 1e2 * hi;
  }
  return g;
}

namespace {

double smax(const CMat& M) {
  if (M.size() == 1) return std::abs(M(0, 0));
  Eigen::JacobiSVD<CMat> svd(M);
  return svd.singularValues()(0);
}

struct Best {
  double value = -1.0;
  double omega = 0.0;
};

void consider(Best& b, double v, double w) {
  if (v > b.value) {
    b.value = v;
    b.omega = w;
  }
}

}  // namespace

HinfEstimate relative_hinf_error(const Sampler& ref, const Sampler& rom, const GridSpec& grid) {
  if (!(grid.lo > 0) || !(grid.hi > grid.lo) || grid.points < 2)
    throw ValidationError("grid needs 0 < lo < hi and at least two points");
  HinfEstimate est;
  Best num, den;
  auto eval = [&](double w, Best* n, Best* d) {
    const CMat H = ref(w);
    if (n) consider(*n, smax(H - rom(w)), w);
    if (d) consider(*d, smax(H), w);
    ++est.evaluations;
  };
  auto eval_both_signs = [&](double w, Best* n, Best* d) {
    eval(w, n, d);
    if (grid.two_sided) eval(-w, n, d);
  };
  const double a = std::log10(grid.lo), b = std::log10(grid.hi);
  for (double w : logspace(a, b, grid.points)) eval_both_signs(w, &num, &den);
  // Local refinement: each level samples a log-neighbourhood of the current
  // maximizer; new points only add to the candidate set.
  auto refine = [&](Best& best, bool is_num) {
    double h = (b - a) / (grid.points - 1);
    for (int level = 0; level < grid.refine_levels; ++level) {
      const double center = std::log10(std::abs(best.omega));
      const double sign = best.omega < 0 ? -1.0 : 1.0;
      const int k = std::max(grid.refine_points, 2);
      for (int i = 0; i < k; ++i) {
        const double w = sign * std::pow(10.0, center - h + 2.0 * h * i / (k - 1));
        eval(w, is_num ? &best : nullptr, is_num ? nullptr : &best);
      }
      h = 2.0 * h / (k - 1);
    }
  };
  if (num.omega != 0.0) refine(num, true);
  if (den.omega != 0.0) refine(den, false);
  est.num = num.value;
  est.den = den.value;
  est.argmax = num.omega;
  est.ratio = den.value > 0 ? num.value / den.value : std::numeric_limits<double>::infinity();
  return est;
}

HinfEstimate relative_hinf_error(const Sampler& ref, const ReducedModel& rom,
                                 const GridSpec& grid) {
  return relative_hinf_error(ref, [&rom](double w) { return evaluate_rom(rom, w); }, grid);
}

Tolerances Tolerances::from_env() {
  Tolerances t;
  auto read = [](const char* name, double& slot) {
    if (const char* v = std::getenv(name)) {
      char* end = nullptr;
      const double x = std::strtod(v, &end);
      if (end == v || *end != '\0' || !(x > 0)) throw ValidationError(std::string("bad value for ") + name);
      slot = x;
    }
  };
  read("NIBT_SV_TOP20", t.sv_top20);
  read("NIBT_SV_TOP10", t.sv_top10);
  read("NIBT_ERR_FACTOR", t.err_factor);
  return t;
}

ComparisonReport compare_variant(const StateSpaceModel& model, const SampleSet& samples,
                                 const VariantConfig& cfg, const std::vector<int>& orders,
                                 const GridSpec& grid) {
  ComparisonReport rep;
  rep.cfg = cfg;
  rep.orders = orders;
  rep.grid = grid;

  const GramianFactors factors = compute_factors(samples, cfg);
  const LoewnerQuadruplet quad = build_loewner(samples);
  rep.sv_data = hankel_like_values(quad, factors);

  const IntrusiveBalancer bal(model, variant_gramians(model, cfg));
  rep.sv_true = bal.hankel_values();

  const FrequencyResponse fr(model);
  std::map<double, CMat> cache;
  const Sampler ref = [&](double w) -> CMat {
    auto it = cache.find(w);
    if (it != cache.end()) return it->second;
    return cache.emplace(w, fr.H(w)).first->second;
  };

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int r : orders) {
    double ed = nan, ei = nan;
    int unstable = -1;
    try {
      const ReducedModel rom = balance_reduce(quad, factors, r);
      unstable = rom.unstable_count();
      ed = relative_hinf_error(ref, rom, grid).ratio;
    } catch (const InfeasibleError&) {
    }
    try {
      ei = relative_hinf_error(ref, bal.reduce(r), grid).ratio;
    } catch (const InfeasibleError&) {
    }
    rep.err_data.push_back(ed);
    rep.err_intrusive.push_back(ei);
    rep.unstable_data.push_back(unstable);
  }
  return rep;
}

void write_report_csv(std::ostream& out, const ComparisonReport& rep) {
  out << "variant,order,sigma_data,sigma_true,rel_err_data,rel_err_intrusive,unstable_poles\n";
  out << std::setprecision(17);
  auto sv = [](const Vec& s, int r) {
    return r >= 1 && r <= s.size() ? s(r - 1) : std::numeric_limits<double>::quiet_NaN();
  };
  for (size_t k = 0; k < rep.orders.size(); ++k) {
    const int r = rep.orders[k];
    out << variant_name(rep.cfg.tag) << ',' << r << ',' << sv(rep.sv_data, r) << ','
        << sv(rep.sv_true, r) << ',' << rep.err_data[k] << ',' << rep.err_intrusive[k] << ','
        << rep.unstable_data[k] << '\n';
  }
}

void write_response_csv(std::ostream& out, const std::vector<double>& freqs,
                        const std::vector<std::vector<double>>& columns,
                        const std::vector<std::string>& names) {
  if (columns.size() != names.size()) throw ValidationError("column/name count mismatch");
  out << "omega";
  for (const auto& n : names) out << ',' << n;
  out << '\n' << std::setprecision(17);
  for (size_t i = 0; i < freqs.size(); ++i) {
    out << freqs[i];
    for (const auto& c : columns) out << ',' << c.at(i);
    out << '\n';
  }
}

}  // namespace nibt
