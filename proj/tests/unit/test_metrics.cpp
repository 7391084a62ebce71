#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "nibt/metrics.hpp"
#include "nibt/oracle.hpp"

using namespace nibt;

namespace {

SampleSet protocol_samples(const StateSpaceModel& m, bool derivs = true) {
  return conjugate_close(sample_transfer(m, logspace(-1, 3, 50), derivs));
}

GridSpec small_grid(const SampleSet& s, int points = 400) {
  GridSpec g = default_grid(s.right_freqs);
  g.points = points;
  return g;
}

// Complex pole pairs at -eps +- j w_k in real block form.
StateSpaceModel on_grid_model(const std::vector<double>& w, double eps, unsigned seed) {
  std::mt19937 g(seed);
  const int n = 2 * static_cast<int>(w.size());
  StateSpaceModel m;
  m.A = Mat::Zero(n, n);
  for (size_t k = 0; k < w.size(); ++k) {
    m.A(2 * k, 2 * k) = m.A(2 * k + 1, 2 * k + 1) = -eps;
    m.A(2 * k, 2 * k + 1) = w[k];
    m.A(2 * k + 1, 2 * k) = -w[k];
  }
  m.B = helpers::random_mat(g, n, 1);
  m.C = helpers::random_mat(g, 1, n);
  m.D = Mat::Zero(1, 1);
  return m;
}

}  // namespace

TEST(Metrics, BtWeightsScaleLoewnerSpectrum) {
  const auto s = protocol_samples(helpers::protocol_modal(10));
  VariantConfig cfg;
  const auto q = build_loewner(s);
  const Vec hv = hankel_like_values(q, compute_factors(s, cfg));
  Eigen::BDCSVD<CMat> svd(q.L);
  EXPECT_LT((hv - 0.5 * cfg.eps * svd.singularValues()).norm(), 1e-12 * hv(0));
  for (Eigen::Index i = 1; i < hv.size(); ++i) EXPECT_LE(hv(i), hv(i - 1));
}

TEST(Metrics, ZeroSamplesGiveZeroValues) {
  auto s = protocol_samples(helpers::protocol_modal(10));
  for (auto& H : s.right_samples) H = s.D.cast<cplx>();
  for (auto& H : s.left_samples) H = s.D.cast<cplx>();
  for (auto& H : s.right_derivs) H.setZero();
  for (auto& H : s.left_derivs) H.setZero();
  VariantConfig cfg;
  EXPECT_EQ(hankel_like_values(build_loewner(s), compute_factors(s, cfg)).maxCoeff(), 0.0);
}

TEST(Metrics, OnGridModelTopValuesMatchIntrusive) {
  const auto grid = logspace(-1, 3, 50);
  VariantConfig cfg;
  const auto m = on_grid_model({grid[10], grid[25], grid[40]}, cfg.eps, 3);
  const auto s = protocol_samples(m);
  const Vec hd = hankel_like_values(build_loewner(s), compute_factors(s, cfg));
  const Vec ht = IntrusiveBalancer(m, variant_gramians(m, cfg)).hankel_values();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(hd(i) / ht(i), 1.0, 0.05) << "index " << i;
}

TEST(Metrics, ExactRomHasNegligibleError) {
  const auto m = helpers::protocol_modal(10);
  const auto s = protocol_samples(m);
  VariantConfig cfg;
  const auto rom = balance_reduce(build_loewner(s), compute_factors(s, cfg), 10);
  const FrequencyResponse fr(m);
  const auto e = relative_hinf_error([&](double w) { return fr.H(w); }, rom, small_grid(s));
  EXPECT_LE(e.ratio, 1e-6);
}

TEST(Metrics, ZeroRomGivesUnitRatio) {
  auto m = helpers::protocol_modal(10);
  m.D.setZero();
  const FrequencyResponse fr(m);
  const auto e = relative_hinf_error([&](double w) { return fr.H(w); },
                                     [](double) { return CMat(CMat::Zero(1, 1)); },
                                     small_grid(protocol_samples(m, false)));
  EXPECT_EQ(e.ratio, 1.0);
}

TEST(Metrics, RefinementOnlyRaisesSups) {
  const auto m = helpers::protocol_modal(20);
  const auto s = protocol_samples(m);
  VariantConfig cfg;
  const auto rom = balance_reduce(build_loewner(s), compute_factors(s, cfg), 6);
  const FrequencyResponse fr(m);
  const Sampler ref = [&](double w) { return fr.H(w); };
  GridSpec coarse = small_grid(s, 101);
  coarse.refine_levels = 0;
  GridSpec fine = coarse;
  fine.points = 201;  // superset of the coarse log grid
  GridSpec refined = coarse;
  refined.refine_levels = 3;
  const auto a = relative_hinf_error(ref, rom, coarse);
  const auto b = relative_hinf_error(ref, rom, fine);
  const auto c = relative_hinf_error(ref, rom, refined);
  EXPECT_GE(b.num, a.num * (1 - 1e-14));
  EXPECT_GE(b.den, a.den * (1 - 1e-14));
  EXPECT_GE(c.num, a.num);
  EXPECT_GE(c.den, a.den);
}

TEST(Metrics, ErrorDecreasesWithOrder) {
  const auto m = helpers::protocol_modal(200);
  const auto s = protocol_samples(m);
  VariantConfig cfg;
  const auto rep = compare_variant(m, s, cfg, {10, 20}, small_grid(s, 2000));
  EXPECT_LE(rep.err_data[1], rep.err_data[0]);
  EXPECT_LE(rep.err_intrusive[1], rep.err_intrusive[0]);
}

TEST(Metrics, ReportIsReproducible) {
  const auto m = helpers::protocol_modal(20);
  const auto s = protocol_samples(m);
  VariantConfig cfg;
  cfg.tag = Variant::TLBT;
  cfg.t2 = 5;
  std::ostringstream a, b;
  write_report_csv(a, compare_variant(m, s, cfg, {1, 2, 3, 4, 5}, small_grid(s, 300)));
  write_report_csv(b, compare_variant(m, s, cfg, {1, 2, 3, 4, 5}, small_grid(s, 300)));
  const std::string csv = a.str();
  EXPECT_EQ(csv, b.str());
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "variant,order,sigma_data,sigma_true,rel_err_data,rel_err_intrusive,unstable_poles");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
}

TEST(Metrics, DefaultGridSpansSamples) {
  const auto g = default_grid({-1000.0, -0.1, 0.1, 1000.0});
  EXPECT_DOUBLE_EQ(g.lo, 1e-3);
  EXPECT_DOUBLE_EQ(g.hi, 1e5);
  EXPECT_EQ(g.points, 2000);
}

TEST(Metrics, ToleranceOverrides) {
  setenv("NIBT_SV_TOP20", "0.2", 1);
  EXPECT_DOUBLE_EQ(Tolerances::from_env().sv_top20, 0.2);
  setenv("NIBT_SV_TOP20", "bogus", 1);
  EXPECT_THROW(Tolerances::from_env(), ValidationError);
  unsetenv("NIBT_SV_TOP20");
  EXPECT_DOUBLE_EQ(Tolerances::from_env().sv_top20, 0.10);
}
