#include <gtest/gtest.h>

#include "helpers.hpp"
#include "nibt/data.hpp"

using namespace nibt;

TEST(Model, RlcSingleSectionIsHurwitz) {
  RlcLadder k;
  k.sections = 1;
  const auto m = generate_model(k);
  EXPECT_EQ(m.n(), 2);
  EXPECT_TRUE(is_hurwitz(m.A));
}

TEST(Model, RlcLadderScalesToLargeOrder) {
  RlcLadder k;
  k.sections = 200;
  const auto m = generate_model(k);
  EXPECT_EQ(m.n(), 400);
  EXPECT_TRUE(is_hurwitz(m.A));
}

TEST(Model, SingleModeBlockIsAnalytic) {
  Modal k;
  k.num_modes = 1;
  k.freq_lo = k.freq_hi = 10.0;
  k.damping_ratio = 0.01;
  const auto m = generate_model(k);
  Mat expect(2, 2);
  expect << -0.1, 10, -10, -0.1;
  EXPECT_LT((m.A - expect).norm(), 1e-15);
  Eigen::EigenSolver<Mat> es(m.A);
  for (int i = 0; i < 2; ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).real(), -0.1, 1e-12);
    EXPECT_NEAR(std::abs(es.eigenvalues()(i).imag()), 10.0, 1e-12);
  }
}

TEST(Model, ResponseDecaysAtHighFrequency) {
  Modal k;
  k.num_modes = 1;
  k.freq_lo = k.freq_hi = 10.0;
  k.damping_ratio = 0.01;
  FrequencyResponse fr(generate_model(k));
  EXPECT_LT(fr.G(1e9).norm(), 1e-6);
}

TEST(Model, ResponseMatchesTwoByTwoInverse) {
  Modal k;
  k.num_modes = 1;
  k.freq_lo = k.freq_hi = 10.0;
  k.damping_ratio = 0.01;
  const auto m = generate_model(k);
  FrequencyResponse fr(m);
  const cplx s = kJ * 10.0;
  const cplx a = s - m.A(0, 0), b = -m.A(0, 1), c = -m.A(1, 0), d = s - m.A(1, 1);
  const cplx det = a * d - b * c;
  // inverse of [[a,b],[c,d]] = [[d,-b],[-c,a]]/det
  const cplx g = (m.C(0, 0) * (-b) * m.B(1, 0) + m.C(0, 1) * a * m.B(1, 0)) / det;
  EXPECT_LT(std::abs(fr.H(10.0)(0, 0) - g), 1e-12 * std::abs(g));
}

TEST(Model, DerivativeMatchesFiniteDifference) {
  const auto m = helpers::protocol_modal(20);
  FrequencyResponse fr(m);
  const double w = 3.3, h = 1e-6;
  const CMat fd = (fr.H(w + h) - fr.H(w - h)) / (2 * h);
  // dH/ds = -j dH/dw on the imaginary axis
  EXPECT_LT(helpers::rel(fr.dH(w), CMat(-kJ * fd)), 1e-6);
}

TEST(Model, SingularResolventNamesFrequency) {
  StateSpaceModel m;
  m.A = Mat::Zero(1, 1);
  m.B = Mat::Ones(1, 1);
  m.C = Mat::Ones(1, 1);
  m.D = Mat::Zero(1, 1);
  FrequencyResponse fr(m);
  try {
    fr.H(0.0);
    FAIL();
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("w = 0"), std::string::npos);
  }
}

TEST(Model, NormalizeSetsPeakAndFeedthrough) {
  Modal k;
  k.num_modes = 10;
  k.freq_lo = 1;
  k.freq_hi = 100;
  const auto m = normalize_model(generate_model(k), 0.4, 0.5);
  FrequencyResponse fr(m);
  EXPECT_NEAR(fr.peak_gain(peak_search_grid(m, 4000)), 0.4, 1e-12);
  EXPECT_EQ(m.D(0, 0), 0.5);
}

TEST(Model, PlantedDipHasSmallGain) {
  Modal k;
  k.num_modes = 6;
  k.freq_lo = 0.1;
  k.freq_hi = 1000;
  k.damping_ratio = 0.02;
  k.zero_dip_at = 9.63;
  const auto m = generate_model(k);
  FrequencyResponse fr(m);
  const double at = std::abs(fr.G(9.63)(0, 0));
  EXPECT_LT(at, 0.1 * std::abs(fr.G(3.0)(0, 0)));
  EXPECT_LT(at, 0.1 * std::abs(fr.G(30.0)(0, 0)));
}

TEST(Model, DipOutsideModeRangeIsRejected) {
  Modal k;
  k.num_modes = 3;
  k.freq_lo = 1;
  k.freq_hi = 10;
  k.zero_dip_at = 100.0;
  EXPECT_THROW(generate_model(k), ValidationError);
}

TEST(Model, DegenerateParametersAreRejected) {
  RlcLadder k;
  k.R = 0.0;
  EXPECT_THROW(generate_model(k), ValidationError);
  Modal md;
  md.damping_ratio = 0.0;
  EXPECT_THROW(generate_model(md), ValidationError);
}

TEST(Model, SamplingIsConjugateSymmetric) {
  const auto m = helpers::protocol_modal(10);
  FrequencyResponse fr(m);
  EXPECT_LT(helpers::rel(fr.H(-2.0), CMat(fr.H(2.0).conjugate())), 1e-14);
}
