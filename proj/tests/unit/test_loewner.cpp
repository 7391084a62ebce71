#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "nibt/loewner.hpp"

using namespace nibt;

TEST(Loewner, HermitePointDefinition) {
  const cplx g(0.3, -0.2), d(0.05, 0.1);
  auto s = SampleSet::matched_grid({1.0}, {CMat::Constant(1, 1, g)}, {CMat::Constant(1, 1, d)},
                                   Mat::Zero(1, 1));
  const auto q = build_loewner(s);
  EXPECT_LT(std::abs(q.L(0, 0) + d), 1e-15);
  EXPECT_LT(std::abs(q.Ls(0, 0) - (-g - kJ * d)), 1e-15);
  EXPECT_EQ(q.Bhat(0, 0), g);
  EXPECT_EQ(q.Chat(0, 0), g);
}

TEST(Loewner, DividedDifferenceEntry) {
  const cplx a(1, 2), b(-0.5, 0.25);
  SampleSet s;
  s.right_freqs = {2.0};
  s.right_samples = {CMat::Constant(1, 1, a)};
  s.left_freqs = {1.0};
  s.left_samples = {CMat::Constant(1, 1, b)};
  s.D = Mat::Zero(1, 1);
  const auto q = build_loewner(s);
  EXPECT_LT(std::abs(q.L(0, 0) - (-(a - b) / (kJ * 2.0 - kJ * 1.0))), 1e-15);
}

TEST(Loewner, FeedthroughIsRemovedFromSamples) {
  const auto m = helpers::protocol_modal(6);
  const auto s = sample_transfer(m, {1.0, 2.0}, true);
  const auto q = build_loewner(s);
  EXPECT_LT(std::abs(q.Bhat(0, 0) - s.right_G(0)(0, 0)), 1e-15);
}

TEST(Loewner, ExactDataIsInterpolated) {
  const auto m = helpers::protocol_modal(20);
  // 2*8 points against n = 20 keeps the pencil regular
  const auto s = conjugate_close(sample_transfer(m, logspace(-0.5, 2.8, 8), true));
  const auto rep = interpolation_check(build_loewner(s), s);
  EXPECT_LE(rep.max_deviation, 1e-8);
  EXPECT_LE(rep.max_derivative_deviation, 1e-6);
}

TEST(Loewner, PerturbedDataDeviates) {
  const auto m = helpers::protocol_modal(20);
  auto s = conjugate_close(sample_transfer(m, logspace(-0.5, 2.8, 20), true));
  const auto q = build_loewner(s);
  for (auto& h : s.right_samples) h.array() += 1e-3;
  EXPECT_GT(interpolation_check(q, s).max_deviation, 0.0);
}

TEST(Loewner, MissingDerivativeNamesFrequency) {
  auto s = SampleSet::matched_grid({1.5}, {CMat::Constant(1, 1, 1.0)}, {}, Mat::Zero(1, 1));
  try {
    build_loewner(s);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos);
  }
}

TEST(Loewner, MimoShapes) {
  std::mt19937 g(3);
  const int p = 2, m = 3;
  StateSpaceModel sys{helpers::random_hurwitz(g, 6), helpers::random_mat(g, 6, m),
                      helpers::random_mat(g, p, 6), helpers::random_mat(g, p, m)};
  const auto s = sample_transfer(sys, {0.5, 1.0, 2.0}, true);
  const auto q = build_loewner(s);
  EXPECT_EQ(q.L.rows(), p * 3);
  EXPECT_EQ(q.L.cols(), m * 3);
  EXPECT_EQ(q.Bhat.cols(), m);
  EXPECT_EQ(q.Chat.rows(), p);
  EXPECT_THROW(interpolation_check(q, s), ValidationError);
}

TEST(Loewner, MimoSquareExactness) {
  std::mt19937 g(4);
  StateSpaceModel sys{helpers::random_hurwitz(g, 6), helpers::random_mat(g, 6, 2),
                      helpers::random_mat(g, 2, 6), helpers::random_mat(g, 2, 2)};
  const auto s = conjugate_close(sample_transfer(sys, {1.0}, true));
  const auto rep = interpolation_check(build_loewner(s), s);
  EXPECT_LE(rep.max_deviation, 1e-8);
  EXPECT_LE(rep.max_derivative_deviation, 1e-6);
}

TEST(Loewner, BinaryDumpRoundTrip) {
  const auto m = helpers::protocol_modal(6);
  const auto q = build_loewner(sample_transfer(m, {1.0, 2.0, 3.0}, true));
  std::stringstream buf;
  write_quadruplet_binary(buf, q);
  const auto r = read_quadruplet_binary(buf);
  EXPECT_EQ((r.L - q.L).norm(), 0.0);
  EXPECT_EQ((r.Ls - q.Ls).norm(), 0.0);
  EXPECT_EQ((r.Bhat - q.Bhat).norm(), 0.0);
  EXPECT_EQ((r.Chat - q.Chat).norm(), 0.0);
  EXPECT_EQ(r.right_freqs, q.right_freqs);
}

TEST(Loewner, BadMagicIsRejected) {
  std::stringstream buf("XXXXXXXX");
  EXPECT_THROW(read_quadruplet_binary(buf), ValidationError);
}
