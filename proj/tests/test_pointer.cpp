#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "qccsim/pointer.hpp"

using namespace qccsim;

TEST(MakeGaussian, MeanAndNorm) {
  EXPECT_EQ(mean_position(make_gaussian(0.0, 1.0)), 0.0);
  EXPECT_NEAR(mean_position(make_gaussian(2.5, 1.0)), 2.5, 1e-15);
  EXPECT_NEAR(make_gaussian(0.3, 0.7).norm(), 1.0, 1e-12);
  const auto p = make_gaussian(1.0, 2.0);
  ASSERT_EQ(p.components().size(), 1u);
  EXPECT_EQ(p.components()[0].momentum_center, 0.0);
}

TEST(MakeGaussian, RejectsNonPositiveWidth) {
  EXPECT_THROW(make_gaussian(0.0, 0.0), InvalidArgument);
  EXPECT_THROW(make_gaussian(0.0, -1.0), InvalidArgument);
}

TEST(Translate, IdentityAndRigidShift) {
  const auto p = make_gaussian(0.4, 1.3);
  const auto same = translate(p, 0.0, 1.0);
  EXPECT_EQ(same.components()[0].center, p.components()[0].center);
  EXPECT_EQ(same.components()[0].coeff, p.components()[0].coeff);
  const double ga = 0.02 * 0.5;
  EXPECT_NEAR(mean_position(translate(p, ga)) - mean_position(p), ga, 1e-15);
}

TEST(Translate, TwoComponentMeanMatchesQuadrature) {
  const auto base = make_gaussian(0.0, 1.0);
  const auto p = translate(base, 0.0, Complex{0.8, 0.1}) + translate(base, 0.7, Complex{-0.2, 0.5});
  const auto q = oracle::quadrature_moments(p, -14.0, 14.7);
  EXPECT_NEAR(p.norm_squared(), q.norm, 1e-10);
  EXPECT_NEAR(mean_position(p), q.mean_x, 1e-10);
}

TEST(MeanPosition, SymmetricPairIsZero) {
  const auto base = make_gaussian(0.0, 1.0);
  EXPECT_NEAR(mean_position(translate(base, 0.9) + translate(base, -0.9)), 0.0, 1e-15);
}

TEST(MeanPosition, ComplexCoefficientsAgainstQuadrature) {
  const auto base = make_gaussian(0.0, 1.0);
  const auto p = translate(base, 0.0, Complex{0.8, 0.0}) + translate(base, 0.3, Complex{0.0, 0.6});
  const auto q = oracle::quadrature_moments(p, -14.0, 14.3);
  EXPECT_NEAR(mean_position(p), q.mean_x, 1e-10);
}

TEST(MeanPosition, ZeroNormThrows) {
  const auto p = make_gaussian(0.0, 1.0);
  EXPECT_THROW(mean_position(p - p), ZeroNorm);
  EXPECT_THROW(mean_momentum(p.scaled(0.0)), ZeroNorm);
}

TEST(MeanMomentum, RealGaussianIsZero) {
  EXPECT_EQ(mean_momentum(make_gaussian(1.7, 0.4)), 0.0);
}

TEST(MeanMomentum, MomentumCenterIsRead) {
  const GaussianPointerState p(1.0, {{{1.0, 0.0}, 0.5, 1.25}});
  EXPECT_NEAR(mean_momentum(p), 1.25, 1e-15);
  EXPECT_NEAR(p.norm_squared(), 1.0, 1e-15);
}

TEST(MeanMomentum, TwoComponentComplexSuperpositionMatchesSpectralDerivative) {
  const GaussianPointerState p(1.0, {{{0.8, 0.0}, 0.0, 0.0}, {{0.1, 0.6}, 0.4, 0.3}});
  const auto q = oracle::quadrature_moments(p, -16.0, 16.0, 1024);
  EXPECT_NEAR(mean_momentum(p), q.mean_p, 1e-10);
  EXPECT_NEAR(mean_position(p), q.mean_x, 1e-10);
}

TEST(ToGrid, StandardGaussianNorm) {
  const auto g = to_grid(make_gaussian(0.0, 1.0), -8.0, 8.0, 1024);
  EXPECT_EQ(g.n_points(), 1024u);
  EXPECT_NEAR(g.trapezoid_norm_squared(), 1.0, 1e-6);
}

TEST(ToGrid, ArgmaxNearCenter) {
  const auto g = to_grid(make_gaussian(1.3, 1.0), -8.0, 10.0, 512);
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.n_points(); ++i)
    if (std::norm(g.amps[i]) > std::norm(g.amps[best])) best = i;
  EXPECT_LE(std::abs(g.x(best) - 1.3), 0.5 * g.dx() + 1e-12);
}

TEST(ToGrid, SuperpositionDensityMatchesClosedForm) {
  const auto base = make_gaussian(0.0, 1.0);
  const auto p = translate(base, 0.2, Complex{0.6, 0.2}) + translate(base, -0.4, Complex{0.1, -0.7});
  const auto g = to_grid(p, -10.0, 10.0, 256);
  for (std::size_t i = 3; i < 256; i += 25) {
    EXPECT_NEAR(std::norm(g.amps[i]), std::norm(oracle::pointer_amplitude(p, g.x(i))), 1e-10);
  }
}

TEST(ToGrid, Errors) {
  const auto p = make_gaussian(0.0, 1.0);
  EXPECT_THROW(to_grid(p, -4.0, 4.0, 1024), InvalidArgument);
  EXPECT_THROW(to_grid(p, -8.0, 8.0, 1000), InvalidArgument);
}

TEST(ToGrid, CsvHasHeaderAndOneRowPerPoint) {
  std::ostringstream os;
  to_grid(make_gaussian(0.0, 1.0), -8.0, 8.0, 16).write_csv(os);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "x,re,im,prob_density");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 16);
}

// Properties.

TEST(Properties, TranslateIsAdditive) {
  const auto base = make_gaussian(0.1, 0.8);
  const auto p = base + translate(base, 0.3, Complex{0.0, 0.5});
  for (double a : {0.25, -1.5, 3.0}) {
    for (double b : {0.5, 0.125, -2.0}) {
      const auto lhs = translate(translate(p, a), b);
      const auto rhs = translate(p, a + b);
      for (std::size_t k = 0; k < p.components().size(); ++k) {
        EXPECT_DOUBLE_EQ(lhs.components()[k].center, rhs.components()[k].center);
        EXPECT_EQ(lhs.components()[k].coeff, rhs.components()[k].coeff);
      }
    }
  }
}

TEST(Properties, UnitModulusTranslatePreservesNorm) {
  const auto base = make_gaussian(0.0, 1.0);
  const auto p = base + translate(base, 0.7, Complex{0.3, -0.2});
  for (double phase : {0.0, 0.4, 2.0}) {
    EXPECT_NEAR(translate(p, 1.1, std::polar(1.0, phase)).norm(), p.norm(), 1e-12);
  }
}

TEST(Properties, MeanPositionCovariantUnderTranslation) {
  const auto base = make_gaussian(0.0, 1.0);
  const auto p = base.scaled(0.6) + translate(base, 0.5, Complex{0.0, 0.8});
  for (double s : {-3.0, 0.01, 2.5}) EXPECT_NEAR(mean_position(translate(p, s)), mean_position(p) + s, 1e-12);
}

TEST(Properties, ClosedFormNormMatchesGrid) {
  const auto base = make_gaussian(0.0, 0.5);
  const auto p = base.scaled(0.9) + translate(base, 0.6, Complex{-0.3, 0.3});
  const auto [lo, hi] = support(p, 9.0);
  EXPECT_NEAR(to_grid(p, lo, hi, 2048).trapezoid_norm_squared(), p.norm_squared(), 1e-6);
}
