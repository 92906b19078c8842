#include <gtest/gtest.h>

#include <numbers>

#include "oracles.hpp"
#include "qccsim/neutron.hpp"

using namespace qccsim;

namespace {

// Postselected amplitude written out per arm: psi = (|I,+z> + |II,+z>)/sqrt2,
// chi = (|I,+z> + |II,-z>)/sqrt2, so <chi|K|psi> = (<+z|K_I|+z> + <-z|K_II|+z>) / 2.
double oracle_ratio(Complex up_up_I, Complex down_up_II) {
  return std::norm(0.5 * (up_up_I + down_up_II)) / 0.25;
}

double absorber_oracle(Arm arm, double M) {
  const double a = std::exp(-M);
  return arm == Arm::I ? oracle_ratio(a, 0.0) : oracle_ratio(1.0, 0.0);
}

// exp(i alpha sigma_x / 2) = cos + i sin sigma_x: <+z|.|+z> = cos, <-z|.|+z> = i sin.
double magnetic_oracle(Arm arm, double alpha) {
  const double c = std::cos(alpha / 2), s = std::sin(alpha / 2);
  return arm == Arm::I ? oracle_ratio(c, 0.0) : oracle_ratio(1.0, Complex{0.0, s});
}

}  // namespace

TEST(Absorber, ArmIRatioIsExponential) {
  const auto r = intensity_absorber({Arm::I, 0.1});
  EXPECT_NEAR(r.ratio, std::exp(-0.2), 1e-15);
  EXPECT_NEAR(r.ratio, absorber_oracle(Arm::I, 0.1), 1e-15);
  EXPECT_NEAR(r.i0, 0.25, 1e-15);
  EXPECT_NEAR(r.first_order_prediction, 0.8, 1e-15);
  EXPECT_NEAR(r.expansion_error, std::abs(std::exp(-0.2) - 0.8), 1e-15);
}

TEST(Absorber, ArmIIIsDark) {
  for (double M : {0.0, 0.1, 1.0, 5.0}) {
    const auto r = intensity_absorber({Arm::II, M});
    EXPECT_NEAR(r.ratio, absorber_oracle(Arm::II, M), 1e-15);
    EXPECT_NEAR(r.ratio, 1.0, 1e-15);
    EXPECT_NEAR(r.inferred_weak_value, 0.0, 1e-15);
  }
}

TEST(Absorber, ZeroAbsorptionIsUnity) {
  const auto r = intensity_absorber({Arm::I, 0.0});
  EXPECT_EQ(r.ratio, 1.0);
  EXPECT_NEAR(r.inferred_weak_value, 1.0, 1e-15);
}

TEST(Absorber, RejectsNegativeM) {
  EXPECT_THROW(intensity_absorber({Arm::I, -0.1}), InvalidArgument);
  EXPECT_THROW(intensity_absorber({Arm::I, std::nan("")}), InvalidArgument);
}

TEST(Absorber, SecondOrderPredictionTracksExactRatio) {
  std::vector<double> Ms{0.2, 0.1, 0.05, 0.025}, err1, err2;
  for (double M : Ms) {
    const auto r = intensity_absorber({Arm::I, M});
    err1.push_back(std::abs(r.ratio - r.first_order_prediction));
    err2.push_back(std::abs(r.ratio - r.second_order_prediction));
  }
  EXPECT_NEAR(oracle::loglog_slope(Ms, err1), 2.0, 0.1);
  EXPECT_NEAR(oracle::loglog_slope(Ms, err2), 3.0, 0.1);
}

TEST(Absorber, InferenceRecoversWeakValueAsMShrinks) {
  double last = INFINITY;
  for (double M : {0.1, 0.01, 0.001}) {
    const double err = std::abs(intensity_absorber({Arm::I, M}).inferred_weak_value - 1.0);
    EXPECT_LE(err, M * 1.01);
    EXPECT_LT(err, last);
    last = err;
  }
}

TEST(Inference, ProjectorRoundTrip) {
  EXPECT_NEAR(infer_projector_weak_value(Arm::I, 0.01, 1.0 - 2 * 0.01 * 0.7), 0.7, 1e-12);
  EXPECT_THROW(infer_projector_weak_value(Arm::I, 0.0, 1.0), InvalidArgument);
}

TEST(Inference, SpinModulusRoundTrip) {
  const double alpha = 0.1, pi_w = 0.3, sw = 1.7;
  const double ratio = 1 + alpha * alpha / 4 * (sw * sw - pi_w);
  EXPECT_NEAR(infer_spin_weak_value_modulus(Arm::II, alpha, ratio, pi_w), sw, 1e-12);
}

TEST(Inference, NegativeRadicand) {
  EXPECT_THROW(infer_spin_weak_value_modulus(Arm::I, 0.2, 0.5, 0.0), NegativeRadicand);
  EXPECT_THROW(infer_spin_weak_value_modulus(Arm::I, 0.0, 1.0, 0.0), InvalidArgument);
}

TEST(Magnetic, ExactRatiosMatchArmwiseOracle) {
  for (double alpha : {-3.0, -0.5, 0.0, 0.01, 0.2, 1.0, std::numbers::pi}) {
    EXPECT_NEAR(intensity_magnetic({Arm::I, alpha}).ratio, magnetic_oracle(Arm::I, alpha), 1e-14) << alpha;
    EXPECT_NEAR(intensity_magnetic({Arm::II, alpha}).ratio, magnetic_oracle(Arm::II, alpha), 1e-14) << alpha;
  }
}

TEST(Magnetic, ClosedForms) {
  const double alpha = 0.2;
  EXPECT_NEAR(intensity_magnetic({Arm::I, alpha}).ratio, std::pow(std::cos(alpha / 2), 2), 1e-14);
  EXPECT_NEAR(intensity_magnetic({Arm::II, alpha}).ratio, 1 + std::pow(std::sin(alpha / 2), 2), 1e-14);
}

TEST(Magnetic, PredictionsFromWeakValues) {
  const auto r1 = intensity_magnetic({Arm::I, 0.2});
  EXPECT_NEAR(r1.first_order_prediction, 1.0, 1e-15);
  EXPECT_NEAR(r1.second_order_prediction, 1.0 - 0.01, 1e-15);
  const auto r2 = intensity_magnetic({Arm::II, 0.2});
  EXPECT_NEAR(r2.first_order_prediction, 1.0, 1e-15);
  EXPECT_NEAR(r2.second_order_prediction, 1.0 + 0.01, 1e-15);
}

TEST(Magnetic, ExpansionErrorBoundedByAlphaFourth) {
  for (Arm arm : {Arm::I, Arm::II}) {
    std::vector<double> as{0.4, 0.2, 0.1, 0.05}, errs;
    for (double a : as) {
      const auto r = intensity_magnetic({arm, a});
      EXPECT_LE(r.expansion_error, a * a * a * a);
      errs.push_back(r.expansion_error);
    }
    EXPECT_NEAR(oracle::loglog_slope(as, errs), 4.0, 0.05);
  }
}

TEST(Magnetic, InferredSpinModulus) {
  EXPECT_NEAR(intensity_magnetic({Arm::II, 0.01}).inferred_weak_value, 1.0, 1e-5);
  EXPECT_NEAR(intensity_magnetic({Arm::I, 0.01}).inferred_weak_value, 0.01 / std::sqrt(12.0), 1e-6);
  EXPECT_NEAR(intensity_magnetic({Arm::II, 0.0}).inferred_weak_value, 1.0, 1e-15);
}

TEST(Magnetic, AlphaRange) {
  EXPECT_THROW(intensity_magnetic({Arm::I, 3.2}), InvalidArgument);
  EXPECT_THROW(systematic_term_report(-3.2), InvalidArgument);
  EXPECT_NO_THROW(intensity_magnetic({Arm::I, -std::numbers::pi}));
}

TEST(SystematicTerm, ValuesAtSmallAlpha) {
  const auto s = systematic_term_report(0.2);
  EXPECT_NEAR(s.deviation, -std::pow(std::sin(0.1), 2), 1e-15);
  EXPECT_NEAR(s.leading_order, -0.01, 1e-17);
  EXPECT_NEAR(s.deviation / s.leading_order, 0.99667, 1e-5);
  EXPECT_LE(std::abs(s.sigma_term), 1e-15);
  EXPECT_NEAR(s.identity_term.real(), std::cos(0.1) - 1, 1e-15);
}

TEST(SystematicTerm, DecompositionIsExactAndSignIndependent) {
  for (double alpha : {0.01, 0.2, 1.0, 2.5, std::numbers::pi}) {
    const auto s = systematic_term_report(alpha);
    EXPECT_NEAR(s.ratio_from_decomposition, s.ratio, 1e-14);
    EXPECT_NEAR(s.ratio_alternate_sign, s.ratio, 1e-14);
  }
}

TEST(SystematicTerm, NegativeForQuarterTurn) {
  for (double alpha = 0.05; alpha <= std::numbers::pi / 2; alpha += 0.05) EXPECT_LT(systematic_term_report(alpha).deviation, 0.0);
}

TEST(Json, Fields) {
  const auto j = to_json(intensity_absorber({Arm::I, 0.1}));
  for (const char* k : {"i0", "i_perturbed", "ratio", "first_order_prediction", "second_order_prediction",
                        "inferred_weak_value", "expansion_error"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_TRUE(to_json(systematic_term_report(0.2)).contains("deviation"));
}

// Properties.

TEST(Properties, AbsorberRatioInUnitIntervalAndMonotone) {
  double last = 1.0;
  for (double M = 0.0; M < 3.0; M += 0.25) {
    const double r = intensity_absorber({Arm::I, M}).ratio;
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, last + 1e-15);
    last = r;
  }
}

TEST(Properties, MagneticRatioEvenInAlpha) {
  for (Arm arm : {Arm::I, Arm::II}) {
    for (double a : {0.1, 0.7, 2.0}) {
      EXPECT_NEAR(intensity_magnetic({arm, a}).ratio, intensity_magnetic({arm, -a}).ratio, 1e-14);
    }
  }
}
