#pragma once

// Intensity-based emulation of the neutron/photon experiments. Weak values are
// inferred from how an absorber or a spin rotation on one arm changes the
// postselected intensity. There is no pointer anywhere in this module.

#include <cmath>
#include <numbers>

#include "qccsim/errors.hpp"
#include "qccsim/qcc.hpp"
#include "qccsim/qstate.hpp"
#include "qccsim/weakmeas.hpp"

namespace qccsim {

struct AbsorberConfig {
  Arm arm = Arm::I;
  double M = 0.0;  // amplitude attenuation exponent, arm amplitude scaled by exp(-M)
};

struct MagneticConfig {
  Arm arm = Arm::I;
  double alpha = 0.0;  // precession angle about x, radians
};

struct IntensityReport {
  double i0 = 0.0;
  double i_perturbed = 0.0;
  double ratio = 0.0;
  double first_order_prediction = 0.0;
  double second_order_prediction = 0.0;
  double inferred_weak_value = 0.0;
  double expansion_error = 0.0;
};

namespace neutron_detail {

// exp(-M) on the arm, identity on the other arm; spin untouched.
inline Operator absorber_operator(const AbsorberConfig& cfg) {
  const auto a = arm_index(cfg.arm);
  std::vector<Complex> e(16);
  for (std::size_t i = 0; i < 4; ++i) e[i * 4 + i] = (i / 2 == a) ? std::exp(-cfg.M) : 1.0;
  return Operator({2, 2}, std::move(e));
}

// |arm><arm| x (cos(alpha/2) + i sin(alpha/2) sigma_x) + |other><other| x 1
inline Operator rotation_operator(const MagneticConfig& cfg) {
  const auto a = arm_index(cfg.arm);
  const double c = std::cos(0.5 * cfg.alpha), s = std::sin(0.5 * cfg.alpha);
  std::vector<Complex> e(16);
  for (std::size_t p = 0; p < 2; ++p) {
    const std::size_t o = p * 2;
    if (p == a) {
      e[(o + 0) * 4 + o + 0] = c;
      e[(o + 0) * 4 + o + 1] = Complex{0.0, s};
      e[(o + 1) * 4 + o + 0] = Complex{0.0, s};
      e[(o + 1) * 4 + o + 1] = c;
    } else {
      e[(o + 0) * 4 + o + 0] = 1.0;
      e[(o + 1) * 4 + o + 1] = 1.0;
    }
  }
  return Operator({2, 2}, std::move(e), OperatorKind::unitary);
}

inline double postselected_intensity(const PrePostContext& ctx, const Operator& perturbation) {
  return std::norm(inner(ctx.chi_w(), apply(perturbation, ctx.psi_w())));
}

inline void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || std::abs(alpha) > std::numbers::pi) {
    throw InvalidArgument("alpha must satisfy |alpha| <= pi");
  }
}

}  // namespace neutron_detail

inline double infer_projector_weak_value(Arm, double M, double measured_ratio) {
  if (!(M > 0.0)) throw InvalidArgument("projector weak value inference needs M > 0");
  return (1.0 - measured_ratio) / (2.0 * M);
}

// |(sigma_x)_j^w| from the magnetic intensity ratio; pi_w is the caller's choice of
// the arm's projector weak value (inferred, or the ideal delta_{I,j}).
inline double infer_spin_weak_value_modulus(Arm, double alpha, double measured_ratio, double pi_w) {
  if (alpha == 0.0) throw InvalidArgument("spin weak value inference needs alpha != 0");
  const double radicand = (measured_ratio - 1.0) * 4.0 / (alpha * alpha) + pi_w;
  if (radicand < 0.0) {
    throw NegativeRadicand("intensity ratio and projector weak value imply a negative |sigma_x^w|^2 (" +
                           std::to_string(radicand) + ")");
  }
  return std::sqrt(radicand);
}

inline IntensityReport intensity_absorber(const AbsorberConfig& cfg) {
  if (!(cfg.M >= 0.0) || !std::isfinite(cfg.M)) throw InvalidArgument("absorption coefficient M must be >= 0");
  const auto ctx = build_prepost();
  IntensityReport r;
  r.i0 = std::norm(ctx.overlap());
  r.i_perturbed = neutron_detail::postselected_intensity(ctx, neutron_detail::absorber_operator(cfg));
  r.ratio = r.i_perturbed / r.i0;
  const Complex pi_w = weak_value(ctx, arm_projector(cfg.arm));
  r.first_order_prediction = 1.0 - 2.0 * cfg.M * pi_w.real();
  // |1 + (e^-M - 1) Pi^w|^2 to second order in M
  r.second_order_prediction = r.first_order_prediction + cfg.M * cfg.M * (std::norm(pi_w) + pi_w.real());
  r.inferred_weak_value = cfg.M > 0.0 ? infer_projector_weak_value(cfg.arm, cfg.M, r.ratio) : pi_w.real();
  r.expansion_error = std::abs(r.ratio - r.first_order_prediction);
  return r;
}

inline IntensityReport intensity_magnetic(const MagneticConfig& cfg) {
  neutron_detail::check_alpha(cfg.alpha);
  const auto ctx = build_prepost();
  IntensityReport r;
  r.i0 = std::norm(ctx.overlap());
  r.i_perturbed = neutron_detail::postselected_intensity(ctx, neutron_detail::rotation_operator(cfg));
  r.ratio = r.i_perturbed / r.i0;
  const Complex pi_w = weak_value(ctx, arm_projector(cfg.arm));
  const Complex sx_w = weak_value(ctx, arm_sigma_x(cfg.arm));
  const double a2 = cfg.alpha * cfg.alpha;
  r.first_order_prediction = 1.0 - cfg.alpha * sx_w.imag();
  r.second_order_prediction = r.first_order_prediction + 0.25 * a2 * (std::norm(sx_w) - pi_w.real());
  if (cfg.alpha != 0.0) {
    r.inferred_weak_value = infer_spin_weak_value_modulus(cfg.arm, cfg.alpha, r.ratio, pi_w.real());
  } else {
    r.inferred_weak_value = std::abs(sx_w);
  }
  r.expansion_error = std::abs(r.ratio - r.second_order_prediction);
  return r;
}

// Arm-I magnetic effect that survives although (sigma_x)_I^w = 0. Because the
// rotation is linear in 1 and sigma_x, the postselected amplitude ratio is exactly
//   1 + (cos(alpha/2) - 1) Pi^w + i sin(alpha/2) (sigma_x)^w,
// so the deviation splits into an identity-term part and a sigma_x part.
struct SystematicTermReport {
  double alpha = 0.0;
  double ratio = 0.0;
  double deviation = 0.0;             // ratio - 1
  double leading_order = 0.0;         // -alpha^2 / 4
  Complex identity_term;              // (cos(alpha/2) - 1) Pi_I^w
  Complex sigma_term;                 // i sin(alpha/2) (sigma_x)_I^w
  double ratio_from_decomposition = 0.0;
  double ratio_alternate_sign = 0.0;  // with exp(-i alpha sigma_x / 2)
};

inline SystematicTermReport systematic_term_report(double alpha) {
  neutron_detail::check_alpha(alpha);
  const auto ctx = build_prepost();
  SystematicTermReport r;
  r.alpha = alpha;
  r.ratio = intensity_magnetic({Arm::I, alpha}).ratio;
  r.ratio_alternate_sign = intensity_magnetic({Arm::I, -alpha}).ratio;
  r.deviation = r.ratio - 1.0;
  r.leading_order = -0.25 * alpha * alpha;
  const Complex pi_w = weak_value(ctx, arm_projector(Arm::I));
  const Complex sx_w = weak_value(ctx, arm_sigma_x(Arm::I));
  r.identity_term = (std::cos(0.5 * alpha) - 1.0) * pi_w;
  r.sigma_term = Complex{0.0, std::sin(0.5 * alpha)} * sx_w;
  r.ratio_from_decomposition = std::norm(1.0 + r.identity_term + r.sigma_term);
  return r;
}

inline nlohmann::json to_json(const IntensityReport& r) {
  return {{"i0", r.i0},
          {"i_perturbed", r.i_perturbed},
          {"ratio", r.ratio},
          {"first_order_prediction", r.first_order_prediction},
          {"second_order_prediction", r.second_order_prediction},
          {"inferred_weak_value", r.inferred_weak_value},
          {"expansion_error", r.expansion_error}};
}

inline nlohmann::json to_json(const SystematicTermReport& r) {
  return {{"alpha", r.alpha},
          {"ratio", r.ratio},
          {"deviation", r.deviation},
          {"leading_order", r.leading_order},
          {"identity_term_re", r.identity_term.real()},
          {"identity_term_im", r.identity_term.imag()},
          {"sigma_term_re", r.sigma_term.real()},
          {"sigma_term_im", r.sigma_term.imag()},
          {"ratio_from_decomposition", r.ratio_from_decomposition},
          {"ratio_alternate_sign", r.ratio_alternate_sign}};
}

}  // namespace qccsim
