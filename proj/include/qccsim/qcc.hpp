#pragma once

// Ideal Quantum Cheshire Cat scenario: a spin-1/2 particle in a two-arm
// interferometer, preselected in (|I> + |II>)|+z>/sqrt(2) and postselected in
// (|I>|+z> + |II>|-z>)/sqrt(2). Beam splitters, mirrors and the spin flipper are
// folded into these two states.
//
// System space is path(2) x spin(2); path index 0 = arm I, 1 = arm II;
// spin index 0 = |+z>, 1 = |-z>.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qccsim/pointer.hpp"
#include "qccsim/qstate.hpp"
#include "qccsim/weakmeas.hpp"

namespace qccsim {

inline const std::string kPathLabel = "path";
inline const std::string kSpinLabel = "spin";

enum class Arm { I, II };

inline std::size_t arm_index(Arm a) { return a == Arm::I ? 0 : 1; }
inline Arm other(Arm a) { return a == Arm::I ? Arm::II : Arm::I; }
inline const char* to_string(Arm a) { return a == Arm::I ? "I" : "II"; }

enum class ObservableTag { projector, sigma_x };

inline const char* to_string(ObservableTag t) { return t == ObservableTag::projector ? "projector" : "sigma_x"; }

// Which spin the postselection pairs with each arm.
enum class Postselection {
  standard,  // |I>|+z> + |II>|-z>
  swapped,   // |I>|-z> + |II>|+z>
};

namespace qcc_detail {

inline StateVector path_spin(std::size_t path, Complex s_up, Complex s_down) {
  std::vector<Complex> amps(4);
  amps[path * 2 + 0] = s_up;
  amps[path * 2 + 1] = s_down;
  return StateVector({kPathLabel, kSpinLabel}, {2, 2}, std::move(amps));
}

}  // namespace qcc_detail

inline PrePostContext build_prepost(Postselection post = Postselection::standard) {
  const double r = std::numbers::sqrt2 / 2.0;
  const auto psi = qcc_detail::path_spin(0, r, 0.0) + qcc_detail::path_spin(1, r, 0.0);
  const auto chi = post == Postselection::standard
                       ? qcc_detail::path_spin(0, r, 0.0) + qcc_detail::path_spin(1, 0.0, r)
                       : qcc_detail::path_spin(0, 0.0, r) + qcc_detail::path_spin(1, r, 0.0);
  return PrePostContext(psi, chi);
}

// |arm><arm| x 1_spin
inline Observable arm_projector(Arm arm) {
  const auto a = arm_index(arm), b = 1 - a;
  return Observable::from_spectrum(
      {kPathLabel, kSpinLabel}, {1.0, 1.0, 0.0, 0.0},
      {qcc_detail::path_spin(a, 1.0, 0.0), qcc_detail::path_spin(a, 0.0, 1.0), qcc_detail::path_spin(b, 1.0, 0.0),
       qcc_detail::path_spin(b, 0.0, 1.0)});
}

// |arm><arm| x sigma_x
inline Observable arm_sigma_x(Arm arm) {
  const auto a = arm_index(arm), b = 1 - a;
  const double r = std::numbers::sqrt2 / 2.0;
  return Observable::from_spectrum(
      {kPathLabel, kSpinLabel}, {1.0, -1.0, 0.0, 0.0},
      {qcc_detail::path_spin(a, r, r), qcc_detail::path_spin(a, r, -r), qcc_detail::path_spin(b, 1.0, 0.0),
       qcc_detail::path_spin(b, 0.0, 1.0)});
}

inline Observable arm_observable(ObservableTag tag, Arm arm) {
  return tag == ObservableTag::projector ? arm_projector(arm) : arm_sigma_x(arm);
}

struct QccConfig {
  ObservableTag observable_I = ObservableTag::projector;
  ObservableTag observable_II = ObservableTag::sigma_x;
  double g_I = 0.0;
  double g_II = 0.0;
  double pointer_width = 1.0;
  Postselection postselection = Postselection::standard;
};

inline constexpr double kQccMarginWarning = 0.2;

struct QccReport {
  Complex wv_pi_I, wv_sigma_I, wv_pi_II, wv_sigma_II;
  double shift_I = 0.0;
  double shift_II = 0.0;
  Complex postselect_amp;
  double postselect_prob = 0.0;
  double margin_I = 0.0;
  double margin_II = 0.0;
  bool margin_warning = false;
  std::optional<GaussianPointerState> pointer_I;
  std::optional<GaussianPointerState> pointer_II;
};

namespace qcc_detail {

inline QccReport weak_value_part(const QccConfig& cfg, const PrePostContext& ctx, const GaussianPointerState& phi0) {
  if (!(cfg.pointer_width > 0.0)) throw InvalidArgument("pointer_width must be positive");
  QccReport rep;
  rep.wv_pi_I = weak_value(ctx, arm_projector(Arm::I));
  rep.wv_sigma_I = weak_value(ctx, arm_sigma_x(Arm::I));
  rep.wv_pi_II = weak_value(ctx, arm_projector(Arm::II));
  rep.wv_sigma_II = weak_value(ctx, arm_sigma_x(Arm::II));
  rep.postselect_amp = ctx.overlap();
  rep.postselect_prob = std::norm(rep.postselect_amp);
  rep.margin_I = validity_margin(ctx, arm_observable(cfg.observable_I, Arm::I), phi0, cfg.g_I).margin;
  rep.margin_II = validity_margin(ctx, arm_observable(cfg.observable_II, Arm::II), phi0, cfg.g_II).margin;
  rep.margin_warning = rep.margin_I >= kQccMarginWarning || rep.margin_II >= kQccMarginWarning;
  return rep;
}

}  // namespace qcc_detail

// One pointer per arm, each coupled and read out on its own.
inline QccReport run_ideal_qcc(const QccConfig& cfg) {
  const auto ctx = build_prepost(cfg.postselection);
  const auto phi0 = make_gaussian(0.0, cfg.pointer_width);
  auto rep = qcc_detail::weak_value_part(cfg, ctx, phi0);
  const auto res_I = couple_and_postselect(ctx, arm_observable(cfg.observable_I, Arm::I), phi0, cfg.g_I);
  const auto res_II = couple_and_postselect(ctx, arm_observable(cfg.observable_II, Arm::II), phi0, cfg.g_II);
  rep.shift_I = mean_position(res_I.pointer_final) - mean_position(phi0);
  rep.shift_II = mean_position(res_II.pointer_final) - mean_position(phi0);
  rep.pointer_I = res_I.pointer_final;
  rep.pointer_II = res_II.pointer_final;
  return rep;
}

// Two-pointer state sum_t c_t phi(x_I - a_t) phi(x_II - b_t), both real Gaussians of one width.
struct JointPointerTerm {
  Complex coeff;
  double center_I;
  double center_II;
};

class JointPointerState {
 public:
  JointPointerState(double width, std::vector<JointPointerTerm> terms) : width_(width), terms_(std::move(terms)) {}

  double width() const noexcept { return width_; }
  const std::vector<JointPointerTerm>& terms() const noexcept { return terms_; }

  double norm_squared() const { return moments().first.real(); }

  // <x_I> and <x_II> of the normalized state.
  std::pair<double, double> marginal_means() const {
    const auto [ov, xs] = moments();
    if (!(ov.real() > 0.0)) throw ZeroNorm("marginal mean of a zero-norm joint pointer");
    return {xs.first.real() / ov.real(), xs.second.real() / ov.real()};
  }

  Complex amplitude(double x_I, double x_II) const {
    const double n = std::pow(2.0 * std::numbers::pi * width_ * width_, -0.5);
    const double s = 4.0 * width_ * width_;
    Complex acc = 0.0;
    for (const auto& t : terms_) {
      const double a = x_I - t.center_I, b = x_II - t.center_II;
      acc += t.coeff * n * std::exp(-(a * a + b * b) / s);
    }
    return acc;
  }

 private:
  std::pair<Complex, std::pair<Complex, Complex>> moments() const {
    Complex ov = 0.0, xi = 0.0, xii = 0.0;
    for (const auto& a : terms_) {
      for (const auto& b : terms_) {
        const auto mi = detail::gaussian_moments({1.0, a.center_I, 0.0}, {1.0, b.center_I, 0.0}, width_);
        const auto mii = detail::gaussian_moments({1.0, a.center_II, 0.0}, {1.0, b.center_II, 0.0}, width_);
        const Complex w = std::conj(a.coeff) * b.coeff;
        ov += w * mi.overlap * mii.overlap;
        xi += w * mi.position * mii.overlap;
        xii += w * mi.overlap * mii.position;
      }
    }
    return {ov, {xi, xii}};
  }

  double width_;
  std::vector<JointPointerTerm> terms_;
};

enum class CouplingOrder { I_then_II, II_then_I };

struct QccJointReport {
  QccReport report;
  JointPointerState pointers;
  double postselect_prob_coupled = 0.0;
};

// Both couplings act on path x spin x pointer_I x pointer_II before one postselection.
inline QccJointReport run_joint_pointers(const QccConfig& cfg, CouplingOrder order = CouplingOrder::I_then_II) {
  const auto ctx = build_prepost(cfg.postselection);
  const auto phi0 = make_gaussian(0.0, cfg.pointer_width);
  auto rep = qcc_detail::weak_value_part(cfg, ctx, phi0);
  const auto obs_I = arm_observable(cfg.observable_I, Arm::I);
  const auto obs_II = arm_observable(cfg.observable_II, Arm::II);

  std::vector<JointPointerTerm> terms;
  for (const auto& bi : obs_I.spectral_branches()) {
    for (const auto& bii : obs_II.spectral_branches()) {
      const auto evolved = order == CouplingOrder::I_then_II
                               ? apply(bii.projector, obs_II.labels(), apply(bi.projector, obs_I.labels(), ctx.psi_w()))
                               : apply(bi.projector, obs_I.labels(), apply(bii.projector, obs_II.labels(), ctx.psi_w()));
      const Complex c = inner(ctx.chi_w(), evolved);
      if (c == Complex{}) continue;
      terms.push_back({c, cfg.g_I * bi.eigenvalue, cfg.g_II * bii.eigenvalue});
    }
  }
  JointPointerState joint(cfg.pointer_width, std::move(terms));
  const auto [mi, mii] = joint.marginal_means();
  rep.shift_I = mi;
  rep.shift_II = mii;
  const double p = joint.norm_squared();
  return {std::move(rep), std::move(joint), p};
}

struct JointDensityGrid {
  double lo = 0.0;  // both axes span [lo, hi]
  double hi = 0.0;
  std::size_t n_points = 0;
  std::vector<double> density;  // row-major, index i * n + j for (x_I[i], x_II[j])

  double dx() const { return (hi - lo) / static_cast<double>(n_points - 1); }
  double x(std::size_t i) const { return lo + dx() * static_cast<double>(i); }

  // Columns x_I,x_II,prob_density with a header row.
  void write_csv(std::ostream& os) const {
    os << "x_I,x_II,prob_density\n";
    char buf[96];
    for (std::size_t i = 0; i < n_points; ++i) {
      for (std::size_t j = 0; j < n_points; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", x(i), x(j), density[i * n_points + j]);
        os << buf;
      }
    }
  }
};

inline void check_joint_grid(std::size_t n_points, std::size_t capacity = kDefaultCapacity) {
  if (n_points < 2) throw InvalidArgument("joint grid needs at least 2 points per axis");
  if (n_points > capacity / n_points) throw CapacityError("joint pointer grid exceeds capacity");
}

// |Psi(x_I, x_II)|^2 on an n x n grid spanning +-8 widths around the term centers.
inline JointDensityGrid joint_density_grid(const JointPointerState& s, std::size_t n_points,
                                           std::size_t capacity = kDefaultCapacity) {
  check_joint_grid(n_points, capacity);
  JointDensityGrid g;
  g.n_points = n_points;
  for (const auto& t : s.terms()) {
    g.lo = std::min({g.lo, t.center_I, t.center_II});
    g.hi = std::max({g.hi, t.center_I, t.center_II});
  }
  g.lo -= 8.0 * s.width();
  g.hi += 8.0 * s.width();
  g.density.resize(n_points * n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    for (std::size_t j = 0; j < n_points; ++j) g.density[i * n_points + j] = std::norm(s.amplitude(g.x(i), g.x(j)));
  return g;
}

inline nlohmann::json to_json(const QccReport& r) {
  return {{"wv_pi_I_re", r.wv_pi_I.real()},       {"wv_pi_I_im", r.wv_pi_I.imag()},
          {"wv_sigma_I_re", r.wv_sigma_I.real()}, {"wv_sigma_I_im", r.wv_sigma_I.imag()},
          {"wv_pi_II_re", r.wv_pi_II.real()},     {"wv_pi_II_im", r.wv_pi_II.imag()},
          {"wv_sigma_II_re", r.wv_sigma_II.real()}, {"wv_sigma_II_im", r.wv_sigma_II.imag()},
          {"shift_I", r.shift_I},                 {"shift_II", r.shift_II},
          {"postselect_amp_re", r.postselect_amp.real()}, {"postselect_amp_im", r.postselect_amp.imag()},
          {"postselect_prob", r.postselect_prob}, {"validity_margin_I", r.margin_I},
          {"validity_margin_II", r.margin_II},    {"margin_warning", r.margin_warning}};
}

}  // namespace qccsim
