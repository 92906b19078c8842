// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qccsim/montecarlo.hpp"
#include "qccsim/neutron.hpp"
#include "qccsim/qcc.hpp"
#include "qccsim/weakmeas.hpp"

using namespace qccsim;

namespace {

// A finite-g fit of c g^p (1 + O(g^2)) lands slightly below p; exponents are
// accepted within this margin of the stated bound.
constexpr double kExponentFitSlack = 0.01;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Check {
  bool ok = true;
  std::string text;

  void require(bool cond, const std::string& what) {
    if (!cond) ok = false;
    text += (text.empty() ? "" : "; ") + std::string(cond ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double x) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// Exponent of y ~ x^p; series that vanish identically are reported as exact.
struct Fit {
  bool exact;
  double slope;
};

Fit fit(const std::vector<double>& x, const std::vector<double>& y) {
  double worst = 0.0;
  for (double v : y) worst = std::max(worst, v);
  if (worst <= 1e-15) return {true, INFINITY};
  return {false, oracle::loglog_slope(x, y)};
}

std::string describe(const Fit& f) { return f.exact ? "exact (identically 0)" : fmt("exponent %.4f", f.slope); }

bool at_least(const Fit& f, double bound) { return f.exact || f.slope >= bound - kExponentFitSlack; }

StateVector spin(Complex up, Complex down) { return StateVector::single(kSpinLabel, {up, down}); }

PrePostContext anomalous(double tan_theta) {
  const double t = std::atan(tan_theta);
  return PrePostContext(spin(1.0, 0.0), spin(std::cos(t), std::sin(t)));
}

Observable sigma_x() { return Observable::from_operator({kSpinLabel}, Operator::pauli_x()); }

struct Context {
  std::string name;
  PrePostContext ctx;
  Observable A;
};

std::vector<Context> weak_contexts() {
  const auto qcc = build_prepost();
  return {{"QCC Pi_I", qcc, arm_projector(Arm::I)},
          {"QCC sigma_x,I", qcc, arm_sigma_x(Arm::I)},
          {"QCC Pi_II", qcc, arm_projector(Arm::II)},
          {"QCC sigma_x,II", qcc, arm_sigma_x(Arm::II)},
          {"anomalous tan=3", anomalous(3.0), sigma_x()}};
}

const std::vector<double> kGs{0.1, 0.05, 0.025};

Outcome criterion1() {
  QccConfig cfg;
  cfg.g_I = cfg.g_II = 0.02;
  const auto rep = run_ideal_qcc(cfg);
  const double err = std::max({std::abs(rep.wv_pi_I - 1.0), std::abs(rep.wv_sigma_I), std::abs(rep.wv_pi_II),
                               std::abs(rep.wv_sigma_II - 1.0)});
  Check c;
  c.require(err <= 1e-12, fmt("max |A^w - expected| = %.3g (tol 1e-12)", err));
  return {c.ok, c.text};
}

Outcome criterion2() {
  Check c;
  const auto phi0 = make_gaussian(0.0, 1.0);
  for (const auto& k : weak_contexts()) {
    std::vector<double> err;
    for (double g : kGs) err.push_back(linear_response_report(k.ctx, k.A, phi0, g).abs_error);
    const auto f = fit(kGs, err);
    c.require(at_least(f, 2.0), k.name + " " + describe(f));
  }
  // arm-I shift of the default QCC configuration at g/sigma = 0.025
  QccConfig cfg;
  cfg.g_I = cfg.g_II = 0.025;
  const auto rep = run_ideal_qcc(cfg);
  const double rel = std::abs(rep.shift_I - 0.025 * rep.wv_pi_I.real()) / std::abs(0.025 * rep.wv_pi_I.real());
  c.require(rel <= 0.01, fmt("arm-I relative error at g/sigma=0.025 = %.3g (tol 1e-2)", rel));
  return {c.ok, c.text};
}

Outcome criterion3() {
  Check c;
  const auto qcc = build_prepost();
  const auto phi0 = make_gaussian(0.0, 1.0);
  const std::pair<const char*, Observable> cases[] = {{"sigma_x,I", arm_sigma_x(Arm::I)},
                                                      {"Pi_II", arm_projector(Arm::II)}};
  for (const auto& [name, A] : cases) {
    if (std::abs(transition_element(qcc, A)) > 1e-15) c.require(false, std::string(name) + " weak value is not null");
    auto normalized_distance = [&](double g) {
      const auto fin = couple_and_postselect(qcc, A, phi0, g).pointer_final;
      return distance(fin.scaled(1.0 / fin.norm()), phi0);
    };
    std::vector<double> d;
    for (double g : kGs) d.push_back(normalized_distance(g));
    const auto f = fit(kGs, d);
    const double d02 = normalized_distance(0.02);
    c.require(at_least(f, 2.0), std::string(name) + " " + describe(f));
    c.require(d02 <= 1e-3, std::string(name) + fmt(" distance at g=0.02 = %.3g (tol 1e-3)", d02));
  }
  return {c.ok, c.text};
}

Outcome criterion4() {
  std::mt19937_64 rng(20260101);
  double worst = 0.0;
  int count = 0;
  for (std::size_t dim : {2u, 4u}) {
    for (int i = 0; i < 50; ++i, ++count) {
      const auto psi = StateVector::single("s", oracle::normalized(oracle::random_amps(rng, dim)));
      auto obs = [&] {
        return Observable::from_operator(
            {"s"}, Operator({dim}, oracle::flatten(oracle::random_hermitian(rng, dim)), OperatorKind::hermitian));
      };
      const auto A = obs();
      const auto B = obs();
      worst = std::max(worst, expectation_decomposition_check(psi, A, B).abs_diff);
    }
  }
  Check c;
  c.require(worst <= 1e-10, std::to_string(count) + fmt(" instances, max |lhs - rhs| = %.3g (tol 1e-10)", worst));
  return {c.ok, c.text};
}

const std::vector<double> kMs{0.01, 0.05, 0.1, 0.25};
const std::vector<double> kAlphas{0.05, 0.1, 0.2, 0.5};

Outcome criterion5() {
  Check c;
  double arm2 = 0.0, closed = 0.0, first_margin = -INFINITY;
  for (double M : kMs) {
    arm2 = std::max(arm2, std::abs(intensity_absorber({Arm::II, M}).ratio - 1.0));
    const auto r = intensity_absorber({Arm::I, M});
    closed = std::max(closed, std::abs(r.ratio - std::exp(-2 * M)));
    first_margin = std::max(first_margin, std::abs(r.ratio - r.first_order_prediction) - 2 * M * M);
  }
  c.require(arm2 == 0.0, fmt("arm II |ratio - 1| = %.3g (exact)", arm2));
  c.require(closed <= 1e-12, fmt("arm I |ratio - exp(-2M)| = %.3g (tol 1e-12)", closed));
  c.require(first_margin <= 0.0, fmt("max(first-order deviation - 2M^2) = %.3g (<= 0)", first_margin));
  return {c.ok, c.text};
}

Outcome criterion6() {
  Check c;
  double closed_I = 0.0, closed_II = 0.0, stated_I = 0.0, second = -INFINITY;
  std::vector<double> dev;
  for (double a : kAlphas) {
    const auto r1 = intensity_magnetic({Arm::I, a});
    const auto r2 = intensity_magnetic({Arm::II, a});
    closed_I = std::max(closed_I, std::abs(r1.ratio - std::pow(std::cos(a / 2), 2)));
    closed_II = std::max(closed_II, std::abs(r2.ratio - (1 + std::pow(std::sin(a / 2), 2))));
    stated_I = std::max(stated_I, std::abs(r1.ratio - std::pow((1 + std::cos(a / 2)) / 2, 2)));
    second = std::max({second, r1.expansion_error - std::pow(a, 4), r2.expansion_error - std::pow(a, 4)});
    dev.push_back(std::abs(systematic_term_report(a).deviation));
  }
  c.require(closed_I <= 1e-12, fmt("arm I |ratio - cos^2(a/2)| = %.3g (tol 1e-12)", closed_I));
  c.require(closed_II <= 1e-12, fmt("arm II |ratio - (1 + sin^2(a/2))| = %.3g (tol 1e-12)", closed_II));
  c.require(second <= 0.0, fmt("max(|exact - second order| - a^4) = %.3g (<= 0)", second));
  const auto f = fit(kAlphas, dev);
  c.require(!f.exact && std::abs(f.slope - 2.0) <= 0.05, "arm I deviation from 1 " + describe(f));
  c.text += fmt("; note: ((1+cos(a/2))/2)^2 is off the exact arm-I ratio by up to %.3g", stated_I);
  return {c.ok, c.text};
}

Outcome criterion7() {
  Check c;
  double worst_pi = -INFINITY, worst_sx = -INFINITY;
  for (double M : kMs) {
    worst_pi = std::max(worst_pi, std::abs(intensity_absorber({Arm::I, M}).inferred_weak_value - 1.0) - 2 * M);
  }
  for (double a : kAlphas) {
    worst_sx = std::max(worst_sx, std::abs(intensity_magnetic({Arm::II, a}).inferred_weak_value - 1.0) - a * a);
  }
  c.require(worst_pi <= 0.0, fmt("max(|inferred Pi_I^w - 1| - 2M) = %.3g (<= 0)", worst_pi));
  c.require(worst_sx <= 0.0, fmt("max(|inferred |sigma_x,II^w| - 1| - a^2) = %.3g (<= 0)", worst_sx));
  return {c.ok, c.text};
}

Outcome criterion8() {
  Check c;
  const std::uint64_t n = 1000000, seed = 20240601;
  const double g = 0.05;
  const auto phi0 = make_gaussian(0.0, 1.0);
  const auto qcc = build_prepost();

  const auto arm1 = sample_trials(qcc, arm_projector(Arm::I), phi0, g, n, seed);
  const double rate = static_cast<double>(arm1.n_postselected) / static_cast<double>(n);
  const double rate_se = std::sqrt(0.25 * 0.75 / static_cast<double>(n));
  c.require(std::abs(rate - 0.25) <= 4 * rate_se, fmt("rate %.5f", rate) + fmt(" vs 0.25 (4 SE = %.2g)", 4 * rate_se));

  struct Case {
    const char* name;
    PrePostContext ctx;
    Observable A;
    double expected;
  };
  const Case cases[] = {{"arm I", qcc, arm_projector(Arm::I), 1.0},
                        {"arm II", qcc, arm_projector(Arm::II), 0.0},
                        {"anomalous", anomalous(3.0), sigma_x(), 3.0}};
  std::uint64_t case_seed = seed;
  for (const auto& k : cases) {
    const auto batch = sample_trials(k.ctx, k.A, phi0, g, n, ++case_seed);
    const auto est = estimate_weak_value(batch, phi0, g);
    const double z = (est.estimated_wv_re - k.expected) / est.std_error;
    c.require(std::abs(z) <= 4.0, std::string(k.name) + fmt(" Re A^w = %.4f", est.estimated_wv_re) +
                                      fmt(" (SE %.3f", est.std_error) + fmt(", z = %.2f)", z));
  }
  const auto serial = sample_trials(qcc, arm_projector(Arm::I), phi0, g, n, seed, 1);
  const auto parallel = sample_trials(qcc, arm_projector(Arm::I), phi0, g, n, seed, 4);
  c.require(serial == arm1 && parallel == arm1, "same seed bit-identical with 1, 4 and default workers");
  return {c.ok, c.text};
}

Outcome criterion9() {
  Check c;
  const auto phi0 = make_gaussian(0.0, 1.0);
  for (const auto& k : weak_contexts()) {
    const double p0 = couple_and_postselect(k.ctx, k.A, phi0, 0.0).postselect_prob_coupled;
    std::vector<double> dp;
    for (double g : kGs) dp.push_back(std::abs(couple_and_postselect(k.ctx, k.A, phi0, g).postselect_prob_coupled - p0));
    const auto f = fit(kGs, dp);
    c.require(at_least(f, 2.0), k.name + " " + describe(f));
  }
  // both arms coupled at once
  std::vector<double> dp;
  QccConfig cfg;
  const double p0 = run_joint_pointers(cfg).postselect_prob_coupled;
  for (double g : kGs) {
    cfg.g_I = cfg.g_II = g;
    dp.push_back(std::abs(run_joint_pointers(cfg).postselect_prob_coupled - p0));
  }
  const auto f = fit(kGs, dp);
  c.require(at_least(f, 2.0), "QCC joint pointers " + describe(f));
  return {c.ok, c.text};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double time_limit_s;  // <= 0 when no limit is stated
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "QCC signature", 1.0, criterion1},
      {2, "pointer-shift law", 5.0, criterion2},
      {3, "null weak value", 0.0, criterion3},
      {4, "expectation decomposition", 1.0, criterion4},
      {5, "absorber intensities", 0.0, criterion5},
      {6, "magnetic intensities", 0.0, criterion6},
      {7, "weak-value inference", 0.0, criterion7},
      {8, "Monte Carlo", 60.0, criterion8},
      {9, "postselection stability", 0.0, criterion9},
  };

  int failed = 0;
  for (const auto& k : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = k.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (k.time_limit_s > 0 && secs >= k.time_limit_s) {
      o.pass = false;
      o.detail += fmt("; FAILED runtime limit %.0f s", k.time_limit_s);
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %d (%s): %s [%.3f s]\n", o.pass ? "PASS" : "FAIL", k.id, k.title, o.detail.c_str(), secs);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
