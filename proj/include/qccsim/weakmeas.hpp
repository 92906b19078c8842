#pragma once

// Pre/postselected weak measurements with a von Neumann pointer.
//
// The system is prepared in psi_i, evolves with U(t_w, t_i), couples to the pointer
// through exp(-i g A P) at t_w, evolves with U(t_f, t_w) and is postselected on chi_f.
// g is the time-integrated coupling; the coupling is impulsive.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qccsim/errors.hpp"
#include "qccsim/pointer.hpp"
#include "qccsim/qstate.hpp"

namespace qccsim {

struct SpectralBranch {
  double eigenvalue;
  Operator projector;  // sum of |a_k><a_k| over the eigenvalue's eigenvectors
};

// Hermitian observable with its spectral decomposition. It acts on the subsystems
// named by `labels()`; any other subsystem of a state it is applied to is a spectator.
class Observable {
 public:
  // From explicit eigenpairs; the operator is rebuilt as sum a_k |a_k><a_k|.
  static Observable from_spectrum(std::vector<std::string> labels, std::vector<double> eigvals,
                                  std::vector<StateVector> eigvecs) {
    if (eigvals.empty() || eigvals.size() != eigvecs.size()) {
      throw InvalidArgument("observable needs one eigenvector per eigenvalue");
    }
    const auto dims = eigvecs.front().dims();
    const auto n = eigvecs.front().size();
    if (eigvecs.size() != n) throw InvalidArgument("observable eigenbasis must be complete");
    std::vector<Complex> e(n * n);
    for (std::size_t k = 0; k < eigvals.size(); ++k) {
      if (eigvecs[k].dims() != dims) throw DimensionMismatch("eigenvectors of different dims");
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) e[r * n + c] += eigvals[k] * eigvecs[k][r] * std::conj(eigvecs[k][c]);
    }
    // Rebuilt sums carry rounding; symmetrize before tagging hermitian.
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r; c < n; ++c) {
        const Complex avg = 0.5 * (e[r * n + c] + std::conj(e[c * n + r]));
        e[r * n + c] = avg;
        e[c * n + r] = std::conj(avg);
      }
    }
    Observable obs(std::move(labels), Operator(dims, std::move(e), OperatorKind::hermitian), std::move(eigvals),
                   std::move(eigvecs));
    obs.check();
    return obs;
  }

  // Diagonalizes a hermitian operator. Eigenvalues closer than Tolerances::eigen are
  // merged to their mean so each degenerate eigenspace shares one pointer shift.
  static Observable from_operator(std::vector<std::string> labels, const Operator& op) {
    if (op.kind() != OperatorKind::hermitian && op.hermiticity_defect() > Tolerances::structural) {
      throw InvalidArgument("observable operator must be hermitian");
    }
    const auto n = static_cast<Eigen::Index>(op.side());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c) m(r, c) = op(r, c);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");

    std::vector<double> vals(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    for (std::size_t i = 0; i < vals.size();) {
      std::size_t j = i + 1;
      while (j < vals.size() && vals[j] - vals[j - 1] <= Tolerances::eigen) ++j;
      double mean = 0.0;
      for (std::size_t k = i; k < j; ++k) mean += vals[k];
      mean /= static_cast<double>(j - i);
      for (std::size_t k = i; k < j; ++k) vals[k] = mean;
      i = j;
    }

    std::vector<StateVector> vecs;
    std::vector<std::string> sub_labels;
    for (std::size_t k = 0; k < op.dims().size(); ++k) sub_labels.push_back("a" + std::to_string(k));
    for (Eigen::Index k = 0; k < n; ++k) {
      std::vector<Complex> amps(static_cast<std::size_t>(n));
      for (Eigen::Index r = 0; r < n; ++r) amps[static_cast<std::size_t>(r)] = solver.eigenvectors()(r, k);
      vecs.emplace_back(sub_labels, op.dims(), std::move(amps));
    }
    Observable obs(std::move(labels), op.with_kind(OperatorKind::hermitian), std::move(vals), std::move(vecs));
    obs.check();
    return obs;
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const Operator& op() const noexcept { return op_; }
  const std::vector<double>& eigvals() const noexcept { return eigvals_; }
  const std::vector<StateVector>& eigvecs() const noexcept { return eigvecs_; }

  // One branch per distinct eigenvalue, in ascending eigenvalue order.
  std::vector<SpectralBranch> spectral_branches() const {
    std::vector<std::size_t> order(eigvals_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return eigvals_[a] < eigvals_[b]; });
    std::vector<SpectralBranch> out;
    for (auto k : order) {
      const auto proj = Operator::outer(eigvecs_[k], eigvecs_[k]);
      if (!out.empty() && out.back().eigenvalue == eigvals_[k]) {
        out.back().projector = out.back().projector + proj;
      } else {
        out.push_back({eigvals_[k], proj});
      }
    }
    return out;
  }

  // a*A + b*B on the same subsystems; rediagonalized.
  friend Observable combine(double a, const Observable& x, double b, const Observable& y) {
    if (x.labels_ != y.labels_) throw DimensionMismatch("combined observables must act on the same subsystems");
    const auto sum = x.op_.scaled(a) + y.op_.scaled(b);
    return from_operator(x.labels_, sum.with_kind(OperatorKind::hermitian));
  }

 private:
  Observable(std::vector<std::string> labels, Operator op, std::vector<double> eigvals,
             std::vector<StateVector> eigvecs)
      : labels_(std::move(labels)), op_(std::move(op)), eigvals_(std::move(eigvals)), eigvecs_(std::move(eigvecs)) {
    if (labels_.size() != op_.dims().size()) throw DimensionMismatch("observable labels do not match its dims");
  }

  void check() const {
    for (std::size_t k = 0; k < eigvecs_.size(); ++k) {
      const auto av = apply(op_, eigvecs_[k]);
      for (std::size_t i = 0; i < av.size(); ++i) {
        if (std::abs(av[i] - eigvals_[k] * eigvecs_[k][i]) > Tolerances::eigen) {
          throw InvalidArgument("observable eigen-relation violated");
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        const auto ip = inner(eigvecs_[j], eigvecs_[k]);
        if (std::abs(ip - (j == k ? 1.0 : 0.0)) > Tolerances::eigen) {
          throw InvalidArgument("observable eigenvectors are not orthonormal");
        }
      }
    }
  }

  std::vector<std::string> labels_;
  Operator op_;
  std::vector<double> eigvals_;
  std::vector<StateVector> eigvecs_;
};

// Preselected state, the two intermediate evolutions, and the postselected state.
class PrePostContext {
 public:
  PrePostContext(StateVector psi_i, Operator u_wi, Operator u_fw, StateVector chi_f)
      : psi_i_(std::move(psi_i)), u_wi_(std::move(u_wi)), u_fw_(std::move(u_fw)), chi_f_(std::move(chi_f)) {
    if (psi_i_.dims() != chi_f_.dims() || u_wi_.dims() != psi_i_.dims() || u_fw_.dims() != psi_i_.dims()) {
      throw DimensionMismatch("pre/post context members act on different spaces");
    }
    if (std::abs(psi_i_.norm() - 1.0) > Tolerances::structural) throw InvalidArgument("psi_i is not normalized");
    if (std::abs(chi_f_.norm() - 1.0) > Tolerances::structural) throw InvalidArgument("chi_f is not normalized");
    if (u_wi_.kind() != OperatorKind::unitary || u_fw_.kind() != OperatorKind::unitary) {
      throw InvalidArgument("intermediate evolutions must be unitary");
    }
    psi_w_ = apply(u_wi_, psi_i_);
    chi_w_ = apply(u_fw_.adjoint(), chi_f_);
  }

  // Both evolutions are the identity.
  PrePostContext(StateVector psi, StateVector chi)
      : PrePostContext(psi, Operator::identity(psi.dims()), Operator::identity(psi.dims()), chi) {}

  const StateVector& psi_i() const noexcept { return psi_i_; }
  const StateVector& chi_f() const noexcept { return chi_f_; }
  const Operator& u_wi() const noexcept { return u_wi_; }
  const Operator& u_fw() const noexcept { return u_fw_; }
  // |psi(t_w)> = U(t_w,t_i)|psi_i>
  const StateVector& psi_w() const noexcept { return *psi_w_; }
  // |chi(t_w)> = U(t_f,t_w)^dagger |chi_f>
  const StateVector& chi_w() const noexcept { return *chi_w_; }

  // <chi(t_w)|psi(t_w)>
  Complex overlap() const { return inner(chi_w(), psi_w()); }

 private:
  StateVector psi_i_;
  Operator u_wi_;
  Operator u_fw_;
  StateVector chi_f_;
  std::optional<StateVector> psi_w_;
  std::optional<StateVector> chi_w_;
};

// <chi(t_w)| A |psi(t_w)>; defined even for orthogonal postselection.
inline Complex transition_element(const PrePostContext& ctx, const Observable& A) {
  return inner(ctx.chi_w(), apply(A.op(), A.labels(), ctx.psi_w()));
}

inline Complex weak_value(const PrePostContext& ctx, const Observable& A) {
  const Complex den = ctx.overlap();
  if (std::abs(den) <= Tolerances::orthogonal) {
    throw OrthogonalPostselection("weak value undefined: |<chi|psi>| = " + std::to_string(std::abs(den)));
  }
  return transition_element(ctx, A) / den;
}

struct WeakMeasurementResult {
  std::optional<Complex> weak_value;  // empty when the postselection is orthogonal
  Complex transition_element;
  Complex overlap;                      // <chi(t_w)|psi(t_w)>
  double postselect_prob_unperturbed;  // |<chi_f|psi_f>|^2
  double postselect_prob_coupled;      // ||pointer_final||^2
  GaussianPointerState pointer_final;  // unnormalized pointer after postselection
  double g;
};

// Exact evolution: pointer_final = sum over eigenvalues a of <chi(t_w)|P_a|psi(t_w)> phi0(x - g a).
inline WeakMeasurementResult couple_and_postselect(const PrePostContext& ctx, const Observable& A,
                                                   const GaussianPointerState& phi0, double g) {
  if (!std::isfinite(g)) throw InvalidArgument("coupling g must be finite");
  for (const auto& l : A.labels()) (void)ctx.psi_w().index_of(l);
  GaussianPointerState final_state(phi0.width(), {});
  for (const auto& branch : A.spectral_branches()) {
    const Complex amp = inner(ctx.chi_w(), apply(branch.projector, A.labels(), ctx.psi_w()));
    final_state = final_state + translate(phi0, g * branch.eigenvalue, amp);
  }
  final_state = final_state.simplified();
  const Complex ov = ctx.overlap();
  std::optional<Complex> wv;
  if (std::abs(ov) > Tolerances::orthogonal) wv = transition_element(ctx, A) / ov;
  const double p_coupled = final_state.norm_squared();
  return {wv, transition_element(ctx, A), ov, std::norm(ov), p_coupled, std::move(final_state), g};
}

struct LinearResponse {
  double exact_shift;
  double predicted_shift;  // g Re(A^w)
  double abs_error;
  std::optional<double> ratio;  // exact / predicted, empty when predicted is zero
};

inline LinearResponse linear_response_report(const PrePostContext& ctx, const Observable& A,
                                             const GaussianPointerState& phi0, double g) {
  const Complex wv = weak_value(ctx, A);
  const auto res = couple_and_postselect(ctx, A, phi0, g);
  const double exact = mean_position(res.pointer_final) - mean_position(phi0);
  const double predicted = g * wv.real();
  std::optional<double> ratio;
  if (predicted != 0.0) ratio = exact / predicted;
  return {exact, predicted, std::abs(exact - predicted), ratio};
}

struct ExpectationDecomposition {
  Complex lhs;  // <psi|A|psi>
  Complex rhs;  // sum_f |<chi_f|psi>|^2 A^w_f
  double abs_diff;
};

// Checks <psi|A|psi> = sum_f |<b_f|psi>|^2 A^w_{<b_f|,|psi>} over B's eigenbasis.
inline ExpectationDecomposition expectation_decomposition_check(const StateVector& psi, const Observable& A,
                                                                const Observable& B) {
  const auto& basis = B.eigvecs();
  if (basis.size() != psi.size() || B.labels() != psi.labels()) {
    throw InvalidArgument("postselection basis is incomplete for the state space");
  }
  const Complex lhs = inner(psi, apply(A.op(), A.labels(), psi));
  const auto a_psi = apply(A.op(), A.labels(), psi);
  Complex rhs = 0.0;
  for (const auto& b : basis) {
    const auto chi = b.relabeled(psi.labels());
    const Complex ov = inner(chi, psi);
    const Complex te = inner(chi, a_psi);
    if (std::abs(ov) <= Tolerances::orthogonal) {
      rhs += std::conj(ov) * te;  // |ov|^2 A^w without dividing by ~0
    } else {
      rhs += std::norm(ov) * (te / ov);
    }
  }
  return {lhs, rhs, std::abs(lhs - rhs)};
}

struct ValidityMargin {
  double margin;        // |g| p_scale |A^w|, p_scale = 1/(2 width)
  double first_order;   // same as margin
  double second_order;  // (g p_scale)^2 |(A^2)^w| / 2
  bool linear_regime;   // margin < 1
};

inline ValidityMargin validity_margin(const PrePostContext& ctx, const Observable& A,
                                      const GaussianPointerState& phi0, double g) {
  const Complex wv = weak_value(ctx, A);
  const double p_scale = 1.0 / (2.0 * phi0.width());
  const double gp = std::abs(g) * p_scale;
  const auto a2 = A.op() * A.op();
  const Complex wv2 = inner(ctx.chi_w(), apply(a2, A.labels(), ctx.psi_w())) / ctx.overlap();
  const double first = gp * std::abs(wv);
  return {first, first, 0.5 * gp * gp * std::abs(wv2), first < 1.0};
}

inline nlohmann::json to_json(const WeakMeasurementResult& r) {
  nlohmann::json j{{"transition_re", r.transition_element.real()},
                   {"transition_im", r.transition_element.imag()},
                   {"postselect_prob", r.postselect_prob_unperturbed},
                   {"postselect_prob_coupled", r.postselect_prob_coupled},
                   {"g", r.g},
                   {"pointer_final", to_json(r.pointer_final)}};
  if (r.weak_value) {
    j["weak_value_re"] = r.weak_value->real();
    j["weak_value_im"] = r.weak_value->imag();
  } else {
    j["weak_value_re"] = nullptr;
    j["weak_value_im"] = nullptr;
  }
  return j;
}

inline nlohmann::json to_json(const LinearResponse& r) {
  nlohmann::json j{{"exact_shift", r.exact_shift}, {"predicted_shift", r.predicted_shift}, {"abs_error", r.abs_error}};
  j["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
  return j;
}

inline nlohmann::json to_json(const ValidityMargin& m) {
  return {{"validity_margin", m.margin},
          {"first_order_term", m.first_order},
          {"second_order_term", m.second_order},
          {"linear_regime", m.linear_regime}};
}

}  // namespace qccsim
