#pragma once

// Dense complex linear algebra over labeled tensor-product Hilbert spaces.
//
// Subsystems are ordered at construction and addressed by label. Amplitudes
// are stored row-major: the first subsystem is the most significant digit of
// the flat index.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qccsim/errors.hpp"

namespace qccsim {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

namespace detail {

inline std::size_t checked_product(std::span<const std::size_t> dims, std::size_t capacity) {
  std::size_t total = 1;
  for (auto d : dims) {
    if (d == 0) throw InvalidArgument("subsystem dimension must be positive");
    if (total > capacity / d) {
      throw CapacityError("state size exceeds capacity of " + std::to_string(capacity) + " amplitudes");
    }
    total *= d;
  }
  return total;
}

inline std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t k = dims.size(); k-- > 1;) strides[k - 1] = strides[k] * dims[k];
  return strides;
}

inline std::string join(const std::vector<std::string>& xs) {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += ",";
    out += x;
  }
  return out;
}

}  // namespace detail

class StateVector {
 public:
  StateVector(std::vector<std::string> labels, std::vector<std::size_t> dims, std::vector<Complex> amps,
              std::size_t capacity = kDefaultCapacity)
      : labels_(std::move(labels)), dims_(std::move(dims)), amps_(std::move(amps)) {
    if (labels_.size() != dims_.size()) throw InvalidArgument("labels and dims differ in length");
    if (dims_.empty()) throw InvalidArgument("state needs at least one subsystem");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      for (std::size_t j = i + 1; j < labels_.size(); ++j) {
        if (labels_[i] == labels_[j]) throw InvalidArgument("duplicate subsystem label '" + labels_[i] + "'");
      }
    }
    const auto total = detail::checked_product(dims_, capacity);
    if (amps_.size() != total) {
      throw DimensionMismatch("amplitude count " + std::to_string(amps_.size()) + " != product of dims " +
                              std::to_string(total));
    }
    for (const auto& a : amps_) {
      if (!is_finite(a)) throw InvalidArgument("non-finite amplitude");
    }
  }

  // Single-subsystem state from explicit amplitudes.
  static StateVector single(std::string label, std::vector<Complex> amps) {
    const auto d = amps.size();
    return StateVector({std::move(label)}, {d}, std::move(amps));
  }

  static StateVector basis(std::string label, std::size_t dim, std::size_t index) {
    if (index >= dim) throw InvalidArgument("basis index out of range");
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return single(std::move(label), std::move(amps));
  }

  // A dimension-1 state carrying just a number (result of projecting every subsystem away).
  static StateVector scalar(Complex value) { return StateVector({"scalar"}, {1}, {value}); }

  static StateVector zeros(std::vector<std::string> labels, std::vector<std::size_t> dims) {
    const auto total = detail::checked_product(dims, kDefaultCapacity);
    return StateVector(std::move(labels), std::move(dims), std::vector<Complex>(total));
  }

  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::span<const Complex> amps() const noexcept { return amps_; }
  std::size_t size() const noexcept { return amps_.size(); }
  Complex operator[](std::size_t i) const { return amps_.at(i); }

  bool is_scalar() const noexcept { return amps_.size() == 1 && labels_.size() == 1 && labels_[0] == "scalar"; }

  std::size_t index_of(const std::string& label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
      throw UnknownLabel("unknown subsystem label '" + label + "' (have: " + detail::join(labels_) + ")");
    }
    return static_cast<std::size_t>(it - labels_.begin());
  }

  std::size_t dim_of(const std::string& label) const { return dims_[index_of(label)]; }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
  }
  double norm() const { return std::sqrt(norm_squared()); }

  StateVector normalized() const {
    const double n = norm();
    if (n == 0.0) throw ZeroNorm("cannot normalize a zero state");
    return scaled(Complex{1.0 / n, 0.0});
  }

  StateVector scaled(Complex c) const {
    auto amps = amps_;
    for (auto& a : amps) a *= c;
    return StateVector(labels_, dims_, std::move(amps));
  }

  StateVector relabeled(std::vector<std::string> labels) const { return StateVector(std::move(labels), dims_, amps_); }

  friend StateVector operator+(const StateVector& a, const StateVector& b) {
    if (a.dims_ != b.dims_) throw DimensionMismatch("cannot add states of different dims");
    auto amps = a.amps_;
    for (std::size_t i = 0; i < amps.size(); ++i) amps[i] += b.amps_[i];
    return StateVector(a.labels_, a.dims_, std::move(amps));
  }

  friend StateVector operator-(const StateVector& a, const StateVector& b) { return a + b.scaled(-1.0); }

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> dims_;
  std::vector<Complex> amps_;
};

enum class OperatorKind { hermitian, unitary, general };

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::hermitian: return "hermitian";
    case OperatorKind::unitary: return "unitary";
    case OperatorKind::general: return "general";
  }
  return "general";
}

// Dense square matrix over a tensor-product space, row-major.
class Operator {
 public:
  Operator(std::vector<std::size_t> dims, std::vector<Complex> entries, OperatorKind kind = OperatorKind::general)
      : dims_(std::move(dims)), entries_(std::move(entries)), kind_(kind) {
    side_ = detail::checked_product(dims_, kDefaultCapacity);
    if (entries_.size() != side_ * side_) throw DimensionMismatch("operator entries do not form a square matrix");
    for (const auto& e : entries_) {
      if (!is_finite(e)) throw InvalidArgument("non-finite operator entry");
    }
    if (kind_ == OperatorKind::hermitian && hermiticity_defect() > Tolerances::structural) {
      throw InvalidArgument("operator tagged hermitian is not hermitian");
    }
    if (kind_ == OperatorKind::unitary && unitarity_defect() > Tolerances::structural) {
      throw InvalidArgument("operator tagged unitary is not unitary");
    }
  }

  static Operator identity(std::vector<std::size_t> dims) {
    const auto n = detail::checked_product(dims, kDefaultCapacity);
    std::vector<Complex> e(n * n);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return Operator(std::move(dims), std::move(e), OperatorKind::unitary);
  }

  static Operator pauli_x() { return Operator({2}, {0.0, 1.0, 1.0, 0.0}, OperatorKind::hermitian); }
  static Operator pauli_z() { return Operator({2}, {1.0, 0.0, 0.0, -1.0}, OperatorKind::hermitian); }

  // |v><v|
  static Operator projector(const StateVector& v) { return outer(v, v, OperatorKind::hermitian); }

  static Operator outer(const StateVector& ket, const StateVector& bra, OperatorKind kind = OperatorKind::general) {
    if (ket.dims() != bra.dims()) throw DimensionMismatch("outer product of states with different dims");
    const auto n = ket.size();
    std::vector<Complex> e(n * n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < n; ++c) e[r * n + c] = ket[r] * std::conj(bra[c]);
    }
    return Operator(ket.dims(), std::move(e), kind);
  }

  const std::vector<std::size_t>& dims() const noexcept { return dims_; }
  std::size_t side() const noexcept { return side_; }
  OperatorKind kind() const noexcept { return kind_; }
  std::span<const Complex> entries() const noexcept { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const { return entries_[r * side_ + c]; }

  Operator adjoint() const {
    std::vector<Complex> e(entries_.size());
    for (std::size_t r = 0; r < side_; ++r) {
      for (std::size_t c = 0; c < side_; ++c) e[c * side_ + r] = std::conj(entries_[r * side_ + c]);
    }
    return Operator(dims_, std::move(e), kind_);
  }

  double hermiticity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < side_; ++r) {
      for (std::size_t c = 0; c < side_; ++c) {
        worst = std::max(worst, std::abs(entries_[r * side_ + c] - std::conj(entries_[c * side_ + r])));
      }
    }
    return worst;
  }

  // max |M M^dagger - 1|
  double unitarity_defect() const {
    double worst = 0.0;
    for (std::size_t r = 0; r < side_; ++r) {
      for (std::size_t c = 0; c < side_; ++c) {
        Complex s = 0.0;
        for (std::size_t k = 0; k < side_; ++k) s += entries_[r * side_ + k] * std::conj(entries_[c * side_ + k]);
        if (r == c) s -= 1.0;
        worst = std::max(worst, std::abs(s));
      }
    }
    return worst;
  }

  Operator with_kind(OperatorKind kind) const { return Operator(dims_, entries_, kind); }

  friend Operator operator*(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) throw DimensionMismatch("operator product of different dims");
    const auto n = a.side_;
    std::vector<Complex> e(n * n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t k = 0; k < n; ++k) {
        const auto ark = a.entries_[r * n + k];
        if (ark == Complex{}) continue;
        for (std::size_t c = 0; c < n; ++c) e[r * n + c] += ark * b.entries_[k * n + c];
      }
    }
    return Operator(a.dims_, std::move(e));
  }

  friend Operator operator+(const Operator& a, const Operator& b) {
    if (a.dims_ != b.dims_) throw DimensionMismatch("operator sum of different dims");
    auto e = a.entries_;
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += b.entries_[i];
    const auto kind = (a.kind_ == OperatorKind::hermitian && b.kind_ == OperatorKind::hermitian)
                          ? OperatorKind::hermitian
                          : OperatorKind::general;
    return Operator(a.dims_, std::move(e), kind);
  }

  // Real scalars keep hermiticity; complex ones drop the tag.
  Operator scaled(Complex c) const {
    auto e = entries_;
    for (auto& x : e) x *= c;
    auto kind = OperatorKind::general;
    if (kind_ == OperatorKind::hermitian && c.imag() == 0.0) kind = OperatorKind::hermitian;
    if (kind_ == OperatorKind::unitary && std::abs(std::abs(c) - 1.0) <= Tolerances::arithmetic) {
      kind = OperatorKind::unitary;
    }
    return Operator(dims_, std::move(e), kind);
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<Complex> entries_;
  OperatorKind kind_;
  std::size_t side_ = 0;
};

// Kronecker product; the result acts on dims(a) ++ dims(b).
inline Operator kron(const Operator& a, const Operator& b) {
  std::vector<std::size_t> dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  const auto na = a.side(), nb = b.side();
  const auto n = na * nb;
  std::vector<Complex> e(n * n);
  for (std::size_t ra = 0; ra < na; ++ra)
    for (std::size_t ca = 0; ca < na; ++ca)
      for (std::size_t rb = 0; rb < nb; ++rb)
        for (std::size_t cb = 0; cb < nb; ++cb) e[(ra * nb + rb) * n + (ca * nb + cb)] = a(ra, ca) * b(rb, cb);
  auto kind = OperatorKind::general;
  if (a.kind() == b.kind()) kind = a.kind();
  return Operator(std::move(dims), std::move(e), kind);
}

inline StateVector tensor(const StateVector& a, const StateVector& b, std::size_t capacity = kDefaultCapacity) {
  auto labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  auto dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  const auto total = detail::checked_product(dims, capacity);
  std::vector<Complex> amps(total);
  const auto nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < nb; ++j) amps[i * nb + j] = a[i] * b[j];
  }
  return StateVector(std::move(labels), std::move(dims), std::move(amps), capacity);
}

namespace detail {

// Splits a state's index space into target and spectator parts. `target_offsets[t]`
// is the flat-index contribution of the t-th target multi-index (row-major over the
// targets in the order given); `spectator_offsets[s]` likewise for the remaining
// subsystems in their original order.
struct IndexSplit {
  std::vector<std::size_t> target_offsets;
  std::vector<std::size_t> spectator_offsets;
  std::vector<std::size_t> spectator_positions;
};

inline std::vector<std::size_t> enumerate_offsets(const std::vector<std::size_t>& dims,
                                                  const std::vector<std::size_t>& strides) {
  std::size_t total = 1;
  for (auto d : dims) total *= d;
  std::vector<std::size_t> out(total);
  std::vector<std::size_t> digit(dims.size(), 0);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t off = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) off += digit[k] * strides[k];
    out[i] = off;
    for (std::size_t k = dims.size(); k-- > 0;) {
      if (++digit[k] < dims[k]) break;
      digit[k] = 0;
    }
  }
  return out;
}

inline IndexSplit split_indices(const StateVector& s, const std::vector<std::string>& targets) {
  if (targets.empty()) throw InvalidArgument("no target subsystems given");
  const auto strides = strides_of(s.dims());
  std::vector<std::size_t> pos;
  for (const auto& t : targets) {
    const auto p = s.index_of(t);
    if (std::find(pos.begin(), pos.end(), p) != pos.end()) throw InvalidArgument("duplicate target label '" + t + "'");
    pos.push_back(p);
  }
  std::vector<std::size_t> tdims, tstrides, sdims, sstrides, spos;
  for (auto p : pos) {
    tdims.push_back(s.dims()[p]);
    tstrides.push_back(strides[p]);
  }
  for (std::size_t k = 0; k < s.dims().size(); ++k) {
    if (std::find(pos.begin(), pos.end(), k) != pos.end()) continue;
    sdims.push_back(s.dims()[k]);
    sstrides.push_back(strides[k]);
    spos.push_back(k);
  }
  return {enumerate_offsets(tdims, tstrides), enumerate_offsets(sdims, sstrides), std::move(spos)};
}

inline std::vector<std::size_t> target_dims(const StateVector& s, const std::vector<std::string>& targets) {
  std::vector<std::size_t> d;
  for (const auto& t : targets) d.push_back(s.dim_of(t));
  return d;
}

}  // namespace detail

// Applies `op` to the listed subsystems of `s` (in the listed order), identity elsewhere.
inline StateVector apply(const Operator& op, const std::vector<std::string>& targets, const StateVector& s) {
  if (detail::target_dims(s, targets) != op.dims()) {
    throw DimensionMismatch("operator dims do not match targeted subsystems " + detail::join(targets));
  }
  const auto split = detail::split_indices(s, targets);
  const auto n = op.side();
  std::vector<Complex> out(s.size());
  const auto in = s.amps();
  for (auto base : split.spectator_offsets) {
    for (std::size_t r = 0; r < n; ++r) {
      Complex acc = 0.0;
      for (std::size_t c = 0; c < n; ++c) acc += op(r, c) * in[base + split.target_offsets[c]];
      out[base + split.target_offsets[r]] = acc;
    }
  }
  return StateVector(s.labels(), s.dims(), std::move(out));
}

// Applies `op` to the whole state (its dims must equal the state's dims).
inline StateVector apply(const Operator& op, const StateVector& s) { return apply(op, s.labels(), s); }

// <bra|ket>, conjugate-linear in bra.
inline Complex inner(const StateVector& bra, const StateVector& ket) {
  if (bra.dims() != ket.dims()) throw DimensionMismatch("inner product of states with different dims");
  Complex s = 0.0;
  const auto b = bra.amps(), k = ket.amps();
  for (std::size_t i = 0; i < b.size(); ++i) s += std::conj(b[i]) * k[i];
  return s;
}

// <bra|_targets applied to s; returns the unnormalized residual on the remaining
// subsystems (or a scalar state when nothing remains).
inline StateVector partial_project(const StateVector& bra, const std::vector<std::string>& targets,
                                   const StateVector& s) {
  if (detail::target_dims(s, targets) != bra.dims()) {
    throw DimensionMismatch("bra dims do not match targeted subsystems " + detail::join(targets));
  }
  const auto split = detail::split_indices(s, targets);
  const auto b = bra.amps();
  const auto in = s.amps();
  std::vector<Complex> out(split.spectator_offsets.size());
  for (std::size_t r = 0; r < out.size(); ++r) {
    Complex acc = 0.0;
    const auto base = split.spectator_offsets[r];
    for (std::size_t t = 0; t < b.size(); ++t) acc += std::conj(b[t]) * in[base + split.target_offsets[t]];
    out[r] = acc;
  }
  if (split.spectator_positions.empty()) return StateVector::scalar(out[0]);
  std::vector<std::string> labels;
  std::vector<std::size_t> dims;
  for (auto p : split.spectator_positions) {
    labels.push_back(s.labels()[p]);
    dims.push_back(s.dims()[p]);
  }
  return StateVector(std::move(labels), std::move(dims), std::move(out));
}

// <a| op |b>
inline Complex matrix_element(const StateVector& bra, const Operator& op, const StateVector& ket) {
  return inner(bra, apply(op, ket));
}

inline nlohmann::json to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json to_json(const StateVector& s) {
  nlohmann::json amps = nlohmann::json::array();
  for (const auto& a : s.amps()) amps.push_back(to_json(a));
  return {{"labels", s.labels()}, {"dims", s.dims()}, {"amps", amps}};
}

inline StateVector state_from_json(const nlohmann::json& j) {
  std::vector<Complex> amps;
  for (const auto& a : j.at("amps")) amps.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
  return StateVector(j.at("labels").get<std::vector<std::string>>(), j.at("dims").get<std::vector<std::size_t>>(),
                     std::move(amps));
}

}  // namespace qccsim
