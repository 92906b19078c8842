#pragma once

// Finite-statistics emulation of weak-measurement and intensity experiments.
//
// Every trial draws from its own generator seeded from (seed, trial index), so a
// batch is bit-identical for any number of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <thread>
#include <type_traits>
#include <variant>
#include <vector>

#include "qccsim/errors.hpp"
#include "qccsim/neutron.hpp"
#include "qccsim/pointer.hpp"
#include "qccsim/weakmeas.hpp"

namespace qccsim {

// SplitMix64 stream; used as a counter-based generator keyed by (seed, stream, index).
class TrialRng {
 public:
  TrialRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
      : state_(mix(mix(seed ^ 0x9E3779B97F4A7C15ULL) ^ mix(stream + 0x632BE59BD9B4E019ULL) ^ index)) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace mc_detail {

// Runs body(begin, end) over [0, n) split into contiguous chunks.
template <typename Body>
void parallel_chunks(std::size_t n, unsigned workers, Body body) {
  workers = std::max(1u, workers);
  if (workers == 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  for (std::size_t start = 0; start < n; start += chunk) {
    pool.emplace_back([=, &body] { body(start, std::min(n, start + chunk)); });
  }
}

}  // namespace mc_detail

// Inverse-CDF sampler over a tabulated density with linear CDF interpolation.
class TabulatedSampler {
 public:
  static constexpr std::size_t kPoints = 4096;

  explicit TabulatedSampler(const GaussianPointerState& p) {
    const auto [lo, hi] = support(p, 8.0);
    xs_.resize(kPoints);
    cdf_.resize(kPoints);
    const double dx = (hi - lo) / static_cast<double>(kPoints - 1);
    double prev = p.density(lo);
    xs_[0] = lo;
    cdf_[0] = 0.0;
    for (std::size_t i = 1; i < kPoints; ++i) {
      xs_[i] = lo + dx * static_cast<double>(i);
      const double d = p.density(xs_[i]);
      cdf_[i] = cdf_[i - 1] + 0.5 * (prev + d) * dx;
      prev = d;
    }
    const double total = cdf_.back();
    if (!(total > 0.0)) throw ZeroNorm("cannot sample a zero-norm pointer density");
    for (auto& c : cdf_) c /= total;
  }

  double sample(double u) const {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return xs_.front();
    if (it == cdf_.end()) return xs_.back();
    const auto i = static_cast<std::size_t>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double t = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
    return xs_[i - 1] + t * (xs_[i] - xs_[i - 1]);
  }

  const std::vector<double>& grid() const noexcept { return xs_; }
  const std::vector<double>& cdf() const noexcept { return cdf_; }

 private:
  std::vector<double> xs_;
  std::vector<double> cdf_;
};

struct TrialBatch {
  std::uint64_t n_total = 0;
  std::uint64_t n_postselected = 0;
  std::vector<double> positions;              // in trial order, one per postselected trial
  std::vector<std::uint64_t> postselected_at;  // trial index of each position
  std::uint64_t seed = 0;
  double postselect_prob = 0.0;  // exact probability used for the Bernoulli draw

  friend bool operator==(const TrialBatch&, const TrialBatch&) = default;

  // Columns trial_index,postselected,position; position empty when not postselected.
  void write_csv(std::ostream& os) const {
    os << "trial_index,postselected,position\n";
    char buf[64];
    std::size_t k = 0;
    for (std::uint64_t i = 0; i < n_total; ++i) {
      if (k < postselected_at.size() && postselected_at[k] == i) {
        std::snprintf(buf, sizeof buf, "%.17g", positions[k]);
        os << i << ",1," << buf << "\n";
        ++k;
      } else {
        os << i << ",0,\n";
      }
    }
  }
};

inline TrialBatch sample_trials(const PrePostContext& ctx, const Observable& A, const GaussianPointerState& phi0,
                                double g, std::uint64_t n, std::uint64_t seed, unsigned workers = default_workers()) {
  if (n < 1) throw InvalidArgument("sample_trials needs n >= 1");
  const auto res = couple_and_postselect(ctx, A, phi0, g);
  const double p = std::clamp(res.postselect_prob_coupled, 0.0, 1.0);
  std::optional<TabulatedSampler> sampler;
  if (p > 0.0) sampler.emplace(res.pointer_final);

  std::vector<unsigned char> hit(n, 0);
  std::vector<double> pos(p > 0.0 ? n : 0);
  mc_detail::parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      TrialRng rng(seed, 0, i);
      if (rng.uniform() < p) {
        hit[i] = 1;
        pos[i] = sampler->sample(rng.uniform());
      }
    }
  });

  TrialBatch b;
  b.n_total = n;
  b.seed = seed;
  b.postselect_prob = p;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!hit[i]) continue;
    b.positions.push_back(pos[i]);
    b.postselected_at.push_back(i);
  }
  b.n_postselected = b.positions.size();
  return b;
}

struct EstimatorReport {
  double mean_shift = 0.0;
  double std_error = 0.0;
  double estimated_wv_re = 0.0;
  double postselect_rate = 0.0;
  std::uint64_t n_total = 0;
  std::uint64_t n_postselected = 0;
};

inline EstimatorReport estimate_weak_value(const TrialBatch& batch, const GaussianPointerState& phi0, double g) {
  if (g == 0.0) throw InvalidArgument("weak value estimate needs g != 0");
  if (batch.n_postselected < 2) throw InsufficientStatistics("need at least 2 postselected trials");
  const double n = static_cast<double>(batch.n_postselected);
  const double mean = std::accumulate(batch.positions.begin(), batch.positions.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : batch.positions) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  EstimatorReport r;
  r.mean_shift = mean - mean_position(phi0);
  r.estimated_wv_re = r.mean_shift / g;
  r.std_error = sd / std::sqrt(n) / std::abs(g);
  r.n_total = batch.n_total;
  r.n_postselected = batch.n_postselected;
  r.postselect_rate = static_cast<double>(batch.n_postselected) / static_cast<double>(batch.n_total);
  return r;
}

using IntensityExperiment = std::variant<AbsorberConfig, MagneticConfig>;

struct IntensityCounts {
  std::uint64_t n = 0;
  std::uint64_t count_reference = 0;
  std::uint64_t count_perturbed = 0;
  double p_reference = 0.0;  // exact detection probabilities used for sampling
  double p_perturbed = 0.0;
  double ratio = 0.0;     // count_perturbed / count_reference
  double ratio_se = 0.0;  // delta-method binomial standard error
  double z_two_proportion = 0.0;
  std::optional<double> inferred_weak_value;
};

namespace mc_detail {

inline std::uint64_t bernoulli_count(double p, std::uint64_t n, std::uint64_t seed, std::uint64_t stream,
                                     unsigned workers) {
  std::mutex m;
  std::uint64_t total = 0;
  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    std::uint64_t c = 0;
    for (std::size_t i = begin; i < end; ++i) {
      TrialRng rng(seed, stream, i);
      if (rng.uniform() < p) ++c;
    }
    std::lock_guard lock(m);
    total += c;
  });
  return total;
}

}  // namespace mc_detail

// n reference trials and n perturbed trials, each detected with its exact probability.
inline IntensityCounts sample_intensity_experiment(const IntensityExperiment& exp, std::uint64_t n,
                                                   std::uint64_t seed, unsigned workers = default_workers()) {
  if (n < 1) throw InvalidArgument("sample_intensity_experiment needs n >= 1");
  const auto rep = std::visit(
      [](const auto& cfg) {
        if constexpr (std::is_same_v<std::decay_t<decltype(cfg)>, AbsorberConfig>) {
          return intensity_absorber(cfg);
        } else {
          return intensity_magnetic(cfg);
        }
      },
      exp);
  IntensityCounts c;
  c.n = n;
  c.p_reference = rep.i0;
  c.p_perturbed = rep.i_perturbed;
  c.count_reference = mc_detail::bernoulli_count(c.p_reference, n, seed, 1, workers);
  c.count_perturbed = mc_detail::bernoulli_count(c.p_perturbed, n, seed, 2, workers);
  const double nn = static_cast<double>(n);
  const double p0 = static_cast<double>(c.count_reference) / nn;
  const double p1 = static_cast<double>(c.count_perturbed) / nn;
  if (c.count_reference > 0) {
    c.ratio = p1 / p0;
    const double rel = (c.count_perturbed > 0 ? (1.0 - p1) / (nn * p1) : 0.0) + (1.0 - p0) / (nn * p0);
    c.ratio_se = c.ratio * std::sqrt(rel);
  }
  const double pooled = 0.5 * (p0 + p1);
  const double se_diff = std::sqrt(pooled * (1.0 - pooled) * 2.0 / nn);
  c.z_two_proportion = se_diff > 0.0 ? (p1 - p0) / se_diff : 0.0;
  if (c.count_reference > 0) {
    try {
      if (const auto* a = std::get_if<AbsorberConfig>(&exp)) {
        if (a->M > 0.0) c.inferred_weak_value = infer_projector_weak_value(a->arm, a->M, c.ratio);
      } else {
        const auto& m = std::get<MagneticConfig>(exp);
        if (m.alpha != 0.0) {
          const double pi_w = weak_value(build_prepost(), arm_projector(m.arm)).real();
          c.inferred_weak_value = infer_spin_weak_value_modulus(m.arm, m.alpha, c.ratio, pi_w);
        }
      }
    } catch (const NegativeRadicand&) {
      // Statistically impossible ratio for this pi_w; leave the inference empty.
    }
  }
  return c;
}

inline nlohmann::json to_json(const EstimatorReport& r) {
  return {{"mean_shift", r.mean_shift},           {"std_error", r.std_error},
          {"estimated_wv_re", r.estimated_wv_re}, {"postselect_rate", r.postselect_rate},
          {"n_total", r.n_total},                 {"n_postselected", r.n_postselected}};
}

inline nlohmann::json to_json(const IntensityCounts& c) {
  nlohmann::json j{{"n", c.n},
                   {"count_reference", c.count_reference},
                   {"count_perturbed", c.count_perturbed},
                   {"p_reference", c.p_reference},
                   {"p_perturbed", c.p_perturbed},
                   {"ratio", c.ratio},
                   {"ratio_se", c.ratio_se},
                   {"z_two_proportion", c.z_two_proportion}};
  j["inferred_weak_value"] = c.inferred_weak_value ? nlohmann::json(*c.inferred_weak_value) : nlohmann::json(nullptr);
  return j;
}

}  // namespace qccsim
