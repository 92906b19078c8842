#pragma once

// The weak quantum pointer as an exact superposition of shifted Gaussians.
//
// Component convention (units with hbar = 1):
//   c * N * exp(-(x - center)^2 / (4 w^2) + i k (x - center)),  N = (2 pi w^2)^(-1/4)
// so |phi|^2 of a single component has standard deviation w and momentum spread 1/(2w).
// The phase is referenced to the component's own center, which makes exp(-i s P)
// a pure shift of `center` with no coefficient change.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <vector>

#include "qccsim/errors.hpp"
#include "qccsim/qstate.hpp"

namespace qccsim {

struct GaussianComponent {
  Complex coeff{1.0, 0.0};
  double center = 0.0;
  double momentum_center = 0.0;
};

namespace detail {

struct GaussianMoments {
  Complex overlap;   // <a|b>
  Complex position;  // <a|x|b>
  Complex momentum;  // <a|P|b>
};

// Closed-form matrix elements between two unit-coefficient components of shared width.
inline GaussianMoments gaussian_moments(const GaussianComponent& a, const GaussianComponent& b, double width) {
  const double w2 = width * width;
  const double d = b.center - a.center;
  const double m = 0.5 * (a.center + b.center);
  const double dk = b.momentum_center - a.momentum_center;
  const double phase = dk * m - b.momentum_center * b.center + a.momentum_center * a.center;
  const Complex ov = std::exp(Complex{-d * d / (8.0 * w2) - 0.5 * dk * dk * w2, phase});
  return {ov, ov * Complex{m, dk * w2},
          ov * Complex{0.5 * (a.momentum_center + b.momentum_center), -d / (4.0 * w2)}};
}

}  // namespace detail

class GaussianPointerState {
 public:
  GaussianPointerState(double width, std::vector<GaussianComponent> components)
      : width_(width), components_(std::move(components)) {
    if (!(width_ > 0.0) || !std::isfinite(width_)) throw InvalidArgument("pointer width must be positive");
    for (const auto& c : components_) {
      if (!is_finite(c.coeff) || !std::isfinite(c.center) || !std::isfinite(c.momentum_center)) {
        throw InvalidArgument("non-finite pointer component");
      }
    }
  }

  double width() const noexcept { return width_; }
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }

  Complex amplitude(double x) const {
    const double norm = std::pow(2.0 * std::numbers::pi * width_ * width_, -0.25);
    Complex s = 0.0;
    for (const auto& c : components_) {
      const double y = x - c.center;
      s += c.coeff * norm * std::exp(Complex{-y * y / (4.0 * width_ * width_), c.momentum_center * y});
    }
    return s;
  }

  double density(double x) const { return std::norm(amplitude(x)); }

  double norm_squared() const { return expectation_parts().overlap.real(); }
  double norm() const { return std::sqrt(std::max(0.0, norm_squared())); }

  // Unnormalized <phi|phi>, <phi|x|phi>, <phi|P|phi>.
  detail::GaussianMoments expectation_parts() const {
    detail::GaussianMoments acc{0.0, 0.0, 0.0};
    for (const auto& a : components_) {
      for (const auto& b : components_) {
        const auto m = detail::gaussian_moments(a, b, width_);
        const Complex w = std::conj(a.coeff) * b.coeff;
        acc.overlap += w * m.overlap;
        acc.position += w * m.position;
        acc.momentum += w * m.momentum;
      }
    }
    return acc;
  }

  GaussianPointerState scaled(Complex c) const {
    auto comps = components_;
    for (auto& k : comps) k.coeff *= c;
    return {width_, std::move(comps)};
  }

  // Merges components sharing center and momentum and drops exact zeros.
  GaussianPointerState simplified() const {
    std::vector<GaussianComponent> out;
    for (const auto& c : components_) {
      auto it = std::find_if(out.begin(), out.end(), [&](const GaussianComponent& o) {
        return o.center == c.center && o.momentum_center == c.momentum_center;
      });
      if (it == out.end()) {
        out.push_back(c);
      } else {
        it->coeff += c.coeff;
      }
    }
    std::erase_if(out, [](const GaussianComponent& c) { return c.coeff == Complex{}; });
    return {width_, std::move(out)};
  }

  friend GaussianPointerState operator+(const GaussianPointerState& a, const GaussianPointerState& b) {
    if (a.width_ != b.width_) throw InvalidArgument("superposed pointer components must share one width");
    auto comps = a.components_;
    comps.insert(comps.end(), b.components_.begin(), b.components_.end());
    return {a.width_, std::move(comps)};
  }

  friend GaussianPointerState operator-(const GaussianPointerState& a, const GaussianPointerState& b) {
    return a + b.scaled(-1.0);
  }

 private:
  double width_;
  std::vector<GaussianComponent> components_;
};

inline GaussianPointerState make_gaussian(double center, double width) {
  if (!(width > 0.0)) throw InvalidArgument("pointer width must be positive");
  return {width, {GaussianComponent{{1.0, 0.0}, center, 0.0}}};
}

// exp(-i shift P) followed by multiplication by coeff.
inline GaussianPointerState translate(const GaussianPointerState& p, double shift, Complex coeff = 1.0) {
  auto comps = p.components();
  for (auto& c : comps) {
    c.center += shift;
    c.coeff *= coeff;
  }
  return {p.width(), std::move(comps)};
}

inline Complex inner(const GaussianPointerState& a, const GaussianPointerState& b) {
  if (a.width() != b.width()) throw InvalidArgument("pointer states must share one width");
  Complex s = 0.0;
  for (const auto& ca : a.components()) {
    for (const auto& cb : b.components()) {
      s += std::conj(ca.coeff) * cb.coeff * detail::gaussian_moments(ca, cb, a.width()).overlap;
    }
  }
  return s;
}

// ||a - b||
inline double distance(const GaussianPointerState& a, const GaussianPointerState& b) { return (a - b).norm(); }

inline double mean_position(const GaussianPointerState& p) {
  const auto m = p.expectation_parts();
  if (!(m.overlap.real() > 0.0)) throw ZeroNorm("mean_position of a zero-norm pointer");
  return m.position.real() / m.overlap.real();
}

inline double mean_momentum(const GaussianPointerState& p) {
  const auto m = p.expectation_parts();
  if (!(m.overlap.real() > 0.0)) throw ZeroNorm("mean_momentum of a zero-norm pointer");
  return m.momentum.real() / m.overlap.real();
}

// Smallest interval containing every component center +- `widths` pointer widths.
inline std::pair<double, double> support(const GaussianPointerState& p, double widths = 8.0) {
  if (p.components().empty()) return {-widths * p.width(), widths * p.width()};
  double lo = p.components().front().center, hi = lo;
  for (const auto& c : p.components()) {
    lo = std::min(lo, c.center);
    hi = std::max(hi, c.center);
  }
  return {lo - widths * p.width(), hi + widths * p.width()};
}

struct GridPointerState {
  double xmin = 0.0;
  double xmax = 0.0;
  std::vector<Complex> amps;

  std::size_t n_points() const noexcept { return amps.size(); }
  double dx() const { return (xmax - xmin) / static_cast<double>(amps.size() - 1); }
  double x(std::size_t i) const { return xmin + dx() * static_cast<double>(i); }

  double trapezoid_norm_squared() const {
    double s = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const double w = (i == 0 || i + 1 == amps.size()) ? 0.5 : 1.0;
      s += w * std::norm(amps[i]);
    }
    return s * dx();
  }

  // Columns x,re,im,prob_density with a header row.
  void write_csv(std::ostream& os) const {
    os << "x,re,im,prob_density\n";
    char buf[128];
    for (std::size_t i = 0; i < amps.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", x(i), amps[i].real(), amps[i].imag(),
                    std::norm(amps[i]));
      os << buf;
    }
  }
};

inline constexpr double kGridBoundaryGuard = 1e-8;

inline GridPointerState to_grid(const GaussianPointerState& p, double xmin, double xmax, std::size_t n_points) {
  if (n_points < 2 || (n_points & (n_points - 1)) != 0) throw InvalidArgument("n_points must be a power of two");
  if (!(xmax > xmin)) throw InvalidArgument("grid requires xmax > xmin");
  if (n_points > kDefaultCapacity) throw CapacityError("grid exceeds capacity");
  const auto [lo, hi] = support(p, 8.0);
  if (xmin > lo || xmax < hi) throw InvalidArgument("grid domain too small: must cover centers +- 8 widths");
  GridPointerState g{xmin, xmax, std::vector<Complex>(n_points)};
  double peak = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    g.amps[i] = p.amplitude(g.x(i));
    peak = std::max(peak, std::norm(g.amps[i]));
  }
  const double edge = std::max(std::norm(g.amps.front()), std::norm(g.amps.back()));
  if (peak > 0.0 && edge >= kGridBoundaryGuard * peak) {
    throw InvalidArgument("grid boundary density not below 1e-8 of peak");
  }
  return g;
}

inline nlohmann::json to_json(const GaussianPointerState& p) {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : p.components()) {
    comps.push_back({{"coeff", to_json(c.coeff)}, {"center", c.center}, {"momentum_center", c.momentum_center}});
  }
  return {{"width", p.width()}, {"components", comps}};
}

}  // namespace qccsim
