#pragma once

// Weight catalog: constant, radial power |x|^alpha, product power
// prod_a |x_a|^alpha_a and axis-0 step weights.
//
// Integrals over boxes are exact wherever a closed form exists (everything
// except the radial power in d >= 2, which uses adaptive cubature). A
// non-integrable singularity in the closure of the box gives +inf.

#include "wsl/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace wsl {

enum class WeightKind { constant, power, product_power, step };

template <typename Scalar>
class Weight {
 public:
  /// Radius below which a singular power weight is evaluated at this radius.
  static constexpr Scalar kSingularFloor = Scalar(1e-12);
  static constexpr int kGaussOrder = 6;

  Weight() = default;

  static Weight constant(Scalar c) {
    if (!(c > 0) || !std::isfinite(c)) throw Error("weight: constant must be positive");
    Weight w;
    w.kind_ = WeightKind::constant;
    w.params_ = {c};
    return w;
  }

  /// |x|_2^alpha.
  static Weight power(Scalar alpha) {
    if (!std::isfinite(alpha)) throw Error("weight: non-finite exponent");
    Weight w;
    w.kind_ = WeightKind::power;
    w.params_ = {alpha};
    return w;
  }

  /// prod_a |x_a|^alpha_a; one exponent per axis.
  static Weight product_power(std::vector<Scalar> alphas) {
    if (alphas.empty() || alphas.size() > 3) throw Error("weight: product_power needs 1..3 exponents");
    for (Scalar a : alphas)
      if (!(a > Scalar(-1)) || !std::isfinite(a)) throw Error("weight: product_power exponents must be > -1");
    Weight w;
    w.kind_ = WeightKind::product_power;
    w.params_ = std::move(alphas);
    return w;
  }

  /// Piecewise constant in x_0: levels[i] on [breaks[i-1], breaks[i]).
  static Weight step(std::vector<Scalar> breaks, std::vector<Scalar> levels) {
    if (levels.size() != breaks.size() + 1) throw Error("weight: step needs one more level than breaks");
    if (!std::is_sorted(breaks.begin(), breaks.end())) throw Error("weight: step breaks must be sorted");
    for (Scalar l : levels)
      if (!(l > 0) || !std::isfinite(l)) throw Error("weight: step levels must be positive");
    Weight w;
    w.kind_ = WeightKind::step;
    w.breaks_ = std::move(breaks);
    w.params_ = std::move(levels);
    return w;
  }

  WeightKind kind() const { return kind_; }
  const std::vector<Scalar>& params() const { return params_; }
  const std::vector<Scalar>& breaks() const { return breaks_; }
  bool is_constant() const { return kind_ == WeightKind::constant; }
  Scalar alpha() const { return params_.at(0); }

  /// Separable weights factor into per-axis one-dimensional weights.
  bool is_separable(int d) const { return kind_ != WeightKind::power || d == 1; }

  /// Throws if the weight is not locally integrable in dimension d.
  void validate(int d) const {
    if (kind_ == WeightKind::power && !(alpha() > Scalar(-d)))
      throw Error("weight: power exponent must exceed -d");
    if (kind_ == WeightKind::product_power && static_cast<int>(params_.size()) != d)
      throw Error("weight: product_power needs one exponent per axis");
  }

  Scalar operator()(const Vec<Scalar>& x) const {
    switch (kind_) {
      case WeightKind::constant:
        return params_[0];
      case WeightKind::power:
        return power_value(x.norm(), alpha());
      case WeightKind::product_power: {
        Scalar v = 1;
        for (Index a = 0; a < x.size(); ++a) v *= power_value(std::abs(x[a]), params_.at(a));
        return v;
      }
      case WeightKind::step:
        return step_level(x[0]);
    }
    return 0;
  }

  /// omega^e, closed within the catalog.
  Weight pow(Scalar e) const {
    Weight w = *this;
    switch (kind_) {
      case WeightKind::constant:
      case WeightKind::step:
        for (auto& l : w.params_) l = std::pow(l, e);
        break;
      case WeightKind::power:
      case WeightKind::product_power:
        for (auto& a : w.params_) a *= e;
        break;
    }
    return w;
  }

  /// Integral of the weight over `box`.
  Scalar integral(const Box<Scalar>& box) const {
    const int d = box.dim();
    switch (kind_) {
      case WeightKind::constant:
        return params_[0] * box.volume();
      case WeightKind::power:
        if (d == 1) return power_interval(box.lower()[0], box.upper()[0], alpha());
        return radial_integral(box);
      case WeightKind::product_power: {
        Scalar v = 1;
        for (int a = 0; a < d; ++a) v *= power_interval(box.lower()[a], box.upper()[a], params_.at(a));
        return v;
      }
      case WeightKind::step: {
        Scalar v = step_interval(box.lower()[0], box.upper()[0]);
        for (int a = 1; a < d; ++a) v *= box.upper()[a] - box.lower()[a];
        return v;
      }
    }
    return 0;
  }

  /// True when the factor of a separable weight along `axis` is constant.
  bool axis_is_constant(int axis) const {
    switch (kind_) {
      case WeightKind::constant: return true;
      case WeightKind::power: return alpha() == 0;
      case WeightKind::product_power: return params_.at(axis) == 0;
      case WeightKind::step: return axis != 0 || breaks_.empty();
    }
    return false;
  }

  /// Integral over a one-dimensional interval along `axis` for separable
  /// weights; the factor contributed by that axis.
  Scalar axis_integral(int axis, Scalar lo, Scalar hi) const {
    switch (kind_) {
      case WeightKind::constant:
        return axis == 0 ? params_[0] * (hi - lo) : hi - lo;
      case WeightKind::power:
        return power_interval(lo, hi, alpha());
      case WeightKind::product_power:
        return power_interval(lo, hi, params_.at(axis));
      case WeightKind::step:
        return axis == 0 ? step_interval(lo, hi) : hi - lo;
    }
    return 0;
  }

  /// int_lo^hi (x - c)^k w_axis(x) dx for k in {0, 1, 2}, separable weights.
  Scalar axis_moment(int axis, Scalar lo, Scalar hi, int k, Scalar c) const {
    if (k < 0 || k > 2) throw Error("weight: moment order must be 0, 1 or 2");
    // Raw moments int x^j w, then shifted to the centre c.
    std::array<Scalar, 3> raw{};
    for (int j = 0; j <= k; ++j) raw[j] = raw_axis_moment(axis, lo, hi, j);
    if (k == 0) return raw[0];
    if (k == 1) return raw[1] - c * raw[0];
    return raw[2] - 2 * c * raw[1] + c * c * raw[0];
  }

  /// Essential infimum over `box`.
  Scalar ess_inf(const Box<Scalar>& box) const {
    const int d = box.dim();
    switch (kind_) {
      case WeightKind::constant:
        return params_[0];
      case WeightKind::power: {
        const Scalar a = alpha();
        if (a == 0) return 1;
        Scalar near2 = 0, far2 = 0;
        for (int i = 0; i < d; ++i) {
          const Scalar lo = box.lower()[i], hi = box.upper()[i];
          const Scalar nearest = (lo <= 0 && hi >= 0) ? Scalar(0) : std::min(std::abs(lo), std::abs(hi));
          const Scalar farthest = std::max(std::abs(lo), std::abs(hi));
          near2 += nearest * nearest;
          far2 += farthest * farthest;
        }
        return a > 0 ? std::pow(std::sqrt(near2), a) : std::pow(std::sqrt(far2), a);
      }
      case WeightKind::product_power: {
        Scalar v = 1;
        for (int i = 0; i < d; ++i) {
          const Scalar a = params_.at(i), lo = box.lower()[i], hi = box.upper()[i];
          if (a == 0) continue;
          const Scalar nearest = (lo <= 0 && hi >= 0) ? Scalar(0) : std::min(std::abs(lo), std::abs(hi));
          const Scalar farthest = std::max(std::abs(lo), std::abs(hi));
          v *= a > 0 ? std::pow(nearest, a) : std::pow(farthest, a);
        }
        return v;
      }
      case WeightKind::step: {
        Scalar m = std::numeric_limits<Scalar>::infinity();
        const Scalar lo = box.lower()[0], hi = box.upper()[0];
        for (std::size_t i = 0; i < params_.size(); ++i) {
          const Scalar a = i == 0 ? -std::numeric_limits<Scalar>::infinity() : breaks_[i - 1];
          const Scalar b = i == breaks_.size() ? std::numeric_limits<Scalar>::infinity() : breaks_[i];
          if (std::min(b, hi) > std::max(a, lo)) m = std::min(m, params_[i]);
        }
        return m;
      }
    }
    return 0;
  }

  /// Short textual form, e.g. "power:0.5".
  std::string describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case WeightKind::constant: os << "const:" << params_[0]; break;
      case WeightKind::power: os << "power:" << params_[0]; break;
      case WeightKind::product_power:
        os << "product_power:";
        for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
        break;
      case WeightKind::step:
        os << "step:";
        for (std::size_t i = 0; i < breaks_.size(); ++i) os << (i ? "," : "") << breaks_[i];
        os << ";";
        for (std::size_t i = 0; i < params_.size(); ++i) os << (i ? "," : "") << params_[i];
        break;
    }
    return os.str();
  }

  bool operator==(const Weight& o) const {
    return kind_ == o.kind_ && params_ == o.params_ && breaks_ == o.breaks_;
  }

 private:
  static Scalar power_value(Scalar r, Scalar a) {
    if (a == 0) return 1;
    if (a < 0 && r < kSingularFloor) r = kSingularFloor;
    return std::pow(r, a);
  }

  // int_0^t x^a dx for t >= 0.
  static Scalar half_power(Scalar t, Scalar a) {
    if (t == 0) return 0;
    if (!(a > Scalar(-1))) return std::numeric_limits<Scalar>::infinity();
    return std::pow(t, a + 1) / (a + 1);
  }

  // int_lo^hi x^a dx, 0 < lo < hi, without cancellation.
  static Scalar positive_power(Scalar lo, Scalar hi, Scalar a) {
    if (lo == 0) return half_power(hi, a);
    const Scalar e = a + 1;
    const Scalar ratio_log = std::log1p((hi - lo) / lo);
    if (e == 0) return ratio_log;
    return std::pow(lo, e) * std::expm1(e * ratio_log) / e;
  }

  static Scalar power_interval(Scalar lo, Scalar hi, Scalar a) {
    if (a == 0) return hi - lo;
    if (lo >= 0) return positive_power(lo, hi, a);
    if (hi <= 0) return positive_power(-hi, -lo, a);
    return half_power(-lo, a) + half_power(hi, a);
  }

  // int_lo^hi x^j w_axis(x) dx.
  Scalar raw_axis_moment(int axis, Scalar lo, Scalar hi, int j) const {
    auto mono = [&](Scalar a, Scalar b) { return (std::pow(b, j + 1) - std::pow(a, j + 1)) / (j + 1); };
    switch (kind_) {
      case WeightKind::constant:
        return (axis == 0 ? params_[0] : Scalar(1)) * mono(lo, hi);
      case WeightKind::power:
      case WeightKind::product_power: {
        const Scalar a = kind_ == WeightKind::power ? alpha() : params_.at(axis);
        Scalar acc = 0;
        if (hi > 0) acc += power_interval(std::max(lo, Scalar(0)), hi, a + j);
        if (lo < 0) acc += (j % 2 ? Scalar(-1) : Scalar(1)) * power_interval(lo, std::min(hi, Scalar(0)), a + j);
        return acc;
      }
      case WeightKind::step: {
        if (axis != 0) return mono(lo, hi);
        Scalar acc = 0;
        for (std::size_t i = 0; i < params_.size(); ++i) {
          const Scalar a = i == 0 ? -std::numeric_limits<Scalar>::infinity() : breaks_[i - 1];
          const Scalar b = i == breaks_.size() ? std::numeric_limits<Scalar>::infinity() : breaks_[i];
          const Scalar l = std::max(a, lo), r = std::min(b, hi);
          if (r > l) acc += params_[i] * mono(l, r);
        }
        return acc;
      }
    }
    return 0;
  }

  Scalar step_level(Scalar x) const {
    const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    return params_[static_cast<std::size_t>(it - breaks_.begin())];
  }

  Scalar step_interval(Scalar lo, Scalar hi) const {
    Scalar acc = 0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
      const Scalar a = i == 0 ? -std::numeric_limits<Scalar>::infinity() : breaks_[i - 1];
      const Scalar b = i == breaks_.size() ? std::numeric_limits<Scalar>::infinity() : breaks_[i];
      const Scalar len = std::min(b, hi) - std::max(a, lo);
      if (len > 0) acc += params_[i] * len;
    }
    return acc;
  }

  // Adaptive cubature for |x|^alpha over a box in d >= 2. Boxes well
  // separated from the origin get tensor Gauss-Legendre, boxes containing the
  // origin split into orthant corners handled by self-similarity, the rest are
  // bisected.
  Scalar radial_integral(const Box<Scalar>& box) const {
    const int d = box.dim();
    const Scalar a = alpha();
    if (a == 0) return box.volume();
    bool touches_origin = true;
    for (int i = 0; i < d; ++i)
      if (box.lower()[i] > 0 || box.upper()[i] < 0) touches_origin = false;
    if (touches_origin && !(a > Scalar(-d))) return std::numeric_limits<Scalar>::infinity();
    return radial_recurse(box.lower(), box.upper(), kGaussOrder, 0);
  }

  Scalar radial_recurse(const Vec<Scalar>& lo, const Vec<Scalar>& hi, int order, int level) const {
    const int d = static_cast<int>(lo.size());
    bool contains_origin = true;
    Scalar dist2 = 0;
    for (int i = 0; i < d; ++i) {
      if (lo[i] > 0 || hi[i] < 0) contains_origin = false;
      const Scalar nearest = (lo[i] <= 0 && hi[i] >= 0) ? Scalar(0) : std::min(std::abs(lo[i]), std::abs(hi[i]));
      dist2 += nearest * nearest;
    }
    if (contains_origin) {
      // Sum of orthant pieces [0, e_i] with e_i = |lo_i| or hi_i.
      Scalar acc = 0;
      for (int mask = 0; mask < (1 << d); ++mask) {
        Vec<Scalar> ext(d);
        bool empty = false;
        for (int i = 0; i < d; ++i) {
          ext[i] = ((mask >> i) & 1) ? hi[i] : -lo[i];
          if (ext[i] <= 0) empty = true;
        }
        if (!empty) acc += corner_integral(ext, order);
      }
      return acc;
    }
    const Scalar diam = (hi - lo).norm();
    constexpr int kMaxLevel = 60;
    if (std::sqrt(dist2) >= Scalar(3) * diam || level >= kMaxLevel) return gauss_box(lo, hi, order);
    Scalar acc = 0;
    const Vec<Scalar> mid = (lo + hi) / Scalar(2);
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec<Scalar> clo(d), chi(d);
      for (int i = 0; i < d; ++i) {
        const bool upper = (mask >> i) & 1;
        clo[i] = upper ? mid[i] : lo[i];
        chi[i] = upper ? hi[i] : mid[i];
      }
      acc += radial_recurse(clo, chi, order, level + 1);
    }
    return acc;
  }

  // Integral over prod_i [0, ext_i]: the cube [0, m]^d with m = min ext is
  // m^(d+alpha) times the unit-cube constant; the remainder stays away from 0.
  Scalar corner_integral(const Vec<Scalar>& ext, int order) const {
    const int d = static_cast<int>(ext.size());
    const Scalar m = ext.minCoeff();
    Scalar acc = std::pow(m, d + alpha()) * unit_corner_constant(d, order);
    // Remainder: points with some coordinate beyond m, split disjointly by
    // the first such axis.
    for (int i = 0; i < d; ++i) {
      if (ext[i] <= m) continue;
      Vec<Scalar> lo = Vec<Scalar>::Zero(d), hi = ext;
      for (int j = 0; j < i; ++j) hi[j] = std::min(ext[j], m);
      lo[i] = m;
      acc += radial_recurse(lo, hi, order, 0);
    }
    return acc;
  }

  // C = int_[0,1]^d |x|^alpha = 2^-(d+alpha) C + int over [0,1]^d minus [0,1/2]^d.
  Scalar unit_corner_constant(int d, int order) const {
    Scalar shell = 0;
    for (int mask = 1; mask < (1 << d); ++mask) {
      Vec<Scalar> lo(d), hi(d);
      for (int i = 0; i < d; ++i) {
        const bool upper = (mask >> i) & 1;
        lo[i] = upper ? Scalar(0.5) : Scalar(0);
        hi[i] = upper ? Scalar(1) : Scalar(0.5);
      }
      shell += radial_recurse(lo, hi, order, 0);
    }
    return shell / (Scalar(1) - std::pow(Scalar(2), -(d + alpha())));
  }

  Scalar gauss_box(const Vec<Scalar>& lo, const Vec<Scalar>& hi, int order) const {
    const auto& [nodes, weights] = gauss_legendre(order);
    const int d = static_cast<int>(lo.size());
    const Vec<Scalar> half = (hi - lo) / Scalar(2);
    const Vec<Scalar> mid = (hi + lo) / Scalar(2);
    std::array<int, 3> k{0, 0, 0};
    Scalar acc = 0;
    Vec<Scalar> x(d);
    while (true) {
      Scalar wt = 1;
      for (int i = 0; i < d; ++i) {
        x[i] = mid[i] + half[i] * nodes[k[i]];
        wt *= weights[k[i]];
      }
      acc += wt * power_value(x.norm(), alpha());
      int i = d - 1;
      for (; i >= 0; --i) {
        if (++k[i] < order) break;
        k[i] = 0;
      }
      if (i < 0) break;
    }
    return acc * half.prod();
  }

  static const std::pair<std::vector<Scalar>, std::vector<Scalar>>& gauss_legendre(int order) {
    static const auto table = [] {
      std::array<std::pair<std::vector<Scalar>, std::vector<Scalar>>, 9> t;
      for (int n = 1; n <= 8; ++n) {
        std::vector<Scalar> x(n), w(n);
        for (int i = 0; i < n; ++i) {
          // Newton iteration on P_n from the Chebyshev guess.
          long double z = std::cos(3.14159265358979323846L * (i + 0.75L) / (n + 0.5L));
          long double dp = 0;
          for (int it = 0; it < 100; ++it) {
            long double p0 = 1, p1 = z;
            for (int k = 2; k <= n; ++k) {
              const long double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
              p0 = p1;
              p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1);
            const long double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-19L) break;
          }
          x[i] = static_cast<Scalar>(z);
          w[i] = static_cast<Scalar>(2 / ((1 - z * z) * dp * dp));
        }
        t[n] = {x, w};
      }
      return t;
    }();
    return table[order];
  }

  WeightKind kind_ = WeightKind::constant;
  std::vector<Scalar> params_{Scalar(1)};
  std::vector<Scalar> breaks_;
};

using Weightd = Weight<double>;

/// omega' = omega^(1 - p'), p' = p / (p - 1).
template <typename Scalar>
Weight<Scalar> dual_weight(const Weight<Scalar>& w, Scalar p) {
  if (!(p > 1)) throw Error("dual weight: p must exceed 1");
  // 1 - p' written as -1 / (p - 1) to keep exponents such as -1 exact.
  return w.pow(Scalar(-1) / (p - 1));
}

}  // namespace wsl
