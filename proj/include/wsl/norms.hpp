#pragma once

// Weighted L^p norms over a grid. A Measure turns a weight and a quadrature
// rule into per-sample masses, so that integral(g omega) is a linear
// functional of the samples of g.

#include "wsl/grid.hpp"
#include "wsl/weight.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace wsl {

template <typename Scalar>
class Measure {
 public:
  Measure() = default;

  Measure(const Grid<Scalar>& grid, const Weight<Scalar>& w, const QuadratureRule& rule = {})
      : grid_(grid), weight_(w), rule_(rule) {
    w.validate(grid.dim());
    if (rule.kind == QuadratureKind::trapezoid) {
      node_masses();
    } else if (w.is_separable(grid.dim())) {
      separable_masses();
    } else {
      dense_masses();
    }
    if (!masses_.allFinite()) throw Error("weight not integrable on the grid cells");
  }

  const Grid<Scalar>& grid() const { return grid_; }
  const Weight<Scalar>& weight() const { return weight_; }
  const QuadratureRule& rule() const { return rule_; }
  /// Exact omega-mass of every cell (midpoint) or node weight (trapezoid).
  const Samples<Scalar>& masses() const { return masses_; }
  Scalar total() const { return masses_.sum(); }

  /// Integral of f omega.
  Scalar integral(const GridFunction<Scalar>& f) const {
    check_grid(f);
    return apply(f.samples());
  }

  /// (int |f|^p omega)^(1/p); p = inf gives max |f|.
  Scalar norm(const GridFunction<Scalar>& f, Scalar p) const {
    check_grid(f);
    if (std::isinf(p) && p > 0) return f.max_abs();
    return std::pow(power_sum(f.samples(), p), Scalar(1) / p);
  }

  /// int |s|^p omega without the outer root.
  Scalar power_sum(const Samples<Scalar>& s, Scalar p) const {
    if (!(p > 0) || !std::isfinite(p)) throw Error("invalid exponent");
    if (s.size() != masses_.size()) throw Error("grid mismatch");
    if (p == 1) return apply(s.abs());
    if (p == 2) return apply(s.square());
    return apply(s.abs().pow(p));
  }

  /// Linear functional sum_i g_i-reconstructed * mass_i.
  Scalar apply(const Samples<Scalar>& g) const {
    if (!reconstruct_) return (g * masses_).sum();
    if (!dense_.empty()) return apply_dense(g);
    Samples<Scalar> h = g;
    const int d = grid_.dim();
    for (int a = 0; a < d; ++a) {
      const Index n = grid_.n()[a], stride = grid_.strides()[a];
      const auto& c = axis_coeffs_[a];
      Samples<Scalar> out(h.size());
      detail::for_each_index(grid_, [&](Index linear, const IVec& idx) {
        const Index i = idx[a];
        Scalar v = c[1][i] * h[linear];
        if (i > 0) v += c[0][i] * h[linear - stride];
        if (i + 1 < n) v += c[2][i] * h[linear + stride];
        out[linear] = v;
      });
      h.swap(out);
    }
    return (h * masses_).sum();
  }

 private:
  // Quadratic Lagrange basis through t = -1, 0, 1.
  static std::array<Scalar, 3> lagrange(Scalar t) {
    return {t * (t - 1) / 2, 1 - t * t, t * (t + 1) / 2};
  }

  void check_grid(const GridFunction<Scalar>& f) const {
    if (f.grid() != grid_) throw Error("grid mismatch");
    if (!f.samples().allFinite()) throw Error("non-finite input");
  }

  void node_masses() {
    masses_.resize(grid_.size());
    const Scalar vol = grid_.cell_volume();
    detail::for_each_index(grid_, [&](Index linear, const IVec& idx) {
      masses_[linear] = vol * detail::trapezoid_factor(grid_, idx) * weight_(grid_.point(linear));
    });
  }

  void separable_masses() {
    const int d = grid_.dim();
    const int r = rule_.refinement;
    reconstruct_ = r > 1;
    std::vector<Samples<Scalar>> axis(d);
    axis_coeffs_.assign(d, {});
    for (int a = 0; a < d; ++a) {
      const Index n = grid_.n()[a];
      const Scalar h = grid_.h()[a];
      axis[a].resize(n);
      for (auto& c : axis_coeffs_[a]) c.resize(n);
      for (Index i = 0; i < n; ++i) {
        const Scalar lo = grid_.box().lower()[a] + i * h;
        if (r == 1) {
          axis[a][i] = weight_.axis_integral(a, lo, lo + h);
          continue;
        }
        Scalar m0 = 0;
        std::array<Scalar, 3> c{0, 0, 0};
        for (int s = 0; s < r; ++s) {
          const Scalar m = weight_.axis_integral(a, lo + h * s / r, lo + h * (s + 1) / r);
          const auto l = lagrange((Scalar(s) + Scalar(0.5)) / r - Scalar(0.5));
          for (int k = 0; k < 3; ++k) c[k] += l[k] * m;
          m0 += m;
        }
        axis[a][i] = m0;
        for (int k = 0; k < 3; ++k) axis_coeffs_[a][k][i] = m0 > 0 ? c[k] / m0 : Scalar(k == 1);
      }
    }
    masses_.resize(grid_.size());
    detail::for_each_index(grid_, [&](Index linear, const IVec& idx) {
      Scalar m = 1;
      for (int a = 0; a < d; ++a) m *= axis[a][idx[a]];
      masses_[linear] = m;
    });
  }

  void dense_masses() {
    const int d = grid_.dim();
    const int r = rule_.refinement;
    reconstruct_ = r > 1;
    masses_.resize(grid_.size());
    if (!reconstruct_) {
      for (Index i = 0; i < grid_.size(); ++i) masses_[i] = weight_.integral(grid_.cell(i));
      return;
    }
    int stencil = 1, subs = 1;
    for (int a = 0; a < d; ++a) stencil *= 3, subs *= r;
    dense_.assign(static_cast<std::size_t>(grid_.size()) * stencil, Scalar(0));
    const Vec<Scalar> h = grid_.h();
    for (Index i = 0; i < grid_.size(); ++i) {
      const Box<Scalar> cell = grid_.cell(i);
      Scalar m0 = 0;
      for (int s = 0; s < subs; ++s) {
        Vec<Scalar> lo(d), hi(d);
        std::array<std::array<Scalar, 3>, 3> l{};
        int rest = s;
        for (int a = d - 1; a >= 0; --a) {
          const int k = rest % r;
          rest /= r;
          lo[a] = cell.lower()[a] + h[a] * k / r;
          hi[a] = cell.lower()[a] + h[a] * (k + 1) / r;
          l[a] = lagrange((Scalar(k) + Scalar(0.5)) / r - Scalar(0.5));
        }
        const Scalar m = weight_.integral(Box<Scalar>(lo, hi));
        m0 += m;
        for (int j = 0; j < stencil; ++j) {
          Scalar b = m;
          int jr = j;
          for (int a = d - 1; a >= 0; --a) {
            b *= l[a][jr % 3];
            jr /= 3;
          }
          dense_[i * stencil + j] += b;
        }
      }
      masses_[i] = m0;
      for (int j = 0; j < stencil; ++j) dense_[i * stencil + j] /= m0;
    }
  }

  Scalar apply_dense(const Samples<Scalar>& g) const {
    const int d = grid_.dim();
    int stencil = 1;
    for (int a = 0; a < d; ++a) stencil *= 3;
    Scalar acc = 0;
    detail::for_each_index(grid_, [&](Index linear, const IVec& idx) {
      Scalar v = 0;
      for (int j = 0; j < stencil; ++j) {
        Index nb = linear;
        bool inside = true;
        int jr = j;
        for (int a = d - 1; a >= 0; --a) {
          const Index off = jr % 3 - 1;
          jr /= 3;
          const Index k = idx[a] + off;
          if (k < 0 || k >= grid_.n()[a]) inside = false;
          nb += off * grid_.strides()[a];
        }
        if (inside) v += dense_[linear * stencil + j] * g[nb];
      }
      acc += v * masses_[linear];
    });
    return acc;
  }

  Grid<Scalar> grid_;
  Weight<Scalar> weight_;
  QuadratureRule rule_;
  Samples<Scalar> masses_;
  bool reconstruct_ = false;
  // Per axis: normalized coefficients for the neighbours (-1, 0, +1).
  std::vector<std::array<Samples<Scalar>, 3>> axis_coeffs_;
  // Non-separable weights: 3^d normalized coefficients per cell.
  std::vector<Scalar> dense_;
};

using Measured = Measure<double>;

template <typename Scalar>
Scalar weighted_lp_norm(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> p, const Weight<Scalar>& w,
                        const QuadratureRule& rule = {}) {
  if (!(p > 0) || std::isnan(p)) throw Error("invalid exponent");
  if (std::isinf(p)) {
    if (!f.samples().allFinite()) throw Error("non-finite input");
    return f.max_abs();
  }
  return Measure<Scalar>(f.grid(), w, rule).norm(f, p);
}

}  // namespace wsl
