#pragma once

// Box averages g(x) = int_box f(x + offset + s) ds, the (weighted) Steklov
// means, the R-operator and empirical operator norms.
//
// Boxes are grid-aligned, so every average is a lattice correlation with the
// positive closed Newton-Cotes / Gregory weights of the box nodes; the weights
// of one axis sum to the exact side length.

#include "wsl/grid.hpp"
#include "wsl/norms.hpp"
#include "wsl/weight.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace wsl {

template <typename Scalar>
struct BoxSpec {
  Vec<Scalar> offset;
  Vec<Scalar> lower;
  Vec<Scalar> upper;

  int dim() const { return static_cast<int>(offset.size()); }

  /// Largest distance the integration box reaches from x along any axis.
  Scalar reach() const {
    return std::max((offset + lower).cwiseAbs().maxCoeff(), (offset + upper).cwiseAbs().maxCoeff());
  }

  static BoxSpec centered(int d, Scalar side, Vec<Scalar> offset) {
    return {std::move(offset), Vec<Scalar>::Constant(d, -side / 2), Vec<Scalar>::Constant(d, side / 2)};
  }
  /// Unit cube [-1/2, 1/2]^d shifted by u.
  static BoxSpec steklov(const Vec<Scalar>& u) { return centered(static_cast<int>(u.size()), Scalar(1), u); }
  /// S_{delta,v}: [-delta/2, delta/2]^d shifted by v.
  static BoxSpec shifted_average(Scalar delta, const Vec<Scalar>& v) {
    return centered(static_cast<int>(v.size()), delta, v);
  }
  /// V_delta: [-delta/2, delta/2]^d.
  static BoxSpec v_box(int d, Scalar delta) { return centered(d, delta, Vec<Scalar>::Zero(d)); }
  /// Z_delta: [delta/2, delta]^d.
  static BoxSpec z_box(int d, Scalar delta) {
    return {Vec<Scalar>::Zero(d), Vec<Scalar>::Constant(d, delta / 2), Vec<Scalar>::Constant(d, delta)};
  }
  /// B_delta: [0, delta]^d.
  static BoxSpec b_box(int d, Scalar delta) {
    return {Vec<Scalar>::Zero(d), Vec<Scalar>::Zero(d), Vec<Scalar>::Constant(d, delta)};
  }
};

using BoxSpecd = BoxSpec<double>;

/// Positive closed quadrature weights for m intervals of unit length:
/// trapezoid, Simpson, Simpson 3/8, Boole, and Gregory's end-corrected
/// trapezoid for m >= 5 (exact for cubics).
template <typename Scalar>
Samples<Scalar> closed_rule(Index m) {
  if (m < 1) throw Error("closed rule: need at least one interval");
  Samples<Scalar> w(m + 1);
  switch (m) {
    case 1: w << Scalar(0.5), Scalar(0.5); return w;
    case 2: w << 1, 4, 1; return w / Scalar(3);
    case 3: w << 1, 3, 3, 1; return w * Scalar(3) / Scalar(8);
    case 4: w << 7, 32, 12, 32, 7; return w * Scalar(2) / Scalar(45);
    default: break;
  }
  w.setOnes();
  const Scalar ends[3] = {Scalar(3) / 8, Scalar(7) / 6, Scalar(23) / 24};
  for (int i = 0; i < 3; ++i) {
    w[i] = ends[i];
    w[m - i] = ends[i];
  }
  return w;
}

namespace detail {

// Node range of [a, b] on the lattice h Z, or nullopt if unaligned.
template <typename Scalar>
std::optional<std::pair<Index, Index>> aligned_range(Scalar a, Scalar b, Scalar h) {
  const Scalar qa = a / h, qb = b / h;
  const Scalar ra = std::round(qa), rb = std::round(qb);
  const Scalar tol = Scalar(1e-9);
  if (std::abs(qa - ra) > tol * std::max(Scalar(1), std::abs(qa))) return std::nullopt;
  if (std::abs(qb - rb) > tol * std::max(Scalar(1), std::abs(qb))) return std::nullopt;
  return std::pair{static_cast<Index>(ra), static_cast<Index>(rb)};
}

template <typename Scalar>
void check_box(const GridFunction<Scalar>& f, const BoxSpec<Scalar>& spec) {
  const int d = f.dim();
  if (spec.dim() != d || spec.lower.size() != d || spec.upper.size() != d) throw Error("box spec: wrong dimension");
  if ((spec.upper.array() <= spec.lower.array()).any()) throw Error("box spec: lower must be below upper");
  if (spec.reach() > f.support_margin() * (1 + Scalar(1e-12))) throw Error("reach exceeds margin");
}

}  // namespace detail

/// Separable lattice kernel realizing the box integral.
template <typename Scalar>
SeparableKernel<Scalar> box_kernel(const Grid<Scalar>& grid, const BoxSpec<Scalar>& spec) {
  const int d = grid.dim();
  SeparableKernel<Scalar> k{IVec(d), {}};
  for (int a = 0; a < d; ++a) {
    const auto range = detail::aligned_range(spec.offset[a] + spec.lower[a], spec.offset[a] + spec.upper[a], grid.h()[a]);
    if (!range) throw Error("unaligned shift");
    const Index m = range->second - range->first;
    if (m < 1) throw Error("box spec: box narrower than one cell");
    k.lo[a] = range->first;
    k.axis_taps.push_back(closed_rule<Scalar>(m) * grid.h()[a]);
  }
  return k;
}

template <typename Scalar>
GridFunction<Scalar> box_average(const GridFunction<Scalar>& f, const BoxSpec<Scalar>& spec) {
  detail::check_box(f, spec);
  return correlate(f, box_kernel(f.grid(), spec));
}

namespace detail {

template <typename Scalar>
void check_steklov_grid(const Grid<Scalar>& grid) {
  if ((grid.h().array() > Scalar(0.125) * (1 + Scalar(1e-12))).any())
    throw Error("steklov: grid spacing must be at most 1/8");
}

}  // namespace detail

/// S_u f(x) = int_[-1/2,1/2]^d f(x + u + t) dt.
template <typename Scalar>
GridFunction<Scalar> steklov(const GridFunction<Scalar>& f, const std::type_identity_t<Vec<Scalar>>& u) {
  detail::check_steklov_grid(f.grid());
  return box_average(f, BoxSpec<Scalar>::steklov(u));
}

/// Normalized lattice kernel of S_{0,w}. Separable weights use product
/// Simpson weights int L_j w over node pairs (exact weight moments), falling
/// back to product trapezoid weights on a pair where a Simpson weight would be
/// negative; the taps then sum to int w exactly. Axes along which the weight
/// is constant keep the unweighted node weights. The radial power in d >= 2
/// uses node weights times the average of w over each node's cell. Taps are
/// divided by their sum so constants are reproduced exactly.
template <typename Scalar>
class WeightedSteklovKernel {
 public:
  WeightedSteklovKernel(const Grid<Scalar>& grid, const Weight<Scalar>& w) : d_(grid.dim()) {
    detail::check_steklov_grid(grid);
    w.validate(d_);
    const auto base = box_kernel(grid, BoxSpec<Scalar>::steklov(Vec<Scalar>::Zero(d_)));
    const Vec<Scalar> h = grid.h();
    auto node_cell = [&](int a, Index j) {
      const Scalar t = (base.lo[a] + j) * h[a];
      return std::pair{std::max(t - h[a] / 2, Scalar(-0.5)), std::min(t + h[a] / 2, Scalar(0.5))};
    };
    if (w.is_separable(d_)) {
      separable_ = SeparableKernel<Scalar>{base.lo, {}};
      for (int a = 0; a < d_; ++a) {
        const Samples<Scalar> taps = w.axis_is_constant(a)
                                         ? base.axis_taps[a]
                                         : product_weights(w, a, base.lo[a], base.axis_taps[a].size() - 1, h[a]);
        if (!taps.allFinite() || !(taps.sum() > 0)) throw Error("weighted steklov: weight average must be positive");
        separable_->axis_taps.push_back(taps / taps.sum());
      }
      return;
    }
    DenseKernel<Scalar> dk{base.lo, IVec(d_), Samples<Scalar>()};
    for (int a = 0; a < d_; ++a) dk.extent[a] = base.axis_taps[a].size();
    dk.taps.resize(dk.extent.prod());
    IVec j = IVec::Zero(d_);
    for (Index t = 0; t < dk.taps.size(); ++t) {
      Vec<Scalar> lo(d_), hi(d_);
      Scalar nodes = 1;
      for (int a = 0; a < d_; ++a) {
        std::tie(lo[a], hi[a]) = node_cell(a, j[a]);
        nodes *= base.axis_taps[a][j[a]];
      }
      const Box<Scalar> cell(lo, hi);
      dk.taps[t] = nodes * w.integral(cell) / cell.volume();
      for (int a = d_ - 1; a >= 0; --a) {
        if (++j[a] < dk.extent[a]) break;
        j[a] = 0;
      }
    }
    if (!dk.taps.allFinite() || !(dk.taps.sum() > 0)) throw Error("weighted steklov: weight average must be positive");
    dk.taps /= dk.taps.sum();
    dense_ = std::move(dk);
  }

  /// S_{0,w} f; S_{u,w} f is its translate by u.
  GridFunction<Scalar> apply(const GridFunction<Scalar>& f) const {
    return separable_ ? correlate(f, *separable_) : correlate(f, *dense_);
  }

 private:
  // Product integration weights on nodes t_j = (lo + j) h, j = 0..m, m even.
  static Samples<Scalar> product_weights(const Weight<Scalar>& w, int axis, Index lo, Index m, Scalar h) {
    if (m % 2) throw Error("weighted steklov: unit cube must span an even number of cells");
    Samples<Scalar> taps = Samples<Scalar>::Zero(m + 1);
    auto node = [&](Index j) { return (lo + j) * h; };
    for (Index j = 0; j + 2 <= m; j += 2) {
      const Scalar c = node(j + 1);
      const Scalar m0 = w.axis_moment(axis, node(j), node(j + 2), 0, c);
      const Scalar m1 = w.axis_moment(axis, node(j), node(j + 2), 1, c) / h;
      const Scalar m2 = w.axis_moment(axis, node(j), node(j + 2), 2, c) / (h * h);
      // Lagrange basis in s = (t - c) / h through s = -1, 0, 1.
      const Scalar a0 = (m2 - m1) / 2, a1 = m0 - m2, a2 = (m2 + m1) / 2;
      if (a0 >= 0 && a1 >= 0 && a2 >= 0) {
        taps[j] += a0;
        taps[j + 1] += a1;
        taps[j + 2] += a2;
        continue;
      }
      for (Index k = j; k < j + 2; ++k) {
        // Hat functions on [t_k, t_k+1]: (t_k+1 - t) / h and (t - t_k) / h.
        const Scalar mid = node(k) + h / 2;
        const Scalar q0 = w.axis_moment(axis, node(k), node(k + 1), 0, mid);
        const Scalar q1 = w.axis_moment(axis, node(k), node(k + 1), 1, mid) / h;
        taps[k] += q0 / 2 - q1;
        taps[k + 1] += q0 / 2 + q1;
      }
    }
    return taps;
  }

  int d_;
  std::optional<SeparableKernel<Scalar>> separable_;
  std::optional<DenseKernel<Scalar>> dense_;
};

/// S_{u,w} f(x) = <w>^-1 int_[-1/2,1/2]^d f(x + u + t) w(t) dt.
template <typename Scalar>
GridFunction<Scalar> weighted_steklov(const GridFunction<Scalar>& f, const std::type_identity_t<Vec<Scalar>>& u,
                                      const Weight<Scalar>& w) {
  detail::check_box(f, BoxSpec<Scalar>::steklov(u));
  const WeightedSteklovKernel<Scalar> kernel(f.grid(), w);
  return translate(kernel.apply(f), u);
}

/// R f = f + (1/2) S_{u,w} f / normalizer.
template <typename Scalar>
GridFunction<Scalar> r_operator(const GridFunction<Scalar>& f, const std::type_identity_t<Vec<Scalar>>& u,
                                const Weight<Scalar>& w, std::type_identity_t<Scalar> normalizer) {
  if (!(normalizer > 0) || !std::isfinite(normalizer)) throw Error("r operator: normalizer must be positive");
  return f + (Scalar(0.5) / normalizer) * weighted_steklov(f, u, w);
}

enum class OperatorTag { identity, S_u, S_uw, R, S_dv, V, Z, B };

inline const char* operator_name(OperatorTag t) {
  switch (t) {
    case OperatorTag::identity: return "E";
    case OperatorTag::S_u: return "S_u";
    case OperatorTag::S_uw: return "S_uw";
    case OperatorTag::R: return "R";
    case OperatorTag::S_dv: return "S_dv";
    case OperatorTag::V: return "V";
    case OperatorTag::Z: return "Z";
    case OperatorTag::B: return "B";
  }
  return "?";
}

inline OperatorTag parse_operator(const std::string& s) {
  for (OperatorTag t : {OperatorTag::identity, OperatorTag::S_u, OperatorTag::S_uw, OperatorTag::R, OperatorTag::S_dv,
                        OperatorTag::V, OperatorTag::Z, OperatorTag::B})
    if (s == operator_name(t)) return t;
  throw Error("unknown operator tag: " + s);
}

/// Operator plus its parameters: u for S_u/S_uw/R, v and delta for S_dv,
/// delta for V/Z/B, normalizer for R.
template <typename Scalar>
struct OperatorSpec {
  OperatorTag tag = OperatorTag::identity;
  Vec<Scalar> u;
  Vec<Scalar> v;
  Scalar delta = 1;
  Scalar normalizer = 1;
};

template <typename Scalar>
GridFunction<Scalar> apply_operator(const OperatorSpec<Scalar>& op, const GridFunction<Scalar>& f,
                                    const Weight<Scalar>& w) {
  const int d = f.dim();
  auto vec_or_zero = [&](const Vec<Scalar>& x) { return x.size() ? x : Vec<Scalar>::Zero(d); };
  switch (op.tag) {
    case OperatorTag::identity: return f;
    case OperatorTag::S_u: return steklov(f, vec_or_zero(op.u));
    case OperatorTag::S_uw: return weighted_steklov(f, vec_or_zero(op.u), w);
    case OperatorTag::R: return r_operator(f, vec_or_zero(op.u), w, op.normalizer);
    case OperatorTag::S_dv: return box_average(f, BoxSpec<Scalar>::shifted_average(op.delta, vec_or_zero(op.v)));
    case OperatorTag::V: return box_average(f, BoxSpec<Scalar>::v_box(d, op.delta));
    case OperatorTag::Z: return box_average(f, BoxSpec<Scalar>::z_box(d, op.delta));
    case OperatorTag::B: return box_average(f, BoxSpec<Scalar>::b_box(d, op.delta));
  }
  throw Error("unknown operator");
}

template <typename Scalar>
struct OpNormEstimate {
  Scalar value = 0;
  Index n_trials = 0;
  Index argmax_id = -1;
  std::optional<Scalar> theoretical_cap;
  Index skipped = 0;
};

using OpNormEstimated = OpNormEstimate<double>;

/// Max over members of ||T f|| / ||f|| in L_{p,w}; members of zero norm are
/// skipped and counted. `ap_value` enables the S_u cap 3^(2d+1/p)[w]_p^(1/p).
template <typename Scalar>
OpNormEstimate<Scalar> operator_norm_estimate(const OperatorSpec<Scalar>& op, std::type_identity_t<Scalar> p,
                                              const Weight<Scalar>& w, const std::vector<GridFunction<Scalar>>& members,
                                              std::optional<Scalar> ap_value = std::nullopt,
                                              const QuadratureRule& rule = {}) {
  if (members.empty()) throw Error("operator norm: empty ensemble");
  const Measure<Scalar> mu(members.front().grid(), w, rule);
  const int d = members.front().dim();
  OpNormEstimate<Scalar> est;
  switch (op.tag) {
    case OperatorTag::identity: est.theoretical_cap = Scalar(1); break;
    case OperatorTag::S_u:
      if (ap_value && p >= 1)
        est.theoretical_cap = std::pow(Scalar(3), 2 * d + 1 / p) * std::pow(*ap_value, 1 / p);
      break;
    case OperatorTag::R: est.theoretical_cap = std::pow(Scalar(4), 1 / std::min(Scalar(1), p)); break;
    default: break;
  }
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Scalar nf = mu.norm(members[i], p);
    if (!(nf > 0)) {
      ++est.skipped;
      continue;
    }
    const Scalar ratio = mu.norm(apply_operator(op, members[i], w), p) / nf;
    ++est.n_trials;
    if (ratio > est.value || est.argmax_id < 0) {
      est.value = ratio;
      est.argmax_id = static_cast<Index>(i);
    }
  }
  return est;
}

}  // namespace wsl
