#pragma once

// Muckenhoupt characteristics estimated as sups over dyadic cube families,
// the centred maximal function on a grid, and the exponent selection for p < 1.

#include "wsl/grid.hpp"
#include "wsl/weight.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

namespace wsl {

/// Dyadic subcubes of `base_box` at depths 0..max_depth; with include_shifted
/// every depth also contributes the copies shifted by half a side along the
/// diagonal that still fit inside the base box.
template <typename Scalar>
struct CubeFamily {
  Box<Scalar> base_box;
  int max_depth = 0;
  bool include_shifted = true;

  CubeFamily() = default;
  CubeFamily(Box<Scalar> box, int depth, bool shifted = true)
      : base_box(std::move(box)), max_depth(depth), include_shifted(shifted) {
    if (depth < 0) throw Error("cube family: max_depth must be >= 0");
    const Vec<Scalar> w = base_box.width();
    if ((w.array() - w[0]).abs().maxCoeff() > Scalar(1e-12) * w[0]) throw Error("cube family: base box must be a cube");
  }

  /// Calls fn(cube) for every cube at `depth`.
  template <typename Fn>
  void for_each_cube(int depth, Fn&& fn) const {
    const int d = base_box.dim();
    const Index per_axis = Index(1) << depth;
    const Scalar side = base_box.width()[0] / Scalar(per_axis);
    auto sweep = [&](Index count, Scalar shift) {
      IVec idx = IVec::Zero(d);
      while (true) {
        Vec<Scalar> lo(d);
        for (int a = 0; a < d; ++a) lo[a] = base_box.lower()[a] + (Scalar(idx[a]) + shift) * side;
        fn(Box<Scalar>(lo, (lo.array() + side).matrix()));
        int a = d - 1;
        for (; a >= 0; --a) {
          if (++idx[a] < count) break;
          idx[a] = 0;
        }
        if (a < 0) break;
      }
    };
    sweep(per_axis, Scalar(0));
    if (include_shifted && per_axis > 1) sweep(per_axis - 1, Scalar(0.5));
  }
};

template <typename Scalar>
struct ApEstimate {
  Scalar p = 1;
  Scalar value = 0;
  /// (depth, running sup over all depths so far).
  std::vector<std::pair<int, Scalar>> depth_profile;
  bool diverging = false;
};

using CubeFamilyd = CubeFamily<double>;
using ApEstimated = ApEstimate<double>;

/// A_p quantity of a single cube: <w>_Q <w'>_Q^(p-1) for p > 1 and
/// <w>_Q / essinf_Q w for p = 1. Infinite when an average diverges.
template <typename Scalar>
Scalar ap_cube_value(const Weight<Scalar>& w, const Weight<Scalar>* dual, Scalar p, const Box<Scalar>& q) {
  const Scalar vol = q.volume();
  const Scalar avg = w.integral(q) / vol;
  if (!std::isfinite(avg)) return std::numeric_limits<Scalar>::infinity();
  if (p == 1) {
    const Scalar m = w.ess_inf(q);
    return m > 0 ? avg / m : std::numeric_limits<Scalar>::infinity();
  }
  const Scalar dual_avg = dual->integral(q) / vol;
  if (!std::isfinite(dual_avg)) return std::numeric_limits<Scalar>::infinity();
  return avg * std::pow(dual_avg, p - 1);
}

/// Sup of the A_p quantity over the family, depth by depth. The profile is
/// the running sup; diverging is set when a value is infinite or when each of
/// the last three depth increments grows by at least `growth_factor`.
template <typename Scalar>
ApEstimate<Scalar> ap_constant(const Weight<Scalar>& w, std::type_identity_t<Scalar> p, const CubeFamily<Scalar>& cubes,
                               std::type_identity_t<Scalar> growth_factor = Scalar(10)) {
  if (!(p >= 1) || !std::isfinite(p)) throw Error("ap_constant: p must be >= 1");
  w.validate(cubes.base_box.dim());
  const Weight<Scalar> dual = p > 1 ? dual_weight(w, p) : w;
  ApEstimate<Scalar> est;
  est.p = p;
  Scalar running = 0;
  for (int depth = 0; depth <= cubes.max_depth; ++depth) {
    Scalar sup = 0;
    cubes.for_each_cube(depth, [&](const Box<Scalar>& q) { sup = std::max(sup, ap_cube_value(w, &dual, p, q)); });
    running = std::max(running, sup);
    est.depth_profile.emplace_back(depth, running);
  }
  est.value = running;
  const auto& prof = est.depth_profile;
  if (!std::isfinite(running)) {
    est.diverging = true;
  } else if (prof.size() >= 4) {
    bool growing = true;
    for (std::size_t i = prof.size() - 3; i < prof.size(); ++i)
      if (!(prof[i].second >= growth_factor * prof[i - 1].second)) growing = false;
    est.diverging = growing;
  }
  return est;
}

/// Centred maximal function over grid-aligned cubes of (2k+1)^d cells,
/// k = 0..max(n). Samples outside the grid count as zero.
template <typename Scalar>
GridFunction<Scalar> maximal_function(const GridFunction<Scalar>& g) {
  if (!g.is_nonnegative()) throw Error("maximal function: negative input");
  const auto& grid = g.grid();
  const int d = grid.dim();
  // Summed-area table with a zero border: S has extents n + 1 per axis.
  IVec ext = grid.n().array() + 1;
  IVec sstride(d);
  sstride[d - 1] = 1;
  for (int a = d - 2; a >= 0; --a) sstride[a] = sstride[a + 1] * ext[a + 1];
  std::vector<Scalar> table(static_cast<std::size_t>(ext.prod()), Scalar(0));
  detail::for_each_index(grid, [&](Index linear, const IVec& idx) {
    table[static_cast<std::size_t>((idx.array() + 1).matrix().dot(sstride))] = g[linear];
  });
  for (int a = 0; a < d; ++a) {
    for (std::size_t i = 0; i < table.size(); ++i) {
      const Index coord = (static_cast<Index>(i) / sstride[a]) % ext[a];
      if (coord > 0) table[i] += table[i - sstride[a]];
    }
  }
  auto box_sum = [&](const IVec& lo, const IVec& hi) {
    // Sum over cells [lo, hi) in table coordinates via inclusion-exclusion.
    Scalar acc = 0;
    for (int mask = 0; mask < (1 << d); ++mask) {
      Index off = 0;
      int sign = 1;
      for (int a = 0; a < d; ++a) {
        if ((mask >> a) & 1) {
          off += lo[a] * sstride[a];
          sign = -sign;
        } else {
          off += hi[a] * sstride[a];
        }
      }
      acc += sign * table[static_cast<std::size_t>(off)];
    }
    return acc;
  };
  const Index kmax = grid.n().maxCoeff();
  Samples<Scalar> out(grid.size());
  IVec lo(d), hi(d);
  detail::for_each_index(grid, [&](Index linear, const IVec& idx) {
    Scalar best = g[linear];
    Scalar cells = 1;
    for (Index k = 1; k <= kmax; ++k) {
      for (int a = 0; a < d; ++a) {
        lo[a] = std::max<Index>(idx[a] - k, 0);
        hi[a] = std::min<Index>(idx[a] + k + 1, grid.n()[a]);
      }
      cells = std::pow(Scalar(2 * k + 1), d);
      best = std::max(best, box_sum(lo, hi) / cells);
    }
    out[linear] = best;
  });
  return GridFunction<Scalar>(grid, std::move(out));
}

/// Normalized A_infty quantity of one cube: w(Q)^-1 int_Q M[w chi_Q], with M
/// evaluated on a local grid of `cells_per_axis` cells carrying exact cell
/// averages of w.
template <typename Scalar>
Scalar ainfty_cube_value(const Weight<Scalar>& w, const Box<Scalar>& q, Index cells_per_axis) {
  const Scalar mass = w.integral(q);
  if (!std::isfinite(mass)) return std::numeric_limits<Scalar>::infinity();
  if (!(mass > 0)) return std::numeric_limits<Scalar>::infinity();
  const Grid<Scalar> local = Grid<Scalar>::uniform(q, cells_per_axis);
  const Scalar vol = local.cell_volume();
  Samples<Scalar> avg(local.size());
  for (Index i = 0; i < local.size(); ++i) avg[i] = w.integral(local.cell(i)) / vol;
  const auto m = maximal_function(GridFunction<Scalar>(local, std::move(avg)));
  return m.samples().sum() * vol / mass;
}

/// Sup of the normalized A_infty quantity over the family.
template <typename Scalar>
Scalar ainfty_constant(const Weight<Scalar>& w, const CubeFamily<Scalar>& cubes, Index cells_per_axis = 0) {
  const int d = cubes.base_box.dim();
  w.validate(d);
  if (cells_per_axis == 0) cells_per_axis = d == 1 ? 64 : (d == 2 ? 16 : 8);
  Scalar sup = 0;
  for (int depth = 0; depth <= cubes.max_depth; ++depth)
    cubes.for_each_cube(depth, [&](const Box<Scalar>& q) { sup = std::max(sup, ainfty_cube_value(w, q, cells_per_axis)); });
  return sup;
}

template <typename Scalar>
struct QSelection {
  Scalar q = 0;
  /// r = p / q, the exponent whose A_r membership was confirmed.
  Scalar r = 0;
  Scalar ainfty = 0;
  /// log a0 = 2^(11+d) [w]_infty; a0 itself is never formed.
  Scalar log_a0 = 0;
};

/// q in (0, p) with a non-diverging [w]_(p/q) estimate: starts at p/2, halves
/// until admissible, then bisects between the admissible q and the last
/// rejected one to return the largest admissible q found.
template <typename Scalar>
QSelection<Scalar> select_q(const Weight<Scalar>& w, std::type_identity_t<Scalar> p, const CubeFamily<Scalar>& cubes,
                            int bisection_steps = 20, int max_halvings = 30) {
  if (!(p > 0 && p < 1)) throw Error("select_q: p must lie in (0, 1)");
  const int d = cubes.base_box.dim();
  auto admissible = [&](Scalar q) { return !ap_constant(w, p / q, cubes).diverging; };
  QSelection<Scalar> sel;
  sel.ainfty = ainfty_constant(w, cubes);
  sel.log_a0 = std::ldexp(sel.ainfty, 11 + d);
  Scalar q = p / 2;
  Scalar rejected = p;
  int halvings = 0;
  while (!admissible(q)) {
    if (++halvings > max_halvings) throw Error("A_∞ membership not numerically confirmed");
    rejected = q;
    q /= 2;
  }
  if (halvings > 0) {
    Scalar good = q, bad = rejected;
    for (int i = 0; i < bisection_steps; ++i) {
      const Scalar mid = (good + bad) / 2;
      (admissible(mid) ? good : bad) = mid;
    }
    q = good;
  }
  sel.q = q;
  sel.r = p / q;
  return sel;
}

}  // namespace wsl
