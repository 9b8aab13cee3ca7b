#pragma once

// Uniform tensor grids and compactly supported sampled functions.
//
// Samples live at cell centres: along axis a the i-th sample sits at
// lower[a] + (i + 1/2) h[a]. Storage is row-major (last axis fastest).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

namespace wsl {

using Index = Eigen::Index;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Samples = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using IVec = Eigen::Matrix<Index, Eigen::Dynamic, 1>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
class Box {
 public:
  Box() = default;
  Box(Vec<Scalar> lower, Vec<Scalar> upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) throw Error("box: dimension mismatch");
    if (lower_.size() < 1 || lower_.size() > 3) throw Error("box: dimension must be 1, 2 or 3");
    for (Index a = 0; a < lower_.size(); ++a) {
      if (!(lower_[a] < upper_[a]) || !std::isfinite(lower_[a]) || !std::isfinite(upper_[a]))
        throw Error("box: lower must be < upper on every axis");
    }
  }

  /// Cube [lo, hi]^d.
  static Box cube(int d, Scalar lo, Scalar hi) {
    return Box(Vec<Scalar>::Constant(d, lo), Vec<Scalar>::Constant(d, hi));
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vec<Scalar>& lower() const { return lower_; }
  const Vec<Scalar>& upper() const { return upper_; }
  Vec<Scalar> width() const { return upper_ - lower_; }
  Vec<Scalar> center() const { return (upper_ + lower_) / Scalar(2); }
  Scalar volume() const { return width().prod(); }

  bool operator==(const Box& o) const { return lower_ == o.lower_ && upper_ == o.upper_; }

 private:
  Vec<Scalar> lower_;
  Vec<Scalar> upper_;
};

template <typename Scalar>
class Grid {
 public:
  static constexpr Index kDefaultMaxPoints = Index{1} << 22;

  Grid() = default;
  Grid(Box<Scalar> box, IVec n, Index max_points = kDefaultMaxPoints)
      : box_(std::move(box)), n_(std::move(n)) {
    if (n_.size() != box_.dim()) throw Error("grid: n has wrong dimension");
    Index total = 1;
    for (Index a = 0; a < n_.size(); ++a) {
      if (n_[a] < 2) throw Error("grid: need at least 2 points per axis");
      total *= n_[a];
      if (total > max_points) throw Error("grid: point count exceeds cap");
    }
    size_ = total;
    h_ = box_.width().cwiseQuotient(n_.template cast<Scalar>());
    strides_ = IVec::Ones(n_.size());
    for (Index a = n_.size() - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * n_[a + 1];
  }

  /// Same number of points on every axis.
  static Grid uniform(Box<Scalar> box, Index n_per_axis) {
    const int d = box.dim();
    return Grid(std::move(box), IVec::Constant(d, n_per_axis));
  }

  int dim() const { return box_.dim(); }
  const Box<Scalar>& box() const { return box_; }
  const IVec& n() const { return n_; }
  const Vec<Scalar>& h() const { return h_; }
  const IVec& strides() const { return strides_; }
  Index size() const { return size_; }
  Scalar cell_volume() const { return h_.prod(); }

  Scalar coord(int axis, Index i) const {
    return box_.lower()[axis] + (Scalar(i) + Scalar(0.5)) * h_[axis];
  }

  IVec unravel(Index linear) const {
    IVec idx(n_.size());
    for (Index a = 0; a < n_.size(); ++a) {
      idx[a] = linear / strides_[a];
      linear -= idx[a] * strides_[a];
    }
    return idx;
  }

  Index ravel(const IVec& idx) const { return idx.dot(strides_); }

  Vec<Scalar> point(Index linear) const {
    Vec<Scalar> x(n_.size());
    for (Index a = 0; a < n_.size(); ++a) {
      const Index i = linear / strides_[a];
      linear -= i * strides_[a];
      x[a] = coord(static_cast<int>(a), i);
    }
    return x;
  }

  /// Cell around sample `linear`.
  Box<Scalar> cell(Index linear) const {
    const Vec<Scalar> c = point(linear);
    return Box<Scalar>(c - h_ / Scalar(2), c + h_ / Scalar(2));
  }

  /// Integer lattice offset equal to u / h when u is grid-aligned.
  std::optional<IVec> lattice_offset(const Vec<Scalar>& u, Scalar rel_tol = Scalar(1e-9)) const {
    if (u.size() != n_.size()) throw Error("grid: shift has wrong dimension");
    IVec k(u.size());
    for (Index a = 0; a < u.size(); ++a) {
      const Scalar q = u[a] / h_[a];
      const Scalar r = std::round(q);
      if (std::abs(q - r) > rel_tol * std::max(Scalar(1), std::abs(q))) return std::nullopt;
      k[a] = static_cast<Index>(r);
    }
    return k;
  }

  bool is_aligned(const Vec<Scalar>& u) const { return lattice_offset(u).has_value(); }

  /// Grid on the same box with `factor` times more points per axis.
  Grid refined(Index factor) const { return Grid(box_, n_ * factor); }

  bool operator==(const Grid& o) const { return box_ == o.box_ && n_ == o.n_; }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  Box<Scalar> box_;
  IVec n_;
  Vec<Scalar> h_;
  IVec strides_;
  Index size_ = 0;
};

namespace detail {

// Calls fn(linear, multi_index) for every point of the grid in storage order.
template <typename Scalar, typename Fn>
void for_each_index(const Grid<Scalar>& grid, Fn&& fn) {
  const Index d = grid.dim();
  IVec idx = IVec::Zero(d);
  for (Index linear = 0; linear < grid.size(); ++linear) {
    fn(linear, idx);
    for (Index a = d - 1; a >= 0; --a) {
      if (++idx[a] < grid.n()[a]) break;
      idx[a] = 0;
    }
  }
}

}  // namespace detail

template <typename Scalar>
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(Grid<Scalar> grid, Samples<Scalar> samples)
      : grid_(std::move(grid)), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) throw Error("grid function: sample count does not match grid");
    if (!samples_.allFinite()) throw Error("non-finite input");
    support_margin_ = compute_margin();
  }

  static GridFunction zeros(const Grid<Scalar>& grid) {
    return GridFunction(grid, Samples<Scalar>::Zero(grid.size()));
  }

  /// Samples fn(x) at every cell centre.
  template <typename Fn>
  static GridFunction sample(const Grid<Scalar>& grid, Fn&& fn) {
    Samples<Scalar> s(grid.size());
    for (Index i = 0; i < grid.size(); ++i) s[i] = static_cast<Scalar>(fn(grid.point(i)));
    return GridFunction(grid, std::move(s));
  }

  const Grid<Scalar>& grid() const { return grid_; }
  const Samples<Scalar>& samples() const { return samples_; }
  Index size() const { return samples_.size(); }
  int dim() const { return grid_.dim(); }
  Scalar operator[](Index i) const { return samples_[i]; }

  /// Distance from the outermost nonzero cell to the box boundary;
  /// +inf for the zero function.
  Scalar support_margin() const { return support_margin_; }

  Scalar max_abs() const { return samples_.size() ? samples_.abs().maxCoeff() : Scalar(0); }
  bool is_nonnegative() const { return (samples_ >= Scalar(0)).all(); }

 private:
  Scalar compute_margin() const {
    const Index d = grid_.dim();
    IVec lo = grid_.n();
    IVec hi = IVec::Constant(d, -1);
    bool any = false;
    detail::for_each_index(grid_, [&](Index linear, const IVec& idx) {
      if (samples_[linear] == Scalar(0)) return;
      any = true;
      lo = lo.cwiseMin(idx);
      hi = hi.cwiseMax(idx);
    });
    if (!any) return std::numeric_limits<Scalar>::infinity();
    Scalar m = std::numeric_limits<Scalar>::infinity();
    for (Index a = 0; a < d; ++a) {
      m = std::min(m, Scalar(lo[a]) * grid_.h()[a]);
      m = std::min(m, Scalar(grid_.n()[a] - 1 - hi[a]) * grid_.h()[a]);
    }
    return m;
  }

  Grid<Scalar> grid_;
  Samples<Scalar> samples_;
  Scalar support_margin_ = std::numeric_limits<Scalar>::infinity();
};

using Boxd = Box<double>;
using Gridd = Grid<double>;
using GridFunctiond = GridFunction<double>;

// ---------------------------------------------------------------------------
// Pointwise algebra

enum class PointwiseOp { add, sub, mul, abs, pow, scale };

template <typename Scalar>
void require_same_grid(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  if (f.grid() != g.grid()) throw Error("grid mismatch");
}

/// Binary ops use g; unary ops (abs, pow, scale) ignore g and use `param`.
template <typename Scalar>
GridFunction<Scalar> pointwise(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g, PointwiseOp op,
                               std::type_identity_t<Scalar> param = Scalar(1)) {
  switch (op) {
    case PointwiseOp::add:
      require_same_grid(f, g);
      return GridFunction<Scalar>(f.grid(), f.samples() + g.samples());
    case PointwiseOp::sub:
      require_same_grid(f, g);
      return GridFunction<Scalar>(f.grid(), f.samples() - g.samples());
    case PointwiseOp::mul:
      require_same_grid(f, g);
      return GridFunction<Scalar>(f.grid(), f.samples() * g.samples());
    case PointwiseOp::abs:
      return GridFunction<Scalar>(f.grid(), f.samples().abs());
    case PointwiseOp::pow:
      if (param == Scalar(1)) return f;
      if (param == std::round(param)) return GridFunction<Scalar>(f.grid(), f.samples().pow(param));
      return GridFunction<Scalar>(f.grid(), f.samples().abs().pow(param));
    case PointwiseOp::scale:
      return GridFunction<Scalar>(f.grid(), f.samples() * param);
  }
  throw Error("pointwise: unknown op");
}

template <typename Scalar>
GridFunction<Scalar> operator+(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  return pointwise(f, g, PointwiseOp::add);
}
template <typename Scalar>
GridFunction<Scalar> operator-(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  return pointwise(f, g, PointwiseOp::sub);
}
template <typename Scalar>
GridFunction<Scalar> operator*(const GridFunction<Scalar>& f, const GridFunction<Scalar>& g) {
  return pointwise(f, g, PointwiseOp::mul);
}
template <typename Scalar>
GridFunction<Scalar> operator*(Scalar c, const GridFunction<Scalar>& f) {
  return pointwise(f, f, PointwiseOp::scale, c);
}
template <typename Scalar>
GridFunction<Scalar> operator*(const GridFunction<Scalar>& f, Scalar c) {
  return c * f;
}
template <typename Scalar>
GridFunction<Scalar> operator-(const GridFunction<Scalar>& f) {
  return Scalar(-1) * f;
}
template <typename Scalar>
GridFunction<Scalar> abs(const GridFunction<Scalar>& f) {
  return pointwise(f, f, PointwiseOp::abs);
}
/// f^e for integer e, |f|^e otherwise.
template <typename Scalar>
GridFunction<Scalar> pow(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> e) {
  return pointwise(f, f, PointwiseOp::pow, e);
}

// ---------------------------------------------------------------------------
// Quadrature

enum class QuadratureKind { midpoint, trapezoid };

/// midpoint: samples are cell values. A weight is integrated exactly over
/// each cell; with refinement r > 1 each cell is split into r sub-cells per
/// axis and the samples are reconstructed quadratically from the neighbouring
/// cells before integrating against the weight. trapezoid: samples are nodes,
/// endpoint nodes carry half weight and a weight is evaluated pointwise.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::midpoint;
  int refinement = 1;

  QuadratureRule() = default;
  QuadratureRule(QuadratureKind k, int r) : kind(k), refinement(r) {
    if (r < 1) throw Error("quadrature: refinement must be >= 1");
  }
};

namespace detail {

// Tensor trapezoid factor (product of 1/2 for every axis where the index is
// an endpoint).
template <typename Scalar>
Scalar trapezoid_factor(const Grid<Scalar>& grid, const IVec& idx) {
  Scalar w = 1;
  for (Index a = 0; a < idx.size(); ++a)
    if (idx[a] == 0 || idx[a] == grid.n()[a] - 1) w *= Scalar(0.5);
  return w;
}

}  // namespace detail

template <typename Scalar>
Scalar integrate(const GridFunction<Scalar>& f, const QuadratureRule& rule = {}) {
  if (!f.samples().allFinite()) throw Error("non-finite input");
  const Scalar vol = f.grid().cell_volume();
  if (rule.kind == QuadratureKind::midpoint) return f.samples().sum() * vol;
  Scalar acc = 0;
  detail::for_each_index(f.grid(), [&](Index linear, const IVec& idx) {
    acc += detail::trapezoid_factor(f.grid(), idx) * f[linear];
  });
  return acc * vol;
}

// ---------------------------------------------------------------------------
// Lattice correlation: g[i] = sum_j w_j f[i + lo + j], f = 0 outside the grid.

template <typename Scalar>
struct SeparableKernel {
  IVec lo;                                  // first offset per axis
  std::vector<Samples<Scalar>> axis_taps;   // weights per axis
};

template <typename Scalar>
struct DenseKernel {
  IVec lo;               // first offset per axis
  IVec extent;           // taps per axis
  Samples<Scalar> taps;  // row-major over extent
};

namespace detail {

template <typename Scalar>
Samples<Scalar> correlate_axis(const Grid<Scalar>& grid, const Samples<Scalar>& in, Index axis, Index lo,
                               const Samples<Scalar>& taps) {
  const Index n = grid.n()[axis];
  const Index stride = grid.strides()[axis];
  const Index m = taps.size();
  Samples<Scalar> out = Samples<Scalar>::Zero(in.size());
  // Lines along `axis` start at every index whose axis coordinate is 0.
  for (Index base = 0; base < in.size(); ++base) {
    if ((base / stride) % n != 0) continue;
    for (Index i = 0; i < n; ++i) {
      const Index j0 = std::max<Index>(0, -(i + lo));
      const Index j1 = std::min<Index>(m, n - (i + lo));
      Scalar acc = 0;
      for (Index j = j0; j < j1; ++j) acc += taps[j] * in[base + (i + lo + j) * stride];
      out[base + i * stride] = acc;
    }
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
GridFunction<Scalar> correlate(const GridFunction<Scalar>& f, const SeparableKernel<Scalar>& k) {
  const auto& grid = f.grid();
  if (k.lo.size() != grid.dim() || static_cast<int>(k.axis_taps.size()) != grid.dim())
    throw Error("kernel: dimension mismatch");
  Samples<Scalar> s = f.samples();
  for (int a = 0; a < grid.dim(); ++a) s = detail::correlate_axis(grid, s, a, k.lo[a], k.axis_taps[a]);
  return GridFunction<Scalar>(grid, std::move(s));
}

template <typename Scalar>
GridFunction<Scalar> correlate(const GridFunction<Scalar>& f, const DenseKernel<Scalar>& k) {
  const auto& grid = f.grid();
  const Index d = grid.dim();
  if (k.lo.size() != d || k.extent.size() != d || k.taps.size() != k.extent.prod())
    throw Error("kernel: dimension mismatch");
  Samples<Scalar> out = Samples<Scalar>::Zero(grid.size());
  const auto& in = f.samples();
  IVec off = IVec::Zero(d);
  for (Index t = 0; t < k.taps.size(); ++t) {
    const Scalar w = k.taps[t];
    if (w != Scalar(0)) {
      const IVec shift = k.lo + off;
      Index delta = shift.dot(grid.strides());
      detail::for_each_index(grid, [&](Index linear, const IVec& idx) {
        for (Index a = 0; a < d; ++a) {
          const Index s = idx[a] + shift[a];
          if (s < 0 || s >= grid.n()[a]) return;
        }
        out[linear] += w * in[linear + delta];
      });
    }
    for (Index a = d - 1; a >= 0; --a) {
      if (++off[a] < k.extent[a]) break;
      off[a] = 0;
    }
  }
  return GridFunction<Scalar>(grid, std::move(out));
}

// ---------------------------------------------------------------------------
// Translation f -> f(. + u)

enum class ShiftPolicy { strict, interpolate };

template <typename Scalar>
GridFunction<Scalar> translate(const GridFunction<Scalar>& f, const std::type_identity_t<Vec<Scalar>>& u,
                               ShiftPolicy policy = ShiftPolicy::strict) {
  const auto& grid = f.grid();
  const int d = grid.dim();
  SeparableKernel<Scalar> k{IVec(d), {}};
  if (auto off = grid.lattice_offset(u)) {
    if (off->isZero()) return f;
    k.lo = *off;
    for (int a = 0; a < d; ++a) k.axis_taps.push_back(Samples<Scalar>::Ones(1));
    return correlate(f, k);
  }
  if (policy == ShiftPolicy::strict) throw Error("unaligned shift");
  for (int a = 0; a < d; ++a) {
    const Scalar q = u[a] / grid.h()[a];
    const Scalar fl = std::floor(q);
    const Scalar frac = q - fl;
    k.lo[a] = static_cast<Index>(fl);
    Samples<Scalar> taps(2);
    taps << Scalar(1) - frac, frac;
    k.axis_taps.push_back(taps);
  }
  return correlate(f, k);
}

}  // namespace wsl
