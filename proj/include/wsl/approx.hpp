#pragma once

// Discrete Fourier analysis on the grid torus, the de la Vallee Poussin
// operator J(f, sigma), band-limited projection, spectral Laplacian powers and
// upper estimates of best approximations and K-functionals.
//
// Everything here treats the box as a torus: a compactly supported f with a
// margin is one period of its periodization.

#include "wsl/grid.hpp"
#include "wsl/norms.hpp"
#include "wsl/weight.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

namespace wsl {

template <typename Scalar>
struct Spectrum {
  Grid<Scalar> grid;
  /// Row-major like the samples: coeffs[j] = N^-1 sum_i f_i exp(-2 pi i j.i / n).
  std::vector<std::complex<Scalar>> coeffs;
  /// 2 pi / L per axis.
  Vec<Scalar> freq_step;

  /// Angular frequency of coefficient `linear`, in (-pi/h, pi/h].
  Vec<Scalar> frequency(Index linear) const {
    const IVec idx = grid.unravel(linear);
    Vec<Scalar> y(idx.size());
    for (Index a = 0; a < idx.size(); ++a) {
      const Index n = grid.n()[a];
      const Index j = idx[a] <= n / 2 ? idx[a] : idx[a] - n;
      y[a] = Scalar(j) * freq_step[a];
    }
    return y;
  }

  Scalar energy() const {
    Scalar e = 0;
    for (const auto& c : coeffs) e += std::norm(c);
    return e;
  }
};

using Spectrumd = Spectrum<double>;

enum class VPMethod { direct_quadrature, spectral };

template <typename Scalar>
struct VPParams {
  Scalar sigma = 1;
  VPMethod method = VPMethod::spectral;
  /// Periodic images summed on each side by the direct route.
  Index images = 2048;
};

namespace detail {

// In-place d-dimensional DFT along every axis; the inverse divides by N.
template <typename Scalar>
void fft_nd(const Grid<Scalar>& grid, std::vector<std::complex<Scalar>>& data, bool inverse) {
  Eigen::FFT<Scalar> fft;
  const int d = grid.dim();
  for (int a = 0; a < d; ++a) {
    const Index n = grid.n()[a], stride = grid.strides()[a];
    std::vector<std::complex<Scalar>> line(n), out(n);
    for (Index base = 0; base < grid.size(); ++base) {
      if ((base / stride) % n != 0) continue;
      for (Index i = 0; i < n; ++i) line[i] = data[base + i * stride];
      if (inverse) {
        fft.inv(out, line);
      } else {
        fft.fwd(out, line);
      }
      for (Index i = 0; i < n; ++i) data[base + i * stride] = out[i];
    }
  }
}

template <typename Scalar>
void check_band(const Grid<Scalar>& grid, Scalar sigma) {
  if (!(sigma > 0)) throw Error("band not resolvable");
  for (int a = 0; a < grid.dim(); ++a) {
    const Scalar h = grid.h()[a], L = grid.box().width()[a];
    if (!(sigma * h / std::numbers::pi_v<Scalar> < Scalar(0.5)) || sigma * L < 2 * std::numbers::pi_v<Scalar>)
      throw Error("band not resolvable");
  }
}

}  // namespace detail

template <typename Scalar>
Spectrum<Scalar> spectrum(const GridFunction<Scalar>& f) {
  Spectrum<Scalar> s;
  s.grid = f.grid();
  s.coeffs.assign(f.samples().begin(), f.samples().end());
  detail::fft_nd(s.grid, s.coeffs, false);
  const Scalar inv_n = Scalar(1) / Scalar(s.grid.size());
  for (auto& c : s.coeffs) c *= inv_n;
  s.freq_step = (2 * std::numbers::pi_v<Scalar>) * s.grid.box().width().cwiseInverse();
  return s;
}

/// Real part of the inverse transform.
template <typename Scalar>
GridFunction<Scalar> inverse(const Spectrum<Scalar>& s) {
  std::vector<std::complex<Scalar>> data = s.coeffs;
  const Scalar n = Scalar(s.grid.size());
  for (auto& c : data) c *= n;
  detail::fft_nd(s.grid, data, true);
  Samples<Scalar> out(s.grid.size());
  for (Index i = 0; i < out.size(); ++i) out[i] = data[i].real();
  return GridFunction<Scalar>(s.grid, std::move(out));
}

/// Multiplies every coefficient by m(frequency).
template <typename Scalar, typename Multiplier>
GridFunction<Scalar> fourier_multiply(const GridFunction<Scalar>& f, Multiplier&& m) {
  Spectrum<Scalar> s = spectrum(f);
  for (Index i = 0; i < static_cast<Index>(s.coeffs.size()); ++i) s.coeffs[i] *= m(s.frequency(i));
  return inverse(s);
}

/// Fraction of the spectral energy with |y|_inf > radius.
template <typename Scalar>
Scalar energy_outside_cube(const Spectrum<Scalar>& s, Scalar radius) {
  Scalar out = 0, total = 0;
  for (Index i = 0; i < static_cast<Index>(s.coeffs.size()); ++i) {
    const Scalar e = std::norm(s.coeffs[i]);
    total += e;
    if (s.frequency(i).cwiseAbs().maxCoeff() > radius) out += e;
  }
  return total > 0 ? out / total : Scalar(0);
}

/// Keeps the coefficients with |y| <= sigma: the L2 best approximation from
/// the band-limited functions of type sigma on the grid.
template <typename Scalar>
GridFunction<Scalar> bandlimit_project(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> sigma) {
  if (std::isinf(sigma) && sigma > 0) return f;
  const Scalar edge = sigma * (1 + Scalar(1e-12));
  return fourier_multiply(f, [&](const Vec<Scalar>& y) { return y.norm() <= edge ? Scalar(1) : Scalar(0); });
}

/// One axis of theta_sigma: (cos(sigma t) - cos(2 sigma t)) / (sigma t^2).
template <typename Scalar>
Scalar vp_kernel_1d(Scalar sigma, Scalar t) {
  if (std::abs(t) < Scalar(1e-4) / sigma) {
    const Scalar s2 = sigma * sigma, t2 = t * t;
    return (Scalar(1.5) * s2 - Scalar(0.625) * s2 * s2 * t2 + Scalar(7) / 80 * s2 * s2 * s2 * t2 * t2) / sigma;
  }
  return (std::cos(sigma * t) - std::cos(2 * sigma * t)) / (sigma * t * t);
}

/// theta_sigma(t) = sigma^-d prod_j (cos(sigma t_j) - cos(2 sigma t_j)) / t_j^2.
template <typename Scalar>
Scalar vp_kernel(Scalar sigma, const std::type_identity_t<Vec<Scalar>>& t) {
  if (!(sigma > 0)) throw Error("vp kernel: sigma must be positive");
  Scalar v = 1;
  for (Index j = 0; j < t.size(); ++j) v *= vp_kernel_1d(sigma, t[j]);
  return v;
}

/// Fourier transform of pi^-1 (cos(sigma t) - cos(2 sigma t)) / (sigma t^2):
/// 1 on |y| <= sigma, falling linearly to 0 at |y| = 2 sigma.
template <typename Scalar>
Scalar vp_multiplier_1d(Scalar sigma, Scalar y) {
  const Scalar a = std::abs(y);
  return (std::max(2 * sigma - a, Scalar(0)) - std::max(sigma - a, Scalar(0))) / sigma;
}

namespace detail {

template <typename Scalar>
GridFunction<Scalar> vp_spectral(const GridFunction<Scalar>& f, Scalar sigma) {
  return fourier_multiply(f, [&](const Vec<Scalar>& y) {
    Scalar m = 1;
    for (Index a = 0; a < y.size(); ++a) m *= vp_multiplier_1d(sigma, y[a]);
    return m;
  });
}

// Circular convolution along each axis with the periodized kernel
// sum_{|m| <= images} theta(t + m L), sampled by the midpoint rule.
template <typename Scalar>
GridFunction<Scalar> vp_direct(const GridFunction<Scalar>& f, Scalar sigma, Index images) {
  const auto& grid = f.grid();
  Samples<Scalar> cur = f.samples();
  for (int a = 0; a < grid.dim(); ++a) {
    const Index n = grid.n()[a], stride = grid.strides()[a];
    const Scalar h = grid.h()[a], L = grid.box().width()[a];
    std::vector<Scalar> table(n);
    for (Index t = 0; t < n; ++t) {
      long double acc = 0;
      for (Index m = -images; m <= images; ++m) acc += vp_kernel_1d(sigma, Scalar(t) * h + Scalar(m) * L);
      table[t] = static_cast<Scalar>(acc) * h / std::numbers::pi_v<Scalar>;
    }
    Samples<Scalar> out(cur.size());
    std::vector<Scalar> line(n);
    for (Index base = 0; base < grid.size(); ++base) {
      if ((base / stride) % n != 0) continue;
      for (Index i = 0; i < n; ++i) line[i] = cur[base + i * stride];
      for (Index i = 0; i < n; ++i) {
        Scalar acc = 0;
        for (Index j = 0; j < n; ++j) acc += table[(i - j + n) % n] * line[j];
        out[base + i * stride] = acc;
      }
    }
    cur.swap(out);
  }
  return GridFunction<Scalar>(grid, std::move(cur));
}

}  // namespace detail

/// J(f, sigma) = pi^-d int theta_sigma(x - u) f(u) du on the grid torus.
/// Requires sigma h / pi < 1/2 and sigma L >= 2 pi on every axis.
template <typename Scalar>
GridFunction<Scalar> vp_apply(const GridFunction<Scalar>& f, const VPParams<Scalar>& params) {
  detail::check_band(f.grid(), params.sigma);
  if (params.method == VPMethod::spectral) return detail::vp_spectral(f, params.sigma);
  return detail::vp_direct(f, params.sigma, params.images);
}

template <typename Scalar>
GridFunction<Scalar> vp_apply(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> sigma,
                              VPMethod method = VPMethod::spectral) {
  VPParams<Scalar> params;
  params.sigma = sigma;
  params.method = method;
  return vp_apply(f, params);
}

/// ||f - J(f, sigma/2)||_{p,w}; J(f, sigma/2) has type sigma, so this bounds
/// the best approximation A_sigma(f)_{p,w} from above.
template <typename Scalar>
Scalar best_approx_upper(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> sigma,
                         std::type_identity_t<Scalar> p, const Weight<Scalar>& w,
                         VPMethod method = VPMethod::spectral, const QuadratureRule& rule = {}) {
  const auto j = vp_apply(f, sigma / 2, method);
  return Measure<Scalar>(f.grid(), w, rule).norm(f - j, p);
}

/// Delta^r f through the multiplier (-|y|^2)^r.
template <typename Scalar>
GridFunction<Scalar> laplacian_iterate(const GridFunction<Scalar>& f, int r) {
  if (r < 1) throw Error("laplacian: r must be >= 1");
  return fourier_multiply(f, [&](const Vec<Scalar>& y) { return std::pow(-y.squaredNorm(), Scalar(r)); });
}

/// sigma, 2 sigma, ... from the lowest resolvable band up to the Nyquist limit.
template <typename Scalar>
std::vector<Scalar> default_sigma_ladder(const Grid<Scalar>& grid) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar lo = 2 * pi / grid.box().width().minCoeff();
  const Scalar hi = Scalar(0.5) * pi / grid.h().maxCoeff();
  std::vector<Scalar> out;
  for (Scalar s = lo; s < hi * (1 - Scalar(1e-12)); s *= 2) out.push_back(s);
  return out;
}

/// min over g in {0, f, J(f, sigma_i)} of ||f - g||_{L_a} + delta^r ||Delta^r g||_{L_a}.
/// An empty ladder selects default_sigma_ladder.
template <typename Scalar>
Scalar k_functional_upper(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> delta, int r,
                          std::type_identity_t<Scalar> a, std::vector<Scalar> sigmas = {}) {
  if (!(a >= 1)) throw Error("k functional: a must be >= 1");
  if (!(delta > 0)) throw Error("k functional: delta must be positive");
  const Measure<Scalar> mu(f.grid(), Weight<Scalar>::constant(1));
  const Scalar scale = std::pow(delta, Scalar(r));
  Scalar best = mu.norm(f, a);
  best = std::min(best, scale * mu.norm(laplacian_iterate(f, r), a));
  if (sigmas.empty()) sigmas = default_sigma_ladder(f.grid());
  for (Scalar s : sigmas) {
    const auto g = vp_apply(f, s);
    best = std::min(best, mu.norm(f - g, a) + scale * mu.norm(laplacian_iterate(g, r), a));
  }
  return best;
}

/// CSV rows "frequency,re,im" of a one-dimensional spectrum.
template <typename Scalar>
void write_spectrum_csv(std::ostream& out, const Spectrum<Scalar>& s) {
  if (s.grid.dim() != 1) throw Error("spectrum csv: only d = 1 is supported");
  out << "frequency,re,im\n";
  out.precision(17);
  for (Index i = 0; i < static_cast<Index>(s.coeffs.size()); ++i)
    out << s.frequency(i)[0] << ',' << s.coeffs[i].real() << ',' << s.coeffs[i].imag() << '\n';
}

}  // namespace wsl
