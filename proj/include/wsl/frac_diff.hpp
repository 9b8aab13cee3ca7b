#pragma once

// Fractional differences (E - V_delta)^k f = sum_s (-1)^s C_s^k (V_delta)^s f
// with generalized binomial coefficients and a certified truncation.

#include "wsl/averaging.hpp"
#include "wsl/grid.hpp"
#include "wsl/norms.hpp"
#include "wsl/report.hpp"
#include "wsl/weight.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wsl {

inline constexpr Index kMaxSeriesTerms = 10000;

template <typename Scalar>
struct FracDiffSeries {
  Scalar k = 1;
  /// C_0 .. C_N.
  std::vector<Scalar> coeffs;
  Index N = 0;
  /// Upper bound of sum_{s > N} |C_s|.
  Scalar tail_bound = 0;
  /// c_k with |C_s| <= c_k s^(-1-k); zero for integer k.
  Scalar decay_constant = 0;

  bool integer_order() const { return k == std::round(k); }

  /// sum_{s > N} |C_s| rho^s <= rho^(N+1) tail_bound for 0 < rho <= 1.
  Scalar weighted_tail(Scalar rho) const { return tail_bound == 0 ? Scalar(0) : std::pow(rho, Scalar(N + 1)) * tail_bound; }

  /// sum_{s=0}^{N} |C_s|.
  Scalar abs_sum() const {
    Scalar acc = 0;
    for (Scalar c : coeffs) acc += std::abs(c);
    return acc;
  }

  /// sum_{s=0}^{N} (-1)^s C_s.
  Scalar alternating_sum() const {
    long double acc = 0;
    for (std::size_t s = 0; s < coeffs.size(); ++s) acc += (s % 2 ? -1.0L : 1.0L) * coeffs[s];
    return static_cast<Scalar>(acc);
  }
};

using FracDiffSeriesd = FracDiffSeries<double>;

namespace detail {

// C_0..C_last by the product recurrence, carried in long double.
inline std::vector<long double> binomial_run(long double k, Index last) {
  std::vector<long double> c(static_cast<std::size_t>(last) + 1);
  c[0] = 1;
  for (Index s = 1; s <= last; ++s) c[s] = c[s - 1] * (k - (s - 1)) / s;
  return c;
}

}  // namespace detail

template <typename Scalar>
FracDiffSeries<Scalar> binom_coeffs(std::type_identity_t<Scalar> k, Index N) {
  if (!(k > 0) || !std::isfinite(k)) throw Error("fractional order must be positive");
  if (N < 1) throw Error("series length must be >= 1");
  FracDiffSeries<Scalar> series;
  series.k = k;
  series.N = N;
  const bool integer = k == std::round(k);
  // The decay constant is fitted on at least kMaxSeriesTerms terms so that it
  // does not depend on the truncation point.
  const Index fit = std::max(N, kMaxSeriesTerms);
  const auto run = detail::binomial_run(static_cast<long double>(k), integer ? N : fit);
  series.coeffs.assign(run.begin(), run.begin() + N + 1);
  if (integer) {
    for (Index s = static_cast<Index>(k) + 1; s <= N; ++s) series.coeffs[s] = 0;
    series.tail_bound = 0;
    return series;
  }
  long double ck = 0;
  for (Index s = 1; s <= fit; ++s) ck = std::max(ck, std::fabs(run[s]) * std::pow(static_cast<long double>(s), 1 + k));
  ck *= 2;
  series.decay_constant = static_cast<Scalar>(ck);
  // sum_{s>N} c_k s^(-1-k) <= c_k N^(-k) / k.
  series.tail_bound = static_cast<Scalar>(ck * std::pow(static_cast<long double>(N), -static_cast<long double>(k)) / k);
  return series;
}

/// Smallest N whose truncation leaves sum_{s>N} |C_s| rho^s <= tol, capped at
/// kMaxSeriesTerms. Integer orders stop at N = k.
template <typename Scalar>
FracDiffSeries<Scalar> series_for_tolerance(std::type_identity_t<Scalar> k, std::type_identity_t<Scalar> rho,
                                            std::type_identity_t<Scalar> tol) {
  if (!(k > 0) || !std::isfinite(k)) throw Error("fractional order must be positive");
  if (k == std::round(k)) return binom_coeffs<Scalar>(k, std::max<Index>(1, static_cast<Index>(k)));
  const FracDiffSeries<Scalar> probe = binom_coeffs<Scalar>(k, 1);
  const long double ck = probe.decay_constant;
  Index N = 1;
  for (; N < kMaxSeriesTerms; ++N) {
    const long double bound =
        std::pow(static_cast<long double>(rho), N + 1) * ck * std::pow(static_cast<long double>(N), -k) / k;
    if (bound <= tol) break;
  }
  return binom_coeffs<Scalar>(k, N);
}

template <typename Scalar>
struct FracDiffResult {
  GridFunction<Scalar> value;
  FracDiffSeries<Scalar> series;
  /// Bound of the dropped terms in sup norm: weighted_tail(delta^d) ||f||_inf.
  Scalar truncation_sup = 0;
  /// True when N hit the term cap or the delta > 1 margin budget.
  bool capped = false;
};

/// Sum over s <= series.N of (-1)^s C_s (V_delta)^s f. Each power of V_delta
/// is one more box average, so the support grows by delta/2 per term.
template <typename Scalar>
GridFunction<Scalar> frac_series_apply(const GridFunction<Scalar>& f, const FracDiffSeries<Scalar>& series,
                                       std::type_identity_t<Scalar> delta) {
  const int d = f.dim();
  const Scalar reach = Scalar(series.N) * delta / 2;
  if (reach > f.support_margin() * (1 + Scalar(1e-12))) throw Error("insufficient support margin");
  const BoxSpec<Scalar> box = BoxSpec<Scalar>::v_box(d, delta);
  const Scalar rho = std::pow(delta, Scalar(d));
  const Scalar f_sup = f.max_abs();
  Samples<Scalar> acc = f.samples();
  GridFunction<Scalar> power = f;
  Index last = series.N;
  if (series.integer_order()) last = std::min<Index>(last, static_cast<Index>(series.k));
  for (Index s = 1; s <= last; ++s) {
    power = box_average(power, box);
    // The closed rules are positive with weights summing to delta per axis.
    if (power.max_abs() > std::pow(rho, Scalar(s)) * f_sup * (1 + Scalar(1e-12) * Scalar(s)) + Scalar(1e-300))
      throw Error("fractional difference: sup-norm contraction violated");
    const Scalar c = (s % 2 ? -1 : 1) * series.coeffs[s];
    if (c != 0) acc += c * power.samples();
  }
  return GridFunction<Scalar>(f.grid(), std::move(acc));
}

/// (E - V_delta)^k f truncated so that the dropped terms stay below
/// tol ||f||_inf in sup norm. For delta <= 1 the powers contract by delta^d,
/// which is asserted term by term. For delta > 1 no contraction is available:
/// N is set by the margin budget and the result is flagged as capped.
template <typename Scalar>
FracDiffResult<Scalar> frac_difference_detailed(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> k,
                                                std::type_identity_t<Scalar> delta, std::type_identity_t<Scalar> tol) {
  if (!(k > 0) || !std::isfinite(k)) throw Error("fractional order must be positive");
  if (!(delta > 0) || !std::isfinite(delta)) throw Error("fractional difference: delta must be positive");
  if (!(tol > 0)) throw Error("fractional difference: tol must be positive");
  const int d = f.dim();
  const Scalar rho = std::pow(delta, Scalar(d));
  FracDiffResult<Scalar> out;
  if (rho <= 1 || k == std::round(k)) {
    out.series = series_for_tolerance<Scalar>(k, rho, tol);
    out.capped = !out.series.integer_order() && out.series.N >= kMaxSeriesTerms;
  } else {
    const Scalar margin = f.support_margin();
    Index budget = std::isinf(margin) ? kMaxSeriesTerms : static_cast<Index>(std::floor(2 * margin / delta + 1e-9));
    budget = std::min(budget, kMaxSeriesTerms);
    if (budget < 1) throw Error("insufficient support margin");
    out.series = binom_coeffs<Scalar>(k, budget);
    out.capped = true;
  }
  out.value = frac_series_apply(f, out.series, delta);
  if (rho <= 1) {
    out.truncation_sup = out.series.weighted_tail(rho) * f.max_abs();
  } else {
    out.truncation_sup = out.series.tail_bound == 0 ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
  }
  return out;
}

template <typename Scalar>
GridFunction<Scalar> frac_difference(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> k,
                                     std::type_identity_t<Scalar> delta, std::type_identity_t<Scalar> tol) {
  return frac_difference_detailed(f, k, delta, tol).value;
}

/// sum_{s>=0} |C_s^k|: 2^k for integer k, 2 for 0 < k < 1, otherwise the
/// partial sum of `series` plus its tail bound.
template <typename Scalar>
Scalar frac_abs_coefficient_sum(const FracDiffSeries<Scalar>& series) {
  if (series.integer_order()) return std::pow(Scalar(2), series.k);
  if (series.k < 1) return Scalar(2);
  return series.abs_sum() + series.tail_bound;
}

/// ||(E - V_delta)^k f||_{p,w} against (sum_s |C_s^k|) ||f||_{p,w}. The error
/// budget is the truncation bound carried into L_{p,w}:
/// truncation_sup * (w-mass of the grid)^(1/p).
inline InequalityReport frac_bound_check(const GridFunctiond& f, double k, double delta, double p, const Weightd& w,
                                         double tol = 1e-8, const QuadratureRule& rule = {}) {
  const auto res = frac_difference_detailed(f, k, delta, tol);
  const Measured mu(f.grid(), w, rule);
  const double lhs = mu.norm(res.value, p);
  const double rhs = mu.norm(f, p);
  const double constant = frac_abs_coefficient_sum(res.series);
  const double budget = res.truncation_sup * std::pow(mu.total(), 1 / p) + 1e-12 * constant * rhs;
  nlohmann::ordered_json params = {{"k", k}, {"delta", delta}, {"p", p}, {"weight", w.describe()}, {"d", f.dim()}};
  auto r = make_report("frac", "||(E-V_delta)^k f||_{p,w} <= (sum_s |C_s^k|) ||f||_{p,w}", std::move(params), lhs, rhs,
                       constant, budget);
  r.details["N"] = res.series.N;
  r.details["tail_bound"] = number_json(res.series.tail_bound);
  r.details["truncation_sup"] = number_json(res.truncation_sup);
  r.details["capped"] = res.capped;
  return r;
}

}  // namespace wsl
