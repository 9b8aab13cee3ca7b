#include "wsl/frac_diff.hpp"

#include <doctest.h>

#include <cmath>

using namespace wsl;

namespace {

double bump(double x, double c, double w) {
  const double r = (x - c) / w;
  return std::abs(r) < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0;
}

GridFunctiond smooth_f(Index n = 512, double half_width = 4) {
  const Gridd g = Gridd::uniform(Boxd::cube(1, -half_width, half_width), n);
  return GridFunctiond::sample(g, [](const Vec<double>& x) {
    return bump(x[0], -0.3, 1.0) + 0.6 * bump(x[0], 0.5, 0.7) + 0.2 * std::cos(3 * x[0]) * bump(x[0], 0, 1.4);
  });
}

// Generalized binomial coefficient through the gamma function.
double gamma_binomial(double k, int s) { return std::tgamma(k + 1) / (std::tgamma(s + 1.0) * std::tgamma(k - s + 1)); }

double sup_diff(const GridFunctiond& a, const GridFunctiond& b) { return (a.samples() - b.samples()).abs().maxCoeff(); }

}  // namespace

TEST_CASE("binomial coefficients") {
  const auto one = binom_coeffs<double>(1.0, 5);
  CHECK(one.coeffs[0] == 1);
  CHECK(one.coeffs[1] == 1);
  for (int s = 2; s <= 5; ++s) CHECK(one.coeffs[s] == 0);
  CHECK(one.tail_bound == 0);

  const auto half = binom_coeffs<double>(0.5, 3);
  CHECK(half.coeffs[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(half.coeffs[2] == doctest::Approx(-0.125).epsilon(1e-15));
  CHECK(half.coeffs[3] == doctest::Approx(0.0625).epsilon(1e-15));

  const auto two = binom_coeffs<double>(2.0, 4);
  CHECK(two.coeffs[1] == 2);
  CHECK(two.coeffs[2] == 1);
  CHECK(two.coeffs[3] == 0);

  for (double k : {0.3, 0.5, 1.5, 2.7}) {
    const auto s = binom_coeffs<double>(k, 12);
    for (int i = 0; i <= 12; ++i) {
      INFO("k = " << k << ", s = " << i);
      CHECK(s.coeffs[i] == doctest::Approx(gamma_binomial(k, i)).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(binom_coeffs<double>(0.0, 4), Error);
  CHECK_THROWS_AS(binom_coeffs<double>(-1.0, 4), Error);
  CHECK_THROWS_AS(binom_coeffs<double>(0.5, 0), Error);
}

TEST_CASE("coefficient decay and telescoping") {
  for (double k : {0.3, 0.5, 1.5}) {
    const auto s = binom_coeffs<double>(k, 10000);
    double prev = 0;
    for (int i = 1; i <= 10000; ++i) {
      const double scaled = std::abs(s.coeffs[i]) * std::pow(double(i), 1 + k);
      CHECK(scaled <= s.decay_constant);
      // Beyond a short burn-in the scaled magnitude decreases monotonically.
      if (i > 3) CHECK(scaled <= prev);
      prev = scaled;
    }
    for (Index N : {10, 100, 1000, 10000}) {
      const auto t = binom_coeffs<double>(k, N);
      INFO("k = " << k << ", N = " << N);
      CHECK(std::abs(t.alternating_sum()) <= t.tail_bound);
      // The tail bound dominates the explicitly summed next stretch.
      const auto longer = binom_coeffs<double>(k, 4 * N);
      double stretch = 0;
      for (Index i = N + 1; i <= 4 * N; ++i) stretch += std::abs(longer.coeffs[i]);
      CHECK(stretch <= t.tail_bound);
    }
  }
}

TEST_CASE("integer orders terminate") {
  const auto f = smooth_f();
  const double delta = 0.25;
  const auto box = BoxSpecd::v_box(1, delta);
  const auto vf = box_average(f, box);
  const auto vvf = box_average(vf, box);

  const auto k1 = frac_difference(f, 1.0, delta, 1e-8);
  CHECK(sup_diff(k1, f - vf) <= 1e-12 * f.max_abs());

  const auto k2 = frac_difference(f, 2.0, delta, 1e-8);
  CHECK(sup_diff(k2, f - 2.0 * vf + vvf) <= 1e-12 * f.max_abs());

  // Longer series give the same operator.
  const auto long2 = frac_series_apply(f, binom_coeffs<double>(2.0, 6), delta);
  CHECK(sup_diff(long2, k2) <= 1e-12 * f.max_abs());

  // Semigroup: (E - V)((E - V) f) = (E - V)^2 f.
  const auto twice = frac_difference(k1, 1.0, delta, 1e-8);
  CHECK(sup_diff(twice, k2) <= 1e-12 * f.max_abs());
}

TEST_CASE("half order: truncation is self-consistent") {
  const auto f = smooth_f(768, 6);
  const double delta = 0.25, tol = 1e-8;
  const auto res = frac_difference_detailed(f, 0.5, delta, tol);
  CHECK_FALSE(res.capped);
  CHECK(res.truncation_sup <= tol * f.max_abs());
  const auto doubled = frac_series_apply(f, binom_coeffs<double>(0.5, 2 * res.series.N), delta);
  CHECK(sup_diff(res.value, doubled) <= res.truncation_sup);
  CHECK(sup_diff(res.value, doubled) <= tol * f.max_abs());
}

TEST_CASE("support margin and argument errors") {
  const Gridd g = Gridd::uniform(Boxd::cube(1, -4, 4), 512);
  const auto wide = GridFunctiond::sample(g, [](const Vec<double>& x) { return bump(x[0], 0, 3.6); });
  CHECK_THROWS_WITH_AS(frac_difference(wide, 0.5, 1.0, 1e-8), "insufficient support margin", Error);
  CHECK_THROWS_WITH_AS(frac_series_apply(wide, binom_coeffs<double>(2.0, 2), 1.0), "insufficient support margin", Error);
  const auto f = smooth_f();
  CHECK_THROWS_AS(frac_difference(f, 0.0, 0.25, 1e-8), Error);
  CHECK_THROWS_AS(frac_difference(f, 0.5, 0.0, 1e-8), Error);
  CHECK_THROWS_WITH_AS(frac_difference(f, 1.0, 0.01, 1e-8), "unaligned shift", Error);
}

TEST_CASE("delta above one caps the series at the margin budget") {
  const auto f = smooth_f();
  const auto res = frac_difference_detailed(f, 0.5, 1.5, 1e-8);
  CHECK(res.capped);
  CHECK(res.series.N * 1.5 / 2 <= f.support_margin());
  CHECK(std::isinf(res.truncation_sup));
}

TEST_CASE("fractional bound check") {
  const auto f = smooth_f();
  const auto r1 = frac_bound_check(f, 1.0, 0.25, 2.0, Weightd::constant(1));
  CHECK(r1.verdict == Verdict::pass);
  CHECK(r1.ratio <= 2 + 1e-9);
  CHECK(r1.constant_used == 2);

  const auto rh = frac_bound_check(f, 0.5, 0.25, 2.0, Weightd::constant(1));
  CHECK(rh.verdict == Verdict::pass);
  CHECK(rh.ratio <= 2 + 1e-8);
  CHECK(rh.constant_used == 2);
  // The series oracle agrees with the closed form of the coefficient sum.
  const auto series = binom_coeffs<double>(0.5, 10000);
  CHECK(series.abs_sum() <= 2);
  CHECK(series.abs_sum() + series.tail_bound >= 2);

  // Power weight, k = 2: finite and stable under refinement.
  const auto coarse = frac_bound_check(smooth_f(512), 2.0, 0.25, 2.0, Weightd::power(0.5));
  const auto fine = frac_bound_check(smooth_f(1024), 2.0, 0.25, 2.0, Weightd::power(0.5));
  CHECK(std::isfinite(coarse.ratio));
  CHECK(coarse.verdict == Verdict::pass);
  CHECK(std::abs(fine.ratio - coarse.ratio) <= 0.02 * coarse.ratio);
}
