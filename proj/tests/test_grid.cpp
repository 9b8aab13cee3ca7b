#include "oracles.hpp"
#include "wsl/norms.hpp"

#include <doctest.h>

#include <random>

using namespace wsl;

namespace {

Gridd line(double lo, double hi, Index n) { return Gridd::uniform(Boxd::cube(1, lo, hi), n); }

GridFunctiond indicator(const Gridd& g, double a, double b) {
  return GridFunctiond::sample(g, [&](const Vec<double>& x) { return x[0] > a && x[0] < b ? 1.0 : 0.0; });
}

double bump(double x, double c, double w) {
  const double r = (x - c) / w;
  return std::abs(r) < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Gridd g(Boxd(Vec<double>::Constant(2, -1.0), Vec<double>::Constant(2, 1.0)), (IVec(2) << 4, 8).finished());
  CHECK(g.size() == 32);
  CHECK(g.h()[0] == doctest::Approx(0.5));
  CHECK(g.coord(1, 0) == doctest::Approx(-0.875));
  CHECK(g.ravel(g.unravel(13)) == 13);
  CHECK(g.strides()[1] == 1);
  CHECK_THROWS_AS(Gridd(Boxd::cube(1, 0, 1), (IVec(1) << 1).finished()), Error);
  CHECK_THROWS_AS(Gridd(Boxd::cube(3, 0, 1), (IVec(3) << 256, 256, 256).finished(), 1 << 20), Error);
}

TEST_CASE("integrate examples") {
  const auto g = line(0, 1, 64);
  CHECK(integrate(GridFunctiond::sample(g, [](const Vec<double>&) { return 1.0; })) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(integrate(GridFunctiond::sample(g, [](const Vec<double>& x) { return x[0]; })) ==
        doctest::Approx(0.5).epsilon(1e-15));
  Samples<double> s = Samples<double>::Zero(64);
  s[3] = std::nan("");
  CHECK_THROWS_WITH(GridFunctiond(g, s), "non-finite input");
}

TEST_CASE("integrate agrees with the 4x refined evaluation on smooth functions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(-2, 2), w(0.5, 1.5);
  const auto g = line(-4, 4, 1024);
  for (int t = 0; t < 20; ++t) {
    const double c0 = c(rng), w0 = w(rng);
    auto fn = [&](const Vec<double>& x) { return bump(x[0], c0, w0) * (1 + 0.3 * std::sin(3 * x[0])); };
    const double coarse = integrate(GridFunctiond::sample(g, fn));
    const double fine = integrate(GridFunctiond::sample(g.refined(4), fn));
    CHECK(std::abs(coarse - fine) <= 1e-6 * std::abs(fine));
  }
}

TEST_CASE("weighted norm examples") {
  const auto g = line(-1, 2, 48);
  const auto chi = indicator(g, 0, 1);
  CHECK(weighted_lp_norm(chi, 2.0, Weightd::constant(1)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(weighted_lp_norm(chi, 1.0, Weightd::power(1)) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(weighted_lp_norm(chi, std::numeric_limits<double>::infinity(), Weightd::power(1)) == 1.0);
  CHECK_THROWS_WITH(weighted_lp_norm(chi, 0.0, Weightd::constant(1)), "invalid exponent");
  CHECK_THROWS_WITH(weighted_lp_norm(chi, -1.0, Weightd::constant(1)), "invalid exponent");
}

TEST_CASE("weighted norm against an independent Gauss-Legendre oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(-2, 2), w(0.6, 1.5);
  const auto g = line(-4, 4, 4096);
  for (double alpha : {0.0, 0.5, -0.5}) {
    const Measured mu(g, Weightd::power(alpha), {QuadratureKind::midpoint, 16});
    for (double p : {0.5, 1.0, 2.0, 3.0}) {
      for (int t = 0; t < 5; ++t) {
        const double c0 = c(rng), w0 = w(rng);
        auto f = [&](double x) { return bump(x, c0, w0) * (1.2 + std::cos(2 * x)); };
        const auto fs = GridFunctiond::sample(g, [&](const Vec<double>& x) { return f(x[0]); });
        const double exact = std::pow(
            oracle::integrate_singular_1d([&](double x) { return std::pow(std::abs(f(x)), p) * std::pow(std::abs(x), alpha); },
                                          -4, 4, 512),
            1 / p);
        INFO("alpha=", alpha, " p=", p, " w=", w0, " c=", c0);
        CHECK(std::abs(mu.norm(fs, p) - exact) <= 1e-6 * exact);
      }
    }
  }
}

TEST_CASE("trapezoid cross-check agrees with midpoint for a smooth weight") {
  const auto g = line(-4, 4, 2048);
  const auto f = GridFunctiond::sample(g, [](const Vec<double>& x) { return bump(x[0], 0.3, 1.2); });
  const double mid = weighted_lp_norm(f, 2.0, Weightd::power(2));
  const double trap = weighted_lp_norm(f, 2.0, Weightd::power(2), {QuadratureKind::trapezoid, 1});
  CHECK(std::abs(mid - trap) <= 1e-5 * mid);
}

TEST_CASE("norm properties") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto g = line(-2, 2, 256);
  const Measured mu(g, Weightd::power(0.5));
  for (int t = 0; t < 10; ++t) {
    Samples<double> a(g.size()), b(g.size());
    for (Index i = 0; i < g.size(); ++i) a[i] = u(rng), b[i] = u(rng);
    const GridFunctiond f(g, a), h(g, b);
    const double cst = 3.7 * u(rng);
    for (double p : {0.3, 0.5, 1.0, 2.0, 3.0}) {
      CHECK(mu.norm(cst * f, p) == doctest::Approx(std::abs(cst) * mu.norm(f, p)).epsilon(1e-12));
      const auto big = abs(f) + abs(h);
      CHECK(mu.norm(f, p) <= mu.norm(big, p));
      if (p < 1) CHECK(std::pow(mu.norm(f + h, p), p) <= std::pow(mu.norm(f, p), p) + std::pow(mu.norm(h, p), p) + 1e-10);
    }
  }
}

TEST_CASE("translate") {
  const auto g = line(-2, 3, 80);
  const auto chi = indicator(g, 0, 1);
  CHECK((translate(chi, Vec<double>::Zero(1)).samples() == chi.samples()).all());
  const auto shifted = translate(chi, Vec<double>::Constant(1, 1.0));
  CHECK((shifted.samples() == indicator(g, -1, 0).samples()).all());
  const auto back = translate(shifted, Vec<double>::Constant(1, -1.0));
  CHECK((back.samples() == chi.samples()).all());
  CHECK_THROWS_WITH(translate(chi, Vec<double>::Constant(1, 0.01)), "unaligned shift");
  const auto interp = translate(chi, Vec<double>::Constant(1, 0.5 / 16), ShiftPolicy::interpolate);
  CHECK(integrate(interp) == doctest::Approx(1.0));
  const Measured mu(g, Weightd::constant(1));
  CHECK(mu.norm(shifted, 2.0) == doctest::Approx(mu.norm(chi, 2.0)).epsilon(1e-15));
  const auto f = GridFunctiond::sample(g, [](const Vec<double>& x) { return bump(x[0], 0.5, 1); });
  const Vec<double> u = Vec<double>::Constant(1, 0.25);
  CHECK(((translate(2.0 * f + chi, u) - (2.0 * translate(f, u) + translate(chi, u))).samples().abs() < 1e-15).all());
}

TEST_CASE("pointwise") {
  const auto g = line(-1, 1, 32);
  const auto f = GridFunctiond::sample(g, [](const Vec<double>& x) { return std::sin(3 * x[0]) * (1 - x[0] * x[0]); });
  const auto zero = GridFunctiond::zeros(g);
  CHECK(((f + zero).samples() == f.samples()).all());
  CHECK((abs(-f).samples() == abs(f).samples()).all());
  CHECK((pow(abs(f), 1.0).samples() == abs(f).samples()).all());
  CHECK_THROWS_WITH(f + GridFunctiond::zeros(line(-1, 1, 16)), "grid mismatch");
}

TEST_CASE("support margin") {
  const auto g = line(-2, 2, 64);
  CHECK(indicator(g, 0, 1).support_margin() == doctest::Approx(1.0));
  CHECK(std::isinf(GridFunctiond::zeros(g).support_margin()));
}
