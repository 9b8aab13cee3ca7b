#include "oracles.hpp"
#include "wsl/averaging.hpp"
#include "wsl/muckenhoupt.hpp"

#include <doctest.h>

#include <random>

using namespace wsl;

namespace {

Vec<double> v1(double x) { return Vec<double>::Constant(1, x); }

double bump(double x, double c, double w) {
  const double r = (x - c) / w;
  return std::abs(r) < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0;
}

std::vector<GridFunctiond> bumps(const Gridd& g, int n, unsigned seed, double spread) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-spread, spread), w(0.3, 1.2), a(0.1, 1.0);
  std::vector<GridFunctiond> out;
  for (int i = 0; i < n; ++i) {
    const int d = g.dim();
    std::vector<double> cs(3 * d), ws(3), as(3);
    for (auto& x : cs) x = c(rng);
    for (int k = 0; k < 3; ++k) ws[k] = w(rng), as[k] = a(rng);
    out.push_back(GridFunctiond::sample(g, [&](const Vec<double>& x) {
      double v = 0;
      for (int k = 0; k < 3; ++k) {
        double r2 = 0;
        for (int j = 0; j < d; ++j) r2 += (x[j] - cs[3 * j + k]) * (x[j] - cs[3 * j + k]);
        const double r = std::sqrt(r2) / ws[k];
        if (r < 1) v += as[k] * std::exp(1 - 1 / (1 - r * r));
      }
      return v;
    }));
  }
  return out;
}

GridFunctiond plateau(const Gridd& g, double half, std::function<double(const Vec<double>&)> fn) {
  return GridFunctiond::sample(g, [&](const Vec<double>& x) { return x.cwiseAbs().maxCoeff() < half ? fn(x) : 0.0; });
}

}  // namespace

TEST_CASE("closed rules are positive and exact for the box length") {
  for (Index m = 1; m < 40; ++m) {
    const auto w = closed_rule<double>(m);
    CHECK((w > 0).all());
    CHECK(w.sum() == doctest::Approx(double(m)).epsilon(1e-14));
    if (m == 1) continue;
    // Exact for cubics on [0, m].
    double cubic = 0;
    for (Index j = 0; j <= m; ++j) cubic += w[j] * std::pow(double(j), 3);
    CHECK(cubic == doctest::Approx(std::pow(double(m), 4) / 4).epsilon(1e-12));
  }
}

TEST_CASE("box averages on plateaus") {
  const auto g = Gridd::uniform(Boxd::cube(1, -5, 5), 160);
  const auto one = plateau(g, 3, [](const Vec<double>&) { return 1.0; });
  const auto v = box_average(one, BoxSpecd::v_box(1, 1.0));
  const auto lin = plateau(g, 3, [](const Vec<double>& x) { return x[0]; });
  const auto vl = box_average(lin, BoxSpecd::v_box(1, 0.5));
  const auto s0 = steklov(lin, v1(0));
  for (Index i = 0; i < g.size(); ++i) {
    const double x = g.coord(0, i);
    if (std::abs(x) < 2.4) {
      CHECK(v[i] == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(vl[i] == doctest::Approx(0.5 * x).epsilon(1e-12));
      CHECK(s0[i] == doctest::Approx(x).epsilon(1e-12));
    }
  }
  CHECK(steklov(one, v1(0.5))[80] == doctest::Approx(1.0));
  const auto b = box_average(one, BoxSpecd::b_box(1, 0.5));
  CHECK(b[80] == doctest::Approx(0.5));
}

TEST_CASE("Z_delta against direct high-resolution quadrature") {
  for (int d : {1, 2}) {
    const auto g = d == 1 ? Gridd::uniform(Boxd::cube(1, -4, 4), 512) : Gridd::uniform(Boxd::cube(2, -6, 6), 384);
    const double wide = d == 1 ? 1.7 : 4.0;
    auto fn = [&](double x, double y) { return bump(x, 0.3, wide) * bump(y, -0.2, wide + 0.2); };
    const auto f = GridFunctiond::sample(g, [&](const Vec<double>& x) { return fn(x[0], d == 2 ? x[1] : 0.0); });
    const double delta = 0.75;
    const auto z = box_average(f, BoxSpecd::z_box(d, delta));
    double err = 0, scale = z.max_abs();
    for (Index i = 0; i < g.size(); i += (d == 1 ? 7 : 211)) {
      const Vec<double> x = g.point(i);
      double exact;
      if (d == 1) {
        exact = oracle::integrate_1d([&](double s) { return fn(x[0] + s, 0.0); }, delta / 2, delta, 8, 12);
      } else {
        exact = oracle::integrate_1d(
            [&](double s) {
              return oracle::integrate_1d([&](double t) { return fn(x[0] + s, x[1] + t); }, delta / 2, delta, 8, 12);
            },
            delta / 2, delta, 8, 12);
      }
      err = std::max(err, std::abs(z[i] - exact));
    }
    CHECK(err <= 1e-6 * scale);
  }
}

TEST_CASE("errors") {
  const auto g = Gridd::uniform(Boxd::cube(1, -2, 2), 64);
  const auto f = GridFunctiond::sample(g, [](const Vec<double>& x) { return bump(x[0], 0, 1.5); });
  CHECK_THROWS_WITH(steklov(f, v1(0.5)), "reach exceeds margin");
  CHECK_THROWS_WITH(box_average(f, BoxSpecd::v_box(1, 0.1)), "unaligned shift");
  const auto coarse = Gridd::uniform(Boxd::cube(1, -8, 8), 64);
  CHECK_THROWS_AS(steklov(GridFunctiond::zeros(coarse), v1(0)), Error);
  CHECK_THROWS_AS(r_operator(f, v1(0), Weightd::constant(1), 0.0), Error);
}

TEST_CASE("Steklov mean contracts L2 for the constant weight") {
  const auto g = Gridd::uniform(Boxd::cube(1, -8, 8), 512);
  const auto ens = bumps(g, 20, 1, 3);
  const Measured mu(g, Weightd::constant(1));
  for (const auto& f : ens)
    for (double u : {0.0, 0.5, 1.0, -2.0}) CHECK(mu.norm(steklov(f, v1(u)), 2.0) <= mu.norm(f, 2.0) * (1 + 1e-12));
}

TEST_CASE("weighted Steklov mean") {
  const auto g = Gridd::uniform(Boxd::cube(1, -6, 6), 768);
  const auto ens = bumps(g, 5, 2, 2);
  for (const auto& f : ens) {
    const auto a = weighted_steklov(f, v1(0.25), Weightd::constant(1));
    const auto b = steklov(f, v1(0.25));
    CHECK((a - b).max_abs() <= 1e-12 * b.max_abs());
  }
  const auto c = plateau(g, 4, [](const Vec<double>&) { return 2.5; });
  for (auto w : {Weightd::power(0.5), Weightd::power(-0.5), Weightd::step({0.1}, {1.0, 4.0}), Weightd::power(3)}) {
    const auto s = weighted_steklov(c, v1(0.5), w);
    CHECK(s[384] == doctest::Approx(2.5).epsilon(1e-14));
  }
  // Power weights against an oracle of the defining integral.
  auto fn = [](double x) { return bump(x, 0.4, 1.3) * (1 + 0.5 * std::sin(2 * x)); };
  const auto fa = GridFunctiond::sample(g, [&](const Vec<double>& x) { return fn(x[0]); });
  for (double alpha : {0.5, -0.5}) {
    const auto s = weighted_steklov(fa, v1(0.5), Weightd::power(alpha));
    const double avg = oracle::integrate_singular_1d([&](double t) { return std::pow(std::abs(t), alpha); }, -0.5, 0.5, 16);
    double err = 0;
    for (Index i = 0; i < g.size(); i += 5) {
      const double x = g.coord(0, i);
      const double exact =
          oracle::integrate_singular_1d([&](double t) { return fn(x + 0.5 + t) * std::pow(std::abs(t), alpha); }, -0.5, 0.5, 32) /
          avg;
      err = std::max(err, std::abs(s[i] - exact));
    }
    CHECK(err <= 1e-6 * s.max_abs());
  }
}

TEST_CASE("weighted Steklov with a radial weight in two dimensions") {
  const auto g = Gridd::uniform(Boxd::cube(2, -4, 4), 64);
  const auto c = plateau(g, 3, [](const Vec<double>&) { return 1.5; });
  const auto s = weighted_steklov(c, Vec<double>::Zero(2), Weightd::power(0.5));
  CHECK(s[g.ravel((IVec(2) << 32, 32).finished())] == doctest::Approx(1.5).epsilon(1e-14));
  const auto ens = bumps(g, 3, 4, 1.5);
  for (const auto& f : ens) {
    const auto a = weighted_steklov(f, Vec<double>::Zero(2), Weightd::power(0.0));
    const auto b = steklov(f, Vec<double>::Zero(2));
    CHECK((a - b).max_abs() <= 1e-12 * b.max_abs());
  }
}

TEST_CASE("operator norm estimates") {
  const auto g = Gridd::uniform(Boxd::cube(1, -8, 8), 512);
  const auto ens = bumps(g, 20, 3, 3);
  OperatorSpec<double> id;
  const auto e = operator_norm_estimate(id, 2.0, Weightd::power(0.5), ens);
  CHECK(e.value == 1.0);
  CHECK(e.theoretical_cap == 1.0);
  CHECK(e.n_trials == 20);
  OperatorSpec<double> su{OperatorTag::S_u, v1(0.5), {}, 1, 1};
  CHECK(operator_norm_estimate(su, 2.0, Weightd::constant(1), ens).value <= 1 + 1e-9);
  const CubeFamilyd fam(Boxd::cube(1, -8, 8), 12);
  for (auto w : {Weightd::power(0.5), Weightd::power(-0.5)}) {
    for (double p : {1.0, 2.0}) {
      const auto ap = ap_constant(w, p, fam);
      if (ap.diverging) continue;
      const auto est = operator_norm_estimate(su, p, w, ens, std::optional<double>(ap.value));
      REQUIRE(est.theoretical_cap.has_value());
      CHECK(est.value <= *est.theoretical_cap);
    }
  }
  std::vector<GridFunctiond> with_zero = ens;
  with_zero.push_back(GridFunctiond::zeros(g));
  CHECK(operator_norm_estimate(su, 2.0, Weightd::constant(1), with_zero).skipped == 1);
}

TEST_CASE("R operator") {
  const auto g = Gridd::uniform(Boxd::cube(1, -8, 8), 512);
  const auto ens = bumps(g, 10, 5, 3);
  const auto w = Weightd::power(0.5);
  for (const auto& f : ens) {
    const auto r = r_operator(f, v1(0.5), w, 1.3);
    CHECK((r.samples() >= f.samples()).all());
  }
  const auto one = plateau(g, 6, [](const Vec<double>&) { return 1.0; });
  CHECK(r_operator(one, v1(0.5), w, 2.0)[256] == doctest::Approx(1.25).epsilon(1e-14));
  for (double p : {0.5, 1.0, 2.0}) {
    OperatorSpec<double> suw{OperatorTag::S_uw, v1(0.5), {}, 1, 1};
    const double n = operator_norm_estimate(suw, p, w, ens).value;
    OperatorSpec<double> r{OperatorTag::R, v1(0.5), {}, 1, n};
    const auto est = operator_norm_estimate(r, p, w, ens);
    CHECK(est.value <= *est.theoretical_cap);
  }
}

TEST_CASE("linearity, positivity and commutation") {
  const auto g = Gridd::uniform(Boxd::cube(1, -8, 8), 512);
  const auto ens = bumps(g, 6, 6, 3);
  const auto w = Weightd::power(0.5);
  std::vector<OperatorSpec<double>> ops = {
      {OperatorTag::S_u, v1(0.5), {}, 1, 1},    {OperatorTag::S_uw, v1(-0.25), {}, 1, 1},
      {OperatorTag::R, v1(0.5), {}, 1, 2},      {OperatorTag::S_dv, {}, v1(0.25), 0.5, 1},
      {OperatorTag::V, {}, {}, 0.5, 1},         {OperatorTag::Z, {}, {}, 0.5, 1},
      {OperatorTag::B, {}, {}, 0.25, 1},
  };
  for (const auto& op : ops) {
    const auto& f = ens[0];
    const auto& h = ens[1];
    const auto lhs = apply_operator(op, 2.0 * f - 3.0 * h, w);
    const auto rhs = 2.0 * apply_operator(op, f, w) - 3.0 * apply_operator(op, h, w);
    CHECK((lhs - rhs).max_abs() <= 1e-12 * rhs.max_abs());
    CHECK(apply_operator(op, f, w).is_nonnegative());
  }
  for (const auto& f : ens) {
    const auto a = weighted_steklov(box_average(f, BoxSpecd::shifted_average(0.5, v1(0.25))), v1(0.5), w);
    const auto b = box_average(weighted_steklov(f, v1(0.5), w), BoxSpecd::shifted_average(0.5, v1(0.25)));
    CHECK((a - b).max_abs() <= 1e-10 * f.max_abs());
  }
}
