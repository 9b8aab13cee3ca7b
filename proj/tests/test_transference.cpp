#include "wsl/muckenhoupt.hpp"
#include "wsl/transference.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace wsl;

namespace {

double bump(double x, double c, double w) {
  const double r = (x - c) / w;
  return std::abs(r) < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0;
}

Gridd line_grid(Index n = 512) { return Gridd::uniform(Boxd::cube(1, -4, 4), n); }

std::vector<GridFunctiond> corpus(const Gridd& g, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> c(-1.2, 1.2), w(0.3, 0.8), a(0.1, 1.0);
  std::vector<GridFunctiond> out;
  for (int i = 0; i < count; ++i) {
    const int d = g.dim();
    std::vector<double> cs(3 * d), ws(3), as(3);
    for (auto& x : cs) x = c(rng);
    for (int k = 0; k < 3; ++k) ws[k] = w(rng), as[k] = a(rng);
    out.push_back(GridFunctiond::sample(g, [&](const Vec<double>& x) {
      double v = 0;
      for (int k = 0; k < 3; ++k) {
        double prod = 1;
        for (int j = 0; j < d; ++j) prod *= bump(x[j], cs[3 * j + k], ws[k]);
        v += as[k] * prod;
      }
      return v;
    }));
  }
  return out;
}

GridFunctiond unit_indicator(const Gridd& g) {
  return GridFunctiond::sample(g, [](const Vec<double>& x) { return x[0] > 0 && x[0] < 1 ? 1.0 : 0.0; });
}

}  // namespace

TEST_CASE("extremal witness") {
  const auto g = line_grid();
  const auto one = Weightd::constant(1);
  const auto chi = unit_indicator(g);
  const auto w2 = extremal_witness(chi, 2.0, one);
  CHECK((w2.G.samples() - chi.samples()).abs().maxCoeff() <= 1e-15);
  CHECK(Measured(g, one).apply(chi.samples() * w2.G.samples()) == doctest::Approx(1.0).epsilon(1e-14));

  const auto f = corpus(g, 1, 2).front();
  const auto pw = Weightd::power(0.5);
  const auto w1 = extremal_witness(f, 1.0, pw);
  CHECK(w1.G.samples().isOnes());
  CHECK(Measured(g, pw).apply(f.samples() * w1.G.samples()) == doctest::Approx(weighted_lp_norm(f, 1.0, pw)));

  for (double p : {1.5, 2.0, 3.0}) {
    for (const auto& h : corpus(g, 5, 7)) {
      const Measured mu(g, pw);
      const auto wt = extremal_witness(h, p, pw);
      CHECK(wt.p_prime == doctest::Approx(p / (p - 1)));
      CHECK(std::abs(mu.norm(wt.G, wt.p_prime) - 1) <= 1e-10);
      CHECK(mu.apply(h.samples() * wt.G.samples().abs()) >= mu.norm(h, p) - 1e-8);
    }
  }
  CHECK_THROWS_AS(extremal_witness(GridFunctiond::zeros(g), 2.0, one), Error);
  CHECK_THROWS_AS(extremal_witness(f, 0.5, one), Error);
}

TEST_CASE("intermediate function") {
  const auto g = line_grid();
  const auto ug = default_u_grid(g);
  CHECK(ug.size() == 65);
  CHECK(ug.point(0)[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ug.point(64)[0] == doctest::Approx(1.0).epsilon(1e-12));
  const auto pw = Weightd::power(0.5);
  const Measured mu(g, pw);
  const auto fs = corpus(g, 6, 3);

  const auto wt = extremal_witness(fs[0], 2.0, pw);
  const auto F0 = intermediate_function(GridFunctiond::zeros(g), wt, 2.0, 1.0, pw, ug, 1.0);
  CHECK(F0.values.isZero());

  for (const auto& f : fs) {
    for (double p : {1.0, 2.0}) {
      const auto G = extremal_witness(f, p, pw);
      const auto F = intermediate_function(f, G, p, 1.0, pw, ug, 1.5);
      CHECK((F.values >= 0).all());
      CHECK(F.values[0] >= mu.apply(f.samples() * G.G.samples().abs()));
      CHECK(F.values.maxCoeff() >= mu.norm(f, p) - 1e-8);
    }
    // p < 1 with q = 1/4: F(0) >= int f^q |G| w = ||f||^q.
    const auto G = power_witness(f, 0.5, 0.25, pw);
    const auto F = intermediate_function(f, G, 0.5, 0.25, pw, ug, 1.5);
    CHECK(F.values[0] >= std::pow(mu.norm(f, 0.5), 0.25) * (1 - 1e-12));
  }
  CHECK_THROWS_AS(intermediate_function(fs[0], wt, 2.0, 0.5, pw, ug, 1.0), Error);
  CHECK_THROWS_AS(intermediate_function(GridFunctiond(-1.0 * fs[0]), wt, 2.0, 1.0, pw, ug, 1.0), Error);
  // A function reaching the box edge leaves no room for the u-shifts.
  const auto wide = GridFunctiond::sample(g, [](const Vec<double>& x) { return bump(x[0], 0, 3.5); });
  CHECK_THROWS_WITH_AS(intermediate_function(wide, extremal_witness(wide, 2.0, pw), 2.0, 1.0, pw, ug, 1.0),
                       "reach exceeds margin", Error);
}

TEST_CASE("sup and modulus") {
  const auto g = line_grid();
  IntermediateFunctiond F;
  F.u_grid = default_u_grid(g);
  F.values = Samples<double>::Constant(F.u_grid.size(), 2.5);
  const auto [s, m] = sup_and_modulus(F, 0.1);
  CHECK(s == 2.5);
  CHECK(m == 0);

  const auto f = corpus(g, 1, 5).front();
  const auto pw = Weightd::power(0.5);
  const auto G = extremal_witness(f, 2.0, pw);
  const auto Fu = intermediate_function(f, G, 2.0, 1.0, pw, F.u_grid, 1.0);
  double prev = 0;
  for (double delta : {0.0, 1.0 / 64, 0.05, 0.1, 0.5, 1.0}) {
    const double mod = sup_and_modulus(Fu, delta).second;
    CHECK(mod >= prev);
    prev = mod;
  }
  // One u-step on refined u-grids: the modulus shrinks with the step, and the
  // slope stays bounded.
  double prev_mod = std::numeric_limits<double>::infinity();
  double slope = 0;
  for (Index ppu : {8, 16, 32, 64}) {
    const auto ugrid = default_u_grid(g, ppu);
    const auto Fr = intermediate_function(f, G, 2.0, 1.0, pw, ugrid, 1.0);
    const double step = ugrid.h()[0];
    const double mod = sup_and_modulus(Fr, step).second;
    CHECK(mod < prev_mod);
    prev_mod = mod;
    slope = std::max(slope, mod / step);
  }
  CHECK(std::isfinite(slope));
  CHECK(prev_mod <= slope / 64 * (1 + 1e-12));
}

TEST_CASE("sandwich") {
  const auto g = line_grid();
  const auto one = Weightd::constant(1);
  SandwichOptions opt;
  for (const auto& r : sandwich_reports(unit_indicator(g), 2.0, one, opt)) {
    CHECK(r.verdict == Verdict::pass);
    CHECK(r.lhs <= r.constant_used * r.rhs);
  }

  const auto pw = Weightd::power(0.5);
  const auto fs = corpus(g, 8, 9);
  for (double p : {1.0, 2.0}) {
    opt.normalizer = r_normalizer(fs, default_u_grid(g), p, pw);
    for (const auto& f : fs) {
      for (const auto& r : sandwich_reports(f, p, pw, opt)) CHECK(r.verdict == Verdict::pass);
      CHECK(sandwich_check(f, p, pw, opt).verdict == Verdict::pass);
    }
  }

  // p = 1/2 through the exponent selection.
  const CubeFamilyd cubes(Boxd::cube(1, -8, 8), 10);
  const auto sel = select_q(pw, 0.5, cubes);
  opt.q = sel.q;
  opt.normalizer = r_normalizer(fs, default_u_grid(g), 0.5, pw);
  for (const auto& f : fs) {
    const auto reports = sandwich_reports(f, 0.5, pw, opt);
    for (const auto& r : reports) CHECK(r.verdict == Verdict::pass);
    CHECK(reports[1].constant_used == doctest::Approx(16.0));
  }
}

TEST_CASE("lsm norm") {
  CHECK(lsm_norm<double>({3.0}, 2.5) == doctest::Approx(3.0));
  CHECK(lsm_norm<double>({0.0, 0.0, 0.0}, 3) == 0);
  CHECK(lsm_norm<double>({1.0, 1.0}, 2) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(lsm_norm<double>({1.0}, 0), Error);
  CHECK_THROWS_AS(lsm_norm<double>({}, 2), Error);
}

TEST_CASE("vector-valued chain") {
  const auto g = line_grid();
  const auto pw = Weightd::power(0.5);
  const auto fs = corpus(g, 4, 15);
  TrverOptions opt;
  opt.a = 2;
  opt.s = 3;
  opt.normalizer = r_normalizer(fs, default_u_grid(g), 2.0, pw);
  const Measured mu(g, pw);
  for (const auto& f : fs) {
    // m = 0 with g_0 = f reduces to the sandwich.
    const auto single = trver_reports(f, {f}, 2.0, pw, opt);
    for (const auto& r : single) CHECK(r.verdict == Verdict::pass);
    CHECK(single[1].rhs == doctest::Approx(mu.norm(f, 2.0)));

    std::vector<GridFunctiond> gs;
    for (int j = 0; j <= 3; ++j) gs.push_back(box_average(f, BoxSpecd::v_box(1, std::ldexp(1.0 / 16, j))));
    const auto chain = trver_reports(f, gs, 2.0, pw, opt);
    for (const auto& r : chain) CHECK(r.verdict == Verdict::pass);
    CHECK(chain[0].rhs >= mu.norm(f, 2.0) * (1 - 1e-10));
    double direct = 0;
    for (const auto& gj : gs) direct += std::pow(mu.norm(gj, 2.0), 3);
    CHECK(chain[1].rhs == doctest::Approx(std::cbrt(direct)).epsilon(1e-13));
  }
  TrverOptions bad = opt;
  bad.a = 1;
  CHECK_THROWS_AS(trver_reports(fs[0], {fs[0]}, 2.0, pw, bad), Error);
  bad = opt;
  bad.s = 2;
  CHECK_THROWS_AS(trver_reports(fs[0], {fs[0]}, 2.0, pw, bad), Error);
}

TEST_CASE("Hoelder inequality over random pairs") {
  const auto g = line_grid();
  const auto pw = Weightd::power(0.5);
  const Measured mu(g, pw);
  const auto fs = corpus(g, 10, 19);
  for (double p : {1.5, 2.0, 3.0}) {
    const double pp = p / (p - 1);
    for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
      const auto& f = fs[i];
      const auto& h = fs[i + 1];
      CHECK(mu.apply((f.samples() * h.samples()).abs()) <= mu.norm(f, p) * mu.norm(h, pp) * (1 + 1e-10));
    }
  }
}

TEST_CASE("intermediate function export") {
  const auto g = line_grid();
  const auto f = corpus(g, 1, 1).front();
  const auto one = Weightd::constant(1);
  const auto F = intermediate_function(f, extremal_witness(f, 2.0, one), 2.0, 1.0, one, default_u_grid(g, 4), 1.0);
  std::ostringstream out;
  write_intermediate_csv(out, F);
  CHECK(out.str().rfind("u,F\n0,", 0) == 0);
}
