#include "wsl/checks.hpp"
#include "wsl/config.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

using namespace wsl;

namespace {

CheckContext line_context(const std::string& weight = "const:1", int members = 4) {
  CheckContext ctx;
  ctx.grid = Gridd::uniform(Boxd::cube(1, -4, 4), 256);
  ctx.weight = parse_weight(weight);
  ctx.ensemble.seed = 3;
  ctx.ensemble.n = members;
  return ctx;
}

std::string dump_all(const std::vector<InequalityReport>& rs) {
  std::ostringstream os;
  write_reports(os, rs);
  return os.str();
}

}  // namespace

TEST_CASE("dispatcher id set") {
  const std::set<std::string> expected{"suf", "suwf", "ruwf", "commute", "frac", "sduf",
                                       "dela", "jackson", "marchaud", "sandwich", "trver", "holder"};
  const auto& ids = theorem_ids();
  CHECK(std::set<std::string>(ids.begin(), ids.end()) == expected);
  CHECK(ids.size() == expected.size());
  for (const auto& id : ids) CHECK_FALSE(check_summary(id).empty());
  CHECK_THROWS_WITH_AS(check("nope", nlohmann::json::object(), line_context()), "unknown theorem_id: nope", Error);
}

TEST_CASE("parameter normalization") {
  const auto norm = normalize_check_params("frac", {{"k", 1.5}});
  CHECK(norm["k"] == 1.5);
  CHECK(norm["p"] == 2.0);
  CHECK(norm.begin().key() == "p");
  CHECK(normalize_check_params("frac", nlohmann::json(norm)) == norm);
  CHECK_THROWS_WITH_AS(normalize_check_params("frac", {{"kk", 1}}), "check 'frac': unknown parameter 'kk'", Error);
  CHECK_THROWS_AS(normalize_check_params("frac", {{"k", "half"}}), Error);
  CHECK_THROWS_AS(normalize_check_params("marchaud", {{"m", 2.5}}), Error);
  CHECK_THROWS_AS(normalize_check_params("sduf", {{"operator", "T"}}), Error);
  CHECK_THROWS_AS(normalize_check_params("suf", {{"weight", "power:x"}}), Error);
  CHECK_THROWS_WITH_AS(normalize_check_params("holder", {{"p", -1.0}}), "invalid exponent", Error);
  CHECK(normalize_check_params("commute", {{"u", {0.25}}})["u"].size() == 1);
}

TEST_CASE("ensembles") {
  const auto g = Gridd::uniform(Boxd::cube(1, -4, 4), 256);
  for (auto kind : {EnsembleKind::bump_mixtures, EnsembleKind::random_trig_windowed, EnsembleKind::indicators}) {
    const auto a = gen_ensemble(11, 6, kind, g), b = gen_ensemble(11, 6, kind, g);
    REQUIRE(a.members.size() == 6);
    for (std::size_t i = 0; i < a.members.size(); ++i) {
      CHECK((a.members[i].samples() == b.members[i].samples()).all());
      CHECK(a.members[i].is_nonnegative());
      CHECK(a.members[i].max_abs() > 0);
      CHECK(a.members[i].support_margin() >= 1.75 - g.h()[0]);
    }
    // Member i does not depend on how many members are drawn.
    const auto c = gen_ensemble(11, 3, kind, g);
    CHECK((c.members[2].samples() == a.members[2].samples()).all());
  }
  const auto one = gen_ensemble(5, 1, EnsembleKind::indicators, g).members.front();
  CHECK((one.samples() * (1 - one.samples()) == 0).all());
  // Jumps sit on the lattice of spacing 1/8.
  for (Index i = 1; i < one.size(); ++i) {
    if (one.samples()[i] != one.samples()[i - 1]) {
      const double edge = g.coord(0, i) - g.h()[0] / 2;
      CHECK(std::abs(edge * 8 - std::round(edge * 8)) <= 1e-9);
    }
  }
  CHECK_THROWS_AS(gen_ensemble(1, 0, EnsembleKind::indicators, g), Error);
}

TEST_CASE("verdict rule and summary") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 2);
  for (int t = 0; t < 200; ++t) {
    const double lhs = u(rng), rhs = u(rng), c = u(rng), b = u(rng) * 0.1;
    const auto r = make_report("holder", "x", {}, lhs, rhs, c, b);
    CHECK((r.verdict == Verdict::pass) == (lhs <= c * rhs + b));
  }
  CHECK(make_report("holder", "x", {}, std::nan(""), 1, 1, 0).verdict == Verdict::fail);

  const auto empty = summarize({});
  CHECK(empty.pass + empty.fail + empty.inconclusive == 0);
  CHECK(empty.reports.empty());
  const auto one = summarize({make_report("suf", "a", {}, 1, 2, 1, 0)});
  CHECK(one.pass == 1);
  CHECK(one.fail == 0);
  const auto mixed = summarize({make_report("suf", "a", {}, 1, 2, 1, 0), make_report("frac", "b", {}, 3, 1, 1, 0),
                                inconclusive_report("jackson", "c", {}, "why")});
  CHECK(mixed.pass == 1);
  CHECK(mixed.fail == 1);
  CHECK(mixed.inconclusive == 1);
  CHECK(mixed.worst_ratio == 3.0);
  CHECK(mixed.worst_id == "frac");
  CHECK_FALSE(mixed.all_pass());
}

TEST_CASE("report JSON round trip") {
  auto r = make_report("ruwf", "claim", {{"p", 2}}, 1.0, 0.0, 4.0, 0.0);
  r.details["note"] = "x";
  std::ostringstream os;
  write_reports(os, {r, inconclusive_report("suf", "c", {{"p", 1}}, "A_p estimate diverges")});
  std::istringstream is(os.str());
  const auto back = read_reports(is);
  REQUIRE(back.size() == 2);
  CHECK(std::isinf(back[0].ratio));
  CHECK(back[0].verdict == r.verdict);
  CHECK(std::isnan(back[1].lhs));
  CHECK(back[1].verdict == Verdict::inconclusive);
  std::ostringstream again;
  write_reports(again, back);
  CHECK(again.str() == os.str());
}

TEST_CASE("empirical constant encoding") {
  CHECK(empirical_constant_report("jackson", "c", {}, 1.0, 1.1).verdict == Verdict::pass);
  CHECK(empirical_constant_report("jackson", "c", {}, 1.0, 1.3).verdict == Verdict::fail);
  CHECK(empirical_constant_report("jackson", "c", {}, 0.0, 0.0).verdict == Verdict::fail);
  CHECK(empirical_constant_report("jackson", "c", {}, 1.0, std::numeric_limits<double>::infinity()).verdict ==
        Verdict::fail);
  const auto g = Gridd::uniform(Boxd::cube(2, 0, 1), 8);
  CHECK(refined(g).n()[1] == 16);
}

TEST_CASE("Steklov bound with the constant weight") {
  const auto reps = check("suf", {{"p", 2.0}}, line_context("const:1", 8));
  REQUIRE(reps.size() == 1);
  const auto& r = reps[0];
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.ratio <= 1 + 1e-9);
  CHECK(r.constant_used == doctest::Approx(std::pow(3.0, 2.5)).epsilon(1e-12));
  CHECK(r.params["weight"] == "const:1");
  CHECK(r.params["d"] == 1);
}

TEST_CASE("diverging weight is inconclusive") {
  const auto r = check("suf", {{"p", 2.0}, {"weight", "power:2"}}, line_context()).front();
  CHECK(r.verdict == Verdict::inconclusive);
  CHECK(r.details["reason"] == "A_p estimate diverges");
  CHECK_THROWS_AS(check("suf", {{"p", 0.5}}, line_context()), Error);
}

TEST_CASE("R operator bound with power(1/2)") {
  const auto r = check("ruwf", {{"p", 2.0}}, line_context("power:0.5")).front();
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.ratio <= 4);
  CHECK(r.ratio >= 1);
  CHECK(r.details["normalizer_source"] == "empirical");
  const auto given = check("ruwf", {{"p", 2.0}, {"normalizer", 1.0}}, line_context("power:0.5")).front();
  CHECK(given.details["normalizer_source"] == "config");
}

TEST_CASE("reverse Marchaud constant is positive and stable") {
  const auto r = check("marchaud", {{"r", 1}, {"m", 3}, {"p", 2.0}}, line_context()).front();
  CHECK(r.verdict == Verdict::pass);
  CHECK(number_from_json(r.details["c_hat"]) > 0);
  CHECK(r.params["s"] == 2.0);
}

TEST_CASE("every check runs and is deterministic") {
  std::vector<CheckRequest> reqs;
  for (const auto& id : theorem_ids()) reqs.push_back({id, nlohmann::json::object()});
  const auto ctx = line_context("power:0.5", 3);
  const auto serial = run_checks(reqs, ctx, 1);
  const auto parallel = run_checks(reqs, ctx, 3);
  CHECK(dump_all(serial) == dump_all(parallel));
  std::set<std::string> seen;
  for (const auto& r : serial) {
    seen.insert(r.theorem_id);
    INFO(r.theorem_id, " ", to_json(r).dump());
    CHECK(r.verdict == Verdict::pass);
  }
  CHECK(seen.size() == theorem_ids().size());
  CHECK(std::is_sorted(serial.begin(), serial.end(),
                       [](const auto& a, const auto& b) { return a.theorem_id < b.theorem_id; }));
}

TEST_CASE("a failing computation becomes an inconclusive report") {
  const auto reps = run_checks({{"dela", {{"sigmas", {1000.0}}}}}, line_context(), 1);
  REQUIRE(reps.size() == 1);
  CHECK(reps[0].verdict == Verdict::inconclusive);
  CHECK(reps[0].details["reason"] == "band not resolvable");
}
