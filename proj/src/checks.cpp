#include "wsl/checks.hpp"

#include "wsl/approx.hpp"
#include "wsl/averaging.hpp"
#include "wsl/config.hpp"
#include "wsl/frac_diff.hpp"
#include "wsl/muckenhoupt.hpp"
#include "wsl/norms.hpp"
#include "wsl/transference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <limits>
#include <map>
#include <utility>

namespace wsl {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

struct CheckDef {
  std::string id;
  std::string summary;
  ojson defaults;
};

const std::vector<CheckDef>& catalog() {
  static const std::vector<CheckDef> defs = {
      {"suf", "||S_u f||_{p,w} <= 3^(2d+1/p) [w]_p^(1/p) ||f||_{p,w}",
       {{"p", 2.0}, {"u", 0.25}, {"depth", nullptr}}},
      {"suwf", "||S_{u,w} f||_{p,w} <= c ||f||_{p,w} (empirical c)", {{"p", 2.0}, {"u", 0.25}}},
      {"ruwf", "||R_{u,w} f||_{p,w} <= 4^(1/min(1,p)) ||f||_{p,w}",
       {{"p", 2.0}, {"u", 0.25}, {"normalizer", nullptr}}},
      {"commute", "S_{u,w} S_{delta,v} f = S_{delta,v} S_{u,w} f",
       {{"u", 0.25}, {"delta", 0.25}, {"v", 0.125}, {"tol", 1e-10}}},
      {"frac", "||(E-V_delta)^k f||_{p,w} <= (sum_s |C_s^k|) ||f||_{p,w}",
       {{"p", 2.0}, {"k", 0.5}, {"delta", 0.25}, {"tol", 1e-8}}},
      {"sduf", "||Gamma f||_{p,w} <= c ||f||_{p,w} for the averaging operators (empirical c)",
       {{"p", 2.0}, {"operator", "S_dv"}, {"delta", 0.25}, {"v", 0.125}, {"u", 0.25}}},
      {"dela", "J(g,sigma) = g on type sigma, J(f,sigma) of type 2 sigma, ||J(f,sigma)||_p <= c ||f||_p",
       {{"p", 2.0}, {"sigmas", json::array({4.0, 8.0, 16.0})}}},
      {"jackson", "||f - J(f,sigma/2)||_{p,w} <= c ||(E-V_{1/sigma})^r f||_{p,w} (empirical c)",
       {{"p", 2.0}, {"r", 1}, {"sigma", 8.0}}},
      {"marchaud",
       "||(E-V_delta)^r f||^s >= c sum_j 2^(-2jrs) ||(E-V_{2^j delta})^(r+1) f||^s (empirical c)",
       {{"p", 2.0}, {"r", 1}, {"m", 3}, {"delta", 0.0625}, {"a", 2.0}}},
      {"sandwich", "||f||_{p,w} <= sup_u F_f(u)^(1/q) <= 4^(1/min(1,p)) ||f||_{p,w}",
       {{"p", 2.0}, {"q", nullptr}, {"depth", nullptr}, {"u_points", nullptr}}},
      {"trver", "||f|| <= ||F_f||_{L_a} and l_s(||F_{g_j}||_{L_a}) <= 4^(1/min(1,p)) l_s(||g_j||)",
       {{"p", 2.0},
        {"q", nullptr},
        {"a", 2.0},
        {"s", 3.0},
        {"m", 3},
        {"delta", 0.0625},
        {"depth", nullptr},
        {"u_points", nullptr}}},
      {"holder", "int |f g| w <= ||f||_{p,w} ||g||_{p',w}", {{"p", 2.0}}},
  };
  return defs;
}

const CheckDef& find_def(const std::string& id) {
  for (const auto& d : catalog())
    if (d.id == id) return d;
  throw Error("unknown theorem_id: " + id);
}

bool is_vector_key(const std::string& key) { return key == "u" || key == "v"; }

void check_value(const std::string& id, const std::string& key, const json& def, const json& v) {
  auto bad = [&](const char* what) { throw Error("check '" + id + "': parameter '" + key + "' must be " + what); };
  if (key == "weight") {
    if (!v.is_string()) bad("a weight string");
    parse_weight(v.get<std::string>());
    return;
  }
  if (key == "operator") {
    if (!v.is_string()) bad("an operator tag");
    parse_operator(v.get<std::string>());
    return;
  }
  if (key == "sigmas") {
    if (!v.is_array() || v.empty()) bad("a nonempty array of numbers");
    for (const auto& x : v)
      if (!x.is_number() || !(x.get<double>() > 0)) bad("a nonempty array of positive numbers");
    return;
  }
  if (is_vector_key(key)) {
    if (v.is_number()) return;
    if (!v.is_array() || v.empty() || v.size() > 3) bad("a number or an array of 1 to 3 numbers");
    for (const auto& x : v)
      if (!x.is_number()) bad("a number or an array of numbers");
    return;
  }
  if (v.is_null() && def.is_null()) return;
  if (def.is_number_integer() || key == "depth" || key == "u_points") {
    if (!v.is_number_integer()) bad("an integer");
    return;
  }
  if (!v.is_number()) bad("a number");
}

Vec<double> as_vec(const json& v, int d, const std::string& key) {
  if (v.is_number()) return Vec<double>::Constant(d, v.get<double>());
  if (static_cast<int>(v.size()) != d) throw Error("parameter '" + key + "' needs one entry per dimension");
  Vec<double> out(d);
  for (int a = 0; a < d; ++a) out[a] = v[a].get<double>();
  return out;
}

ojson base_params(const CheckContext& ctx, const Weightd& w, const ojson& params) {
  ojson out;
  out["d"] = ctx.grid.dim();
  out["n"] = ctx.grid.n()[0];
  out["seed"] = ctx.ensemble.seed;
  out["members"] = ctx.ensemble.n;
  out["kind"] = ensemble_kind_name(ctx.ensemble.kind);
  out["weight"] = w.describe();
  for (auto it = params.begin(); it != params.end(); ++it)
    if (it.key() != "weight") out[it.key()] = it.value();
  return out;
}

Box<double> cube_box(const Gridd& g) {
  const double side = g.box().width().maxCoeff();
  const Vec<double> c = g.box().center();
  return Box<double>((c.array() - side / 2).matrix(), (c.array() + side / 2).matrix());
}

int default_depth(int d) { return d == 1 ? 10 : (d == 2 ? 6 : 4); }

CubeFamilyd cubes_for(const CheckContext& ctx, const ojson& params) {
  const int depth = params.contains("depth") && !params["depth"].is_null() ? params["depth"].get<int>()
                                                                            : default_depth(ctx.grid.dim());
  return CubeFamilyd(cube_box(ctx.grid), depth);
}

// Membership in A_infty, confirmed by a non-diverging A_r estimate for some r.
bool ainfty_confirmed(const Weightd& w, const CubeFamilyd& cubes) {
  if (w.is_constant()) return true;
  for (double r : {2.0, 4.0, 16.0, 64.0})
    if (!ap_constant(w, r, cubes).diverging) return true;
  return false;
}

struct Worst {
  double ratio = -std::numeric_limits<double>::infinity();
  double lhs = 0, rhs = 0;
  int index = -1;
  void add(double l, double r, int i) {
    const double q = r != 0 ? l / r : (l == 0 ? 0 : std::numeric_limits<double>::infinity());
    if (index < 0 || q > ratio || std::isnan(q)) {
      ratio = q;
      lhs = l;
      rhs = r;
      index = i;
    }
  }
};

InequalityReport worst_report(const std::string& id, const std::string& claim, ojson params, const Worst& w,
                              double constant, double budget) {
  auto r = make_report(id, claim, std::move(params), w.lhs, w.rhs, constant, budget);
  r.details["argmax_member"] = w.index;
  return r;
}

Index u_points(const ojson& params, int d) {
  if (params.contains("u_points") && !params["u_points"].is_null()) return params["u_points"].get<Index>();
  return d == 1 ? 64 : 8;
}

// Largest ||S_{u,w} f|| / ||f|| over the members at one shift.
double steklov_normalizer(const std::vector<GridFunctiond>& members, const Vec<double>& u, double p,
                          const Weightd& w, const Measured& mu) {
  double best = 0;
  for (const auto& f : members) {
    const double nf = mu.norm(f, p);
    if (nf > 0) best = std::max(best, mu.norm(weighted_steklov(f, u, w), p) / nf);
  }
  if (!(best > 0)) throw Error("operator norm: empty ensemble");
  return best;
}

std::vector<GridFunctiond> members_on(const CheckContext& ctx, const Gridd& g) {
  return gen_ensemble(ctx.ensemble, g).members;
}

// ---------------------------------------------------------------------------

std::vector<InequalityReport> run_suf(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  const int d = ctx.grid.dim();
  if (!(p >= 1)) throw Error("check 'suf': p must be >= 1");
  const std::string claim = find_def("suf").summary;
  auto params = base_params(ctx, w, prm);
  const auto cubes = cubes_for(ctx, prm);
  const auto ap = ap_constant(w, p, cubes);
  if (ap.diverging) {
    auto r = inconclusive_report("suf", claim, params, "A_p estimate diverges");
    r.details["ap_profile_last"] = number_json(ap.value);
    return {r};
  }
  const double constant = std::pow(3.0, 2 * d + 1 / p) * std::pow(ap.value, 1 / p);
  const Vec<double> u = as_vec(prm["u"], d, "u");
  const Measured mu(ctx.grid, w, ctx.rule);
  Worst worst;
  const auto members = members_on(ctx, ctx.grid);
  for (std::size_t i = 0; i < members.size(); ++i)
    worst.add(mu.norm(steklov(members[i], u), p), mu.norm(members[i], p), static_cast<int>(i));
  auto r = worst_report("suf", claim, params, worst, constant, 1e-12 * constant * worst.rhs);
  r.details["ap_value"] = number_json(ap.value);
  r.details["ap_depth"] = cubes.max_depth;
  return {r};
}

std::vector<InequalityReport> run_suwf(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  const int d = ctx.grid.dim();
  const std::string claim = find_def("suwf").summary;
  auto params = base_params(ctx, w, prm);
  if (!ainfty_confirmed(w, cubes_for(ctx, prm)))
    return {inconclusive_report("suwf", claim, params, "A_infty membership not numerically confirmed")};
  const Vec<double> u = as_vec(prm["u"], d, "u");
  auto c_hat = [&](const Gridd& g) {
    const Measured mu(g, w, ctx.rule);
    return steklov_normalizer(members_on(ctx, g), u, p, w, mu);
  };
  return {empirical_constant_report("suwf", claim, params, c_hat(ctx.grid), c_hat(refined(ctx.grid)))};
}

std::vector<InequalityReport> run_ruwf(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  const int d = ctx.grid.dim();
  const std::string claim = find_def("ruwf").summary;
  auto params = base_params(ctx, w, prm);
  if (!ainfty_confirmed(w, cubes_for(ctx, prm)))
    return {inconclusive_report("ruwf", claim, params, "A_infty membership not numerically confirmed")};
  const Vec<double> u = as_vec(prm["u"], d, "u");
  const Measured mu(ctx.grid, w, ctx.rule);
  const auto members = members_on(ctx, ctx.grid);
  const bool given = !prm["normalizer"].is_null();
  const double normalizer = given ? prm["normalizer"].get<double>() : steklov_normalizer(members, u, p, w, mu);
  const double cap = std::pow(4.0, 1 / std::min(1.0, p));
  Worst worst;
  for (std::size_t i = 0; i < members.size(); ++i)
    worst.add(mu.norm(r_operator(members[i], u, w, normalizer), p), mu.norm(members[i], p), static_cast<int>(i));
  auto r = worst_report("ruwf", claim, params, worst, cap, 1e-12 * cap * worst.rhs);
  r.details["normalizer"] = normalizer;
  r.details["normalizer_source"] = given ? "config" : "empirical";
  return {r};
}

std::vector<InequalityReport> run_commute(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const int d = ctx.grid.dim();
  const Vec<double> u = as_vec(prm["u"], d, "u"), v = as_vec(prm["v"], d, "v");
  const double delta = prm["delta"], tol = prm["tol"];
  const auto box = BoxSpecd::shifted_average(delta, v);
  Worst worst;
  const auto members = members_on(ctx, ctx.grid);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& f = members[i];
    const auto a = weighted_steklov(box_average(f, box), u, w);
    const auto b = box_average(weighted_steklov(f, u, w), box);
    worst.add((a.samples() - b.samples()).abs().maxCoeff(), f.max_abs(), static_cast<int>(i));
  }
  return {worst_report("commute", "||S_{u,w} S_{delta,v} f - S_{delta,v} S_{u,w} f||_inf <= tol ||f||_inf",
                       base_params(ctx, w, prm), worst, tol, 0.0)};
}

std::vector<InequalityReport> run_frac(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"], k = prm["k"], delta = prm["delta"], tol = prm["tol"];
  const auto members = members_on(ctx, ctx.grid);
  InequalityReport worst;
  int arg = -1;
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto r = frac_bound_check(members[i], k, delta, p, w, tol, ctx.rule);
    if (arg < 0 || r.ratio > worst.ratio || r.verdict == Verdict::fail) {
      if (arg >= 0 && worst.verdict == Verdict::fail && r.verdict != Verdict::fail) continue;
      worst = std::move(r);
      arg = static_cast<int>(i);
    }
  }
  auto details = worst.details;
  worst.params = base_params(ctx, w, prm);
  worst.details = details;
  worst.details["argmax_member"] = arg;
  return {worst};
}

OperatorSpec<double> operator_from(const ojson& prm, int d) {
  OperatorSpec<double> op;
  op.tag = parse_operator(prm["operator"].get<std::string>());
  op.u = as_vec(prm["u"], d, "u");
  op.v = as_vec(prm["v"], d, "v");
  op.delta = prm["delta"];
  return op;
}

std::vector<InequalityReport> run_sduf(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  const int d = ctx.grid.dim();
  const std::string claim = find_def("sduf").summary;
  auto params = base_params(ctx, w, prm);
  if (!ainfty_confirmed(w, cubes_for(ctx, prm)))
    return {inconclusive_report("sduf", claim, params, "A_infty membership not numerically confirmed")};
  auto op = operator_from(prm, d);
  auto c_hat = [&](const Gridd& g) {
    const Measured mu(g, w, ctx.rule);
    const auto members = members_on(ctx, g);
    if (op.tag == OperatorTag::R) op.normalizer = steklov_normalizer(members, op.u, p, w, mu);
    double best = 0;
    for (const auto& f : members) {
      const double nf = mu.norm(f, p);
      if (nf > 0) best = std::max(best, mu.norm(apply_operator(op, f, w), p) / nf);
    }
    return best;
  };
  return {empirical_constant_report("sduf", claim, params, c_hat(ctx.grid), c_hat(refined(ctx.grid)))};
}

std::vector<InequalityReport> run_dela(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  if (!(p >= 1)) throw Error("check 'dela': p must be >= 1");
  std::vector<double> sigmas;
  for (const auto& s : prm["sigmas"]) sigmas.push_back(s.get<double>());
  auto params = base_params(ctx, w, prm);
  const auto one = Weightd::constant(1);
  const Measured mu(ctx.grid, one, ctx.rule);
  const auto members = members_on(ctx, ctx.grid);
  Worst repro, support;
  std::vector<double> caps;
  for (double sigma : sigmas) {
    double cap = 0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& f = members[i];
      const auto g = bandlimit_project(f, sigma);
      const auto jg = vp_apply(g, sigma, VPMethod::direct_quadrature);
      repro.add(mu.norm(jg - g, 2.0), mu.norm(g, 2.0), static_cast<int>(i));
      const auto jf = vp_apply(f, sigma, VPMethod::direct_quadrature);
      const auto spec = spectrum(jf);
      const double total = spec.energy();
      support.add(energy_outside_cube(spec, 2 * sigma * (1 + 1e-9)) * total, total, static_cast<int>(i));
      const double nf = mu.norm(f, p);
      if (nf > 0) cap = std::max(cap, mu.norm(jf, p) / nf);
    }
    caps.push_back(cap);
  }
  std::vector<InequalityReport> out;
  auto r1 = worst_report("dela", "||J(g,sigma) - g||_2 <= 1e-3 ||g||_2 for g of type sigma", params, repro, 1e-3, 0);
  r1.details["part"] = "reproduction";
  out.push_back(std::move(r1));
  auto r2 = worst_report("dela", "spectral energy of J(f,sigma) beyond 2 sigma <= 1e-6 of the total", params, support,
                         1e-6, 0);
  r2.details["part"] = "spectral_support";
  out.push_back(std::move(r2));
  const double lo = *std::min_element(caps.begin(), caps.end());
  const double hi = *std::max_element(caps.begin(), caps.end());
  auto r3 = make_report("dela", "||J(f,sigma)||_p / ||f||_p caps drift <= 20% across sigma", params, hi - lo, lo, 0.2,
                        0);
  if (!(lo > 0)) r3.verdict = Verdict::fail;
  r3.details["part"] = "norm_bound";
  r3.details["caps"] = caps;
  out.push_back(std::move(r3));
  return out;
}

std::vector<InequalityReport> run_jackson(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"], sigma = prm["sigma"];
  const int r = prm["r"];
  if (r < 1) throw Error("check 'jackson': r must be >= 1");
  const std::string claim = find_def("jackson").summary;
  auto params = base_params(ctx, w, prm);
  if (!ainfty_confirmed(w, cubes_for(ctx, prm)))
    return {inconclusive_report("jackson", claim, params, "A_infty membership not numerically confirmed")};
  auto c_hat = [&](const Gridd& g) {
    const Measured mu(g, w, ctx.rule);
    double best = 0;
    for (const auto& f : members_on(ctx, g)) {
      const double upper = mu.norm(f - vp_apply(f, sigma / 2), p);
      const double diff = mu.norm(frac_difference(f, double(r), 1 / sigma, 1e-12), p);
      if (diff > 0) best = std::max(best, upper / diff);
    }
    return best;
  };
  return {empirical_constant_report("jackson", claim, params, c_hat(ctx.grid), c_hat(refined(ctx.grid)))};
}

std::vector<InequalityReport> run_marchaud(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"], delta = prm["delta"], a = prm["a"];
  const int r = prm["r"], m = prm["m"];
  if (r < 1 || m < 0) throw Error("check 'marchaud': need r >= 1 and m >= 0");
  if (!(a > 1)) throw Error("check 'marchaud': a must be > 1");
  const double s = std::max(2.0, a);
  const std::string claim = find_def("marchaud").summary;
  auto params = base_params(ctx, w, prm);
  params["s"] = s;
  if (!ainfty_confirmed(w, cubes_for(ctx, prm)))
    return {inconclusive_report("marchaud", claim, params, "A_infty membership not numerically confirmed")};
  auto c_hat = [&](const Gridd& g) {
    const Measured mu(g, w, ctx.rule);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : members_on(ctx, g)) {
      const double lhs = std::pow(mu.norm(frac_difference(f, double(r), delta, 1e-12), p), s);
      double rhs = 0;
      for (int j = 0; j <= m; ++j) {
        const double dj = std::ldexp(delta, j);
        rhs += std::pow(2.0, -2.0 * j * r * s) * std::pow(mu.norm(frac_difference(f, double(r + 1), dj, 1e-12), p), s);
      }
      if (rhs > 0) best = std::min(best, lhs / rhs);
    }
    return best;
  };
  return {empirical_constant_report("marchaud", claim, params, c_hat(ctx.grid), c_hat(refined(ctx.grid)))};
}

// q for the p < 1 form, or 1.
std::pair<double, std::string> exponent_q(const CheckContext& ctx, const Weightd& w, double p, const ojson& prm) {
  if (p >= 1) {
    if (!prm["q"].is_null() && prm["q"].get<double>() != 1) throw Error("parameter 'q' must be 1 for p >= 1");
    return {1.0, "fixed"};
  }
  if (!prm["q"].is_null()) return {prm["q"].get<double>(), "config"};
  return {select_q(w, p, cubes_for(ctx, prm)).q, "select_q"};
}

std::vector<InequalityReport> run_sandwich(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  const std::string claim = find_def("sandwich").summary;
  auto params = base_params(ctx, w, prm);
  double q = 1;
  std::string q_source;
  try {
    std::tie(q, q_source) = exponent_q(ctx, w, p, prm);
  } catch (const Error& e) {
    return {inconclusive_report("sandwich", claim, params, e.what())};
  }
  const auto members = members_on(ctx, ctx.grid);
  SandwichOptions opt;
  opt.q = q;
  opt.u_grid = default_u_grid(ctx.grid, u_points(prm, ctx.grid.dim()));
  opt.rule = ctx.rule;
  opt.normalizer = r_normalizer(members, opt.u_grid, p, w, ctx.rule);
  std::vector<InequalityReport> worst(2);
  std::vector<int> arg(2, -1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    auto reps = sandwich_reports(members[i], p, w, opt);
    for (int side = 0; side < 2; ++side) {
      if (arg[side] < 0 || reps[side].ratio > worst[side].ratio) {
        worst[side] = std::move(reps[side]);
        arg[side] = static_cast<int>(i);
      }
    }
  }
  for (int side = 0; side < 2; ++side) {
    auto details = worst[side].details;
    worst[side].params = params;
    worst[side].params["q"] = q;
    worst[side].details = details;
    worst[side].details["argmax_member"] = arg[side];
    worst[side].details["q_source"] = q_source;
    worst[side].details["normalizer"] = opt.normalizer;
  }
  return worst;
}

std::vector<InequalityReport> run_trver(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  const int m = prm["m"];
  const double delta = prm["delta"];
  const std::string claim = find_def("trver").summary;
  auto params = base_params(ctx, w, prm);
  double q = 1;
  std::string q_source;
  try {
    std::tie(q, q_source) = exponent_q(ctx, w, p, prm);
  } catch (const Error& e) {
    return {inconclusive_report("trver", claim, params, e.what())};
  }
  const auto members = members_on(ctx, ctx.grid);
  TrverOptions opt;
  opt.q = q;
  opt.a = prm["a"];
  opt.s = prm["s"];
  opt.u_grid = default_u_grid(ctx.grid, u_points(prm, ctx.grid.dim()));
  opt.rule = ctx.rule;
  opt.normalizer = r_normalizer(members, opt.u_grid, p, w, ctx.rule);
  const int d = ctx.grid.dim();
  std::vector<InequalityReport> worst(2);
  std::vector<int> arg(2, -1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    std::vector<GridFunctiond> gs;
    for (int j = 0; j <= m; ++j) gs.push_back(box_average(members[i], BoxSpecd::v_box(d, std::ldexp(delta, j))));
    auto reps = trver_reports(members[i], gs, p, w, opt);
    for (int side = 0; side < 2; ++side) {
      if (arg[side] < 0 || reps[side].ratio > worst[side].ratio) {
        worst[side] = std::move(reps[side]);
        arg[side] = static_cast<int>(i);
      }
    }
  }
  for (int side = 0; side < 2; ++side) {
    auto details = worst[side].details;
    worst[side].params = params;
    worst[side].params["q"] = q;
    worst[side].details = details;
    worst[side].details["argmax_member"] = arg[side];
    worst[side].details["q_source"] = q_source;
    worst[side].details["normalizer"] = opt.normalizer;
  }
  return worst;
}

std::vector<InequalityReport> run_holder(const CheckContext& ctx, const Weightd& w, const ojson& prm) {
  const double p = prm["p"];
  if (!(p >= 1)) throw Error("check 'holder': p must be >= 1");
  const double pp = p == 1 ? std::numeric_limits<double>::infinity() : p / (p - 1);
  const Measured mu(ctx.grid, w, ctx.rule);
  const auto members = members_on(ctx, ctx.grid);
  Worst worst;
  const std::size_t n = members.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& f = members[i];
    const auto& g = members[(i + 1) % n];
    worst.add(mu.apply((f.samples() * g.samples()).abs()), mu.norm(f, p) * mu.norm(g, pp), static_cast<int>(i));
  }
  auto params = base_params(ctx, w, prm);
  params["p_prime"] = number_json(pp);
  return {worst_report("holder", find_def("holder").summary, params, worst, 1.0, 1e-10 * worst.rhs)};
}

}  // namespace

const std::vector<std::string>& theorem_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& d : catalog()) out.push_back(d.id);
    return out;
  }();
  return ids;
}

std::string check_summary(const std::string& id) { return find_def(id).summary; }

nlohmann::ordered_json normalize_check_params(const std::string& id, const nlohmann::json& params) {
  const auto& def = find_def(id);
  if (!params.is_null() && !params.is_object()) throw Error("check '" + id + "': params must be an object");
  ojson out;
  for (auto it = def.defaults.begin(); it != def.defaults.end(); ++it) {
    if (params.is_object() && params.contains(it.key())) {
      check_value(id, it.key(), it.value(), params[it.key()]);
      out[it.key()] = params[it.key()];
    } else {
      out[it.key()] = it.value();
    }
  }
  if (params.is_object()) {
    for (auto it = params.begin(); it != params.end(); ++it) {
      if (it.key() == "weight") {
        check_value(id, "weight", nullptr, it.value());
        out["weight"] = it.value();
      } else if (!def.defaults.contains(it.key())) {
        throw Error("check '" + id + "': unknown parameter '" + it.key() + "'");
      }
    }
  }
  if (out.contains("p") && !(out["p"].get<double>() > 0)) throw Error("invalid exponent");
  return out;
}

std::vector<InequalityReport> check(const std::string& id, const nlohmann::json& params, const CheckContext& ctx) {
  const ojson prm = normalize_check_params(id, params);
  const Weightd w = prm.contains("weight") ? parse_weight(prm["weight"].get<std::string>()) : ctx.weight;
  w.validate(ctx.grid.dim());
  if (id == "suf") return run_suf(ctx, w, prm);
  if (id == "suwf") return run_suwf(ctx, w, prm);
  if (id == "ruwf") return run_ruwf(ctx, w, prm);
  if (id == "commute") return run_commute(ctx, w, prm);
  if (id == "frac") return run_frac(ctx, w, prm);
  if (id == "sduf") return run_sduf(ctx, w, prm);
  if (id == "dela") return run_dela(ctx, w, prm);
  if (id == "jackson") return run_jackson(ctx, w, prm);
  if (id == "marchaud") return run_marchaud(ctx, w, prm);
  if (id == "sandwich") return run_sandwich(ctx, w, prm);
  if (id == "trver") return run_trver(ctx, w, prm);
  if (id == "holder") return run_holder(ctx, w, prm);
  throw Error("unknown theorem_id: " + id);
}

std::vector<InequalityReport> run_checks(const std::vector<CheckRequest>& requests, const CheckContext& ctx,
                                         int jobs) {
  std::vector<std::vector<InequalityReport>> results(requests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < requests.size(); i = next++) {
      const auto& req = requests[i];
      try {
        results[i] = check(req.id, req.params, ctx);
      } catch (const Error& e) {
        results[i] = {inconclusive_report(req.id, "", base_params(ctx, ctx.weight, ojson(req.params)), e.what())};
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(requests.size())));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::vector<InequalityReport> out;
  for (auto& r : results) out.insert(out.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
  sort_reports(out);
  return out;
}

InequalityReport empirical_constant_report(std::string id, std::string claim, nlohmann::ordered_json params,
                                           double c_coarse, double c_fine, double drift_tol) {
  auto r = make_report(std::move(id), std::move(claim), std::move(params), std::abs(c_fine - c_coarse), c_coarse,
                       drift_tol, 0.0);
  if (!(c_coarse > 0) || !(c_fine > 0) || !std::isfinite(c_coarse) || !std::isfinite(c_fine)) r.verdict = Verdict::fail;
  r.details["kind"] = "empirical_constant";
  r.details["c_hat"] = number_json(c_coarse);
  r.details["c_hat_refined"] = number_json(c_fine);
  return r;
}

Gridd refined(const Gridd& g) { return g.refined(2); }

}  // namespace wsl
