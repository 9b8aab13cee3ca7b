#include "wsl/config.hpp"

#include "wsl/averaging.hpp"

#include <fstream>
#include <sstream>

namespace wsl {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

double parse_number(const std::string& s, const std::string& spec) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error("bad weight spec: " + spec);
  }
  if (used != s.size()) throw Error("bad weight spec: " + spec);
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& spec) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item, spec));
  if (out.empty()) throw Error("bad weight spec: " + spec);
  return out;
}

void reject_unknown(const json& obj, const std::vector<std::string>& keys, const std::string& where) {
  if (!obj.is_object()) throw Error("config: '" + where + "' must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
      throw Error("config: unknown key '" + (where.empty() ? "" : where + ".") + it.key() + "'");
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw Error("config: key '" + key + "' has the wrong type");
  }
}

Vec<double> per_axis(const json& j, int d, const std::string& key) {
  if (j.is_number()) return Vec<double>::Constant(d, j.get<double>());
  if (!j.is_array() || static_cast<int>(j.size()) != d) throw Error("config: key '" + key + "' needs d entries");
  Vec<double> out(d);
  for (int a = 0; a < d; ++a) out[a] = get_as<double>(j[a], key);
  return out;
}

template <typename V>
ojson axis_json(const V& v) {
  ojson out = ojson::array();
  for (Index a = 0; a < v.size(); ++a) out.push_back(v[a]);
  return out;
}

}  // namespace

Weightd parse_weight(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "const") return Weightd::constant(rest.empty() ? 1.0 : parse_number(rest, spec));
  if (kind == "power") return Weightd::power(parse_number(rest, spec));
  if (kind == "product_power") return Weightd::product_power(parse_list(rest, spec));
  if (kind == "step") {
    const auto semi = rest.find(';');
    if (semi == std::string::npos) throw Error("bad weight spec: " + spec);
    return Weightd::step(parse_list(rest.substr(0, semi), spec), parse_list(rest.substr(semi + 1), spec));
  }
  throw Error("unknown weight kind: " + spec);
}

RunConfig parse_config(const json& j) {
  reject_unknown(j, {"grid", "weight", "ensemble", "quadrature", "checks", "out", "jobs"}, "");
  RunConfig c;

  if (!j.contains("grid")) throw Error("config: missing key 'grid'");
  const auto& gj = j["grid"];
  reject_unknown(gj, {"d", "n", "lower", "upper"}, "grid");
  for (const char* k : {"d", "n", "lower", "upper"})
    if (!gj.contains(k)) throw Error(std::string("config: missing key 'grid.") + k + "'");
  const int d = get_as<int>(gj["d"], "grid.d");
  if (d < 1 || d > 3) throw Error("config: 'grid.d' must be 1, 2 or 3");
  IVec n(d);
  if (gj["n"].is_number_integer()) {
    n.setConstant(gj["n"].get<Index>());
  } else if (gj["n"].is_array() && static_cast<int>(gj["n"].size()) == d) {
    for (int a = 0; a < d; ++a) n[a] = get_as<Index>(gj["n"][a], "grid.n");
  } else {
    throw Error("config: key 'grid.n' must be an integer or d integers");
  }
  const Vec<double> lo = per_axis(gj["lower"], d, "grid.lower"), hi = per_axis(gj["upper"], d, "grid.upper");
  if (((hi - lo).array() <= 0).any()) throw Error("config: grid.upper must exceed grid.lower");
  c.grid = Gridd(Boxd(lo, hi), n);

  if (j.contains("weight")) {
    c.weight = parse_weight(get_as<std::string>(j["weight"], "weight"));
    c.weight.validate(d);
  }

  if (j.contains("ensemble")) {
    const auto& ej = j["ensemble"];
    reject_unknown(ej, {"seed", "n", "kind", "margin"}, "ensemble");
    if (ej.contains("seed")) c.ensemble.seed = get_as<std::uint64_t>(ej["seed"], "ensemble.seed");
    if (ej.contains("n")) c.ensemble.n = get_as<int>(ej["n"], "ensemble.n");
    if (ej.contains("kind")) c.ensemble.kind = parse_ensemble_kind(get_as<std::string>(ej["kind"], "ensemble.kind"));
    if (ej.contains("margin")) c.ensemble.margin = get_as<double>(ej["margin"], "ensemble.margin");
    if (c.ensemble.n < 1) throw Error("config: 'ensemble.n' must be >= 1");
    if (!(c.ensemble.margin >= 0)) throw Error("config: 'ensemble.margin' must be >= 0");
  }

  if (j.contains("quadrature")) {
    const auto& qj = j["quadrature"];
    reject_unknown(qj, {"kind", "refinement"}, "quadrature");
    QuadratureKind kind = QuadratureKind::midpoint;
    if (qj.contains("kind")) {
      const auto k = get_as<std::string>(qj["kind"], "quadrature.kind");
      if (k == "trapezoid")
        kind = QuadratureKind::trapezoid;
      else if (k != "midpoint")
        throw Error("config: unknown quadrature kind '" + k + "'");
    }
    const int r = qj.contains("refinement") ? get_as<int>(qj["refinement"], "quadrature.refinement") : 1;
    c.rule = QuadratureRule(kind, r);
  }

  if (j.contains("checks")) {
    if (!j["checks"].is_array()) throw Error("config: key 'checks' must be an array");
    for (const auto& cj : j["checks"]) {
      if (cj.is_string()) {
        c.checks.push_back({cj.get<std::string>(), json::object()});
        normalize_check_params(c.checks.back().id, c.checks.back().params);
        continue;
      }
      reject_unknown(cj, {"id", "params"}, "checks[]");
      if (!cj.contains("id")) throw Error("config: missing key 'checks[].id'");
      CheckRequest req{get_as<std::string>(cj["id"], "checks[].id"),
                       cj.contains("params") ? cj["params"] : json::object()};
      normalize_check_params(req.id, req.params);
      c.checks.push_back(std::move(req));
    }
  } else {
    for (const auto& id : theorem_ids()) c.checks.push_back({id, json::object()});
  }

  if (j.contains("out") && !j["out"].is_null()) c.out = get_as<std::string>(j["out"], "out");
  if (j.contains("jobs") && !j["jobs"].is_null()) {
    c.jobs = get_as<int>(j["jobs"], "jobs");
    if (*c.jobs < 1) throw Error("config: 'jobs' must be >= 1");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_config(j);
}

ojson normalized(const RunConfig& c) {
  ojson out;
  out["grid"] = {{"d", c.grid.dim()},
                 {"n", axis_json(c.grid.n())},
                 {"lower", axis_json(c.grid.box().lower())},
                 {"upper", axis_json(c.grid.box().upper())}};
  out["weight"] = c.weight.describe();
  out["ensemble"] = {{"seed", c.ensemble.seed},
                     {"n", c.ensemble.n},
                     {"kind", ensemble_kind_name(c.ensemble.kind)},
                     {"margin", c.ensemble.margin}};
  out["quadrature"] = {{"kind", c.rule.kind == QuadratureKind::midpoint ? "midpoint" : "trapezoid"},
                       {"refinement", c.rule.refinement}};
  out["checks"] = ojson::array();
  for (const auto& req : c.checks)
    out["checks"].push_back({{"id", req.id}, {"params", normalize_check_params(req.id, req.params)}});
  out["out"] = c.out ? ojson(*c.out) : ojson(nullptr);
  out["jobs"] = c.jobs ? ojson(*c.jobs) : ojson(nullptr);
  return out;
}

void write_report(const std::vector<InequalityReport>& reports, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  write_reports(out, reports);
  if (!out) throw Error("write failed: " + path);
}

std::vector<InequalityReport> read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return read_reports(in);
}

}  // namespace wsl
