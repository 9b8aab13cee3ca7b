#include "wsl/report.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace wsl {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict parse_verdict(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw std::runtime_error("unknown verdict: " + s);
}

InequalityReport make_report(std::string theorem_id, std::string claim, nlohmann::ordered_json params, double lhs,
                             double rhs, double constant_used, double error_budget) {
  InequalityReport r;
  r.theorem_id = std::move(theorem_id);
  r.claim = std::move(claim);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant_used = constant_used;
  r.error_budget = error_budget;
  if (rhs != 0) {
    r.ratio = lhs / rhs;
  } else {
    r.ratio = lhs == 0 ? 0 : std::numeric_limits<double>::infinity();
  }
  const bool finite = std::isfinite(lhs) && std::isfinite(rhs) && std::isfinite(constant_used);
  r.verdict = finite && lhs <= constant_used * rhs + error_budget ? Verdict::pass : Verdict::fail;
  return r;
}

InequalityReport inconclusive_report(std::string theorem_id, std::string claim, nlohmann::ordered_json params,
                                     std::string reason) {
  InequalityReport r;
  r.theorem_id = std::move(theorem_id);
  r.claim = std::move(claim);
  r.params = std::move(params);
  r.lhs = r.rhs = r.ratio = std::numeric_limits<double>::quiet_NaN();
  r.constant_used = std::numeric_limits<double>::quiet_NaN();
  r.verdict = Verdict::inconclusive;
  r.details["reason"] = std::move(reason);
  return r;
}

nlohmann::ordered_json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double number_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw std::runtime_error("expected a number");
}

nlohmann::ordered_json to_json(const InequalityReport& r) {
  nlohmann::ordered_json j;
  j["theorem_id"] = r.theorem_id;
  j["claim"] = r.claim;
  j["params"] = r.params;
  j["lhs"] = number_json(r.lhs);
  j["rhs"] = number_json(r.rhs);
  j["constant_used"] = number_json(r.constant_used);
  j["ratio"] = number_json(r.ratio);
  j["verdict"] = verdict_name(r.verdict);
  j["error_budget"] = number_json(r.error_budget);
  j["details"] = r.details;
  return j;
}

InequalityReport report_from_json(const nlohmann::json& j) {
  InequalityReport r;
  r.theorem_id = j.at("theorem_id").get<std::string>();
  r.claim = j.at("claim").get<std::string>();
  r.params = nlohmann::ordered_json::parse(j.at("params").dump());
  r.lhs = number_from_json(j.at("lhs"));
  r.rhs = number_from_json(j.at("rhs"));
  r.constant_used = number_from_json(j.at("constant_used"));
  r.ratio = number_from_json(j.at("ratio"));
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.error_budget = number_from_json(j.at("error_budget"));
  r.details = nlohmann::ordered_json::parse(j.at("details").dump());
  return r;
}

Summary summarize(std::vector<InequalityReport> reports) {
  Summary s;
  for (const auto& r : reports) {
    switch (r.verdict) {
      case Verdict::pass: ++s.pass; break;
      case Verdict::fail: ++s.fail; break;
      case Verdict::inconclusive: ++s.inconclusive; break;
    }
    if (!std::isnan(r.ratio) && (s.worst_id.empty() || r.ratio > s.worst_ratio)) {
      s.worst_ratio = r.ratio;
      s.worst_id = r.theorem_id;
    }
  }
  s.reports = std::move(reports);
  return s;
}

nlohmann::ordered_json summary_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["pass"] = s.pass;
  j["fail"] = s.fail;
  j["inconclusive"] = s.inconclusive;
  j["worst_ratio"] = number_json(s.worst_ratio);
  j["worst_id"] = s.worst_id;
  return j;
}

void sort_reports(std::vector<InequalityReport>& reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const InequalityReport& a, const InequalityReport& b) {
    if (a.theorem_id != b.theorem_id) return a.theorem_id < b.theorem_id;
    const auto pa = a.params.dump(), pb = b.params.dump();
    if (pa != pb) return pa < pb;
    return a.claim < b.claim;
  });
}

void write_reports(std::ostream& out, const std::vector<InequalityReport>& reports) {
  for (const auto& r : reports) out << to_json(r).dump() << '\n';
}

std::vector<InequalityReport> read_reports(std::istream& in) {
  std::vector<InequalityReport> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(report_from_json(nlohmann::json::parse(line)));
  }
  return out;
}

}  // namespace wsl
