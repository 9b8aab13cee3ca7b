#pragma once

// Inequality reports and their aggregation. One report records one claim of
// one check: lhs <= constant_used * rhs + error_budget.

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace wsl {

enum class Verdict { pass, fail, inconclusive };

const char* verdict_name(Verdict v);
Verdict parse_verdict(const std::string& s);

struct InequalityReport {
  std::string theorem_id;
  std::string claim;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  double lhs = 0;
  double rhs = 0;
  double constant_used = 1;
  double ratio = 0;
  Verdict verdict = Verdict::inconclusive;
  double error_budget = 0;
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
};

/// Report with ratio = lhs / rhs and the verdict decided by the inequality.
InequalityReport make_report(std::string theorem_id, std::string claim, nlohmann::ordered_json params, double lhs,
                             double rhs, double constant_used, double error_budget);

/// Report that could not be decided (e.g. a required A_p estimate diverges).
InequalityReport inconclusive_report(std::string theorem_id, std::string claim, nlohmann::ordered_json params,
                                     std::string reason);

nlohmann::ordered_json to_json(const InequalityReport& r);
InequalityReport report_from_json(const nlohmann::json& j);

/// Non-finite doubles are written as the strings "inf", "-inf", "nan".
nlohmann::ordered_json number_json(double x);
double number_from_json(const nlohmann::json& j);

struct Summary {
  int pass = 0;
  int fail = 0;
  int inconclusive = 0;
  double worst_ratio = 0;
  std::string worst_id;
  std::vector<InequalityReport> reports;

  bool all_pass() const { return fail == 0; }
};

Summary summarize(std::vector<InequalityReport> reports);
nlohmann::ordered_json summary_json(const Summary& s);

/// Stable order used for merging parallel results: theorem_id, then params.
void sort_reports(std::vector<InequalityReport>& reports);

/// JSON lines, one report per line.
void write_reports(std::ostream& out, const std::vector<InequalityReport>& reports);
std::vector<InequalityReport> read_reports(std::istream& in);

}  // namespace wsl
