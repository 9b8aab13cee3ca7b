#pragma once

// Run configuration: strict JSON loading, normalization and report output.
//
//   {"grid": {"d": 1, "n": 512, "lower": -4, "upper": 4},
//    "weight": "power:0.5",
//    "ensemble": {"seed": 1, "n": 16, "kind": "bump_mixtures", "margin": 1.75},
//    "quadrature": {"kind": "midpoint", "refinement": 1},
//    "checks": [{"id": "suf", "params": {"p": 2}}],
//    "out": "reports.jsonl", "jobs": 2}
//
// Everything except "grid" has a default; a missing "checks" runs every id
// with default parameters.

#include "wsl/checks.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wsl {

/// "const:c", "power:a", "product_power:a1,a2,..", "step:b1,..;l0,l1,..".
Weightd parse_weight(const std::string& spec);

struct RunConfig {
  Gridd grid;
  Weightd weight = Weightd::constant(1);
  EnsembleSpec ensemble;
  QuadratureRule rule;
  std::vector<CheckRequest> checks;
  std::optional<std::string> out;
  std::optional<int> jobs;

  CheckContext context() const { return {grid, weight, ensemble, rule}; }
};

/// Throws Error naming the offending key.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

/// Every field spelled out in a fixed order; parse_config(normalized(c))
/// gives back the same normalized form.
nlohmann::ordered_json normalized(const RunConfig& c);

/// Reports as JSON lines.
void write_report(const std::vector<InequalityReport>& reports, const std::string& path);
std::vector<InequalityReport> read_report(const std::string& path);

}  // namespace wsl
