#pragma once

// One numerical check per inequality. Every check runs over a seeded ensemble
// and returns worst-case reports.
//
// Checks whose constant is only known to exist (suwf, sduf, jackson,
// marchaud) report an empirical constant c_hat on the configured grid and on
// its 2x refinement: lhs = |c_fine - c_coarse|, rhs = c_coarse and
// constant_used = 0.2, so a pass means c_hat is finite, positive and drifts
// by at most 20%.

#include "wsl/ensemble.hpp"
#include "wsl/grid.hpp"
#include "wsl/report.hpp"
#include "wsl/weight.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace wsl {

struct CheckContext {
  Gridd grid;
  Weightd weight = Weightd::constant(1);
  EnsembleSpec ensemble;
  QuadratureRule rule;
};

/// The dispatcher's ids in a fixed order.
const std::vector<std::string>& theorem_ids();

/// One-line description of a check, for --help.
std::string check_summary(const std::string& id);

/// Fills defaults and rejects unknown keys or ill-typed values; the result
/// lists every parameter in a fixed order. Throws Error naming the key.
nlohmann::ordered_json normalize_check_params(const std::string& id, const nlohmann::json& params);

/// Runs one check. `params` is normalized first. An optional "weight" entry
/// overrides ctx.weight.
std::vector<InequalityReport> check(const std::string& id, const nlohmann::json& params, const CheckContext& ctx);

struct CheckRequest {
  std::string id;
  nlohmann::json params = nlohmann::json::object();
};

/// Runs the requests on up to `jobs` threads and returns every report sorted
/// by theorem_id, then params. A check that throws becomes an inconclusive
/// report carrying the message.
std::vector<InequalityReport> run_checks(const std::vector<CheckRequest>& requests, const CheckContext& ctx,
                                         int jobs = 1);

/// Empirical-constant report; see the header comment.
InequalityReport empirical_constant_report(std::string id, std::string claim, nlohmann::ordered_json params,
                                           double c_coarse, double c_fine, double drift_tol = 0.2);

/// Grid with twice the points per axis over the same box.
Gridd refined(const Gridd& g);

}  // namespace wsl
