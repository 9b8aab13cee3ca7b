#include "wsl/cli.hpp"

#include "wsl/approx.hpp"
#include "wsl/averaging.hpp"
#include "wsl/checks.hpp"
#include "wsl/config.hpp"
#include "wsl/frac_diff.hpp"
#include "wsl/grid_io.hpp"
#include "wsl/muckenhoupt.hpp"
#include "wsl/norms.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

namespace wsl {

namespace {

// Shortest round-trip form, always with a decimal point or exponent.
std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string id_listing() {
  std::string s = "Check ids accepted by verify:\n";
  for (const auto& id : theorem_ids()) s += "  " + id + std::string(10 - std::min<std::size_t>(id.size(), 9), ' ') +
                                              check_summary(id) + "\n";
  return s;
}

Vec<double> vec_arg(const std::vector<double>& v, int d, const char* name) {
  if (v.size() == 1) return Vec<double>::Constant(d, v[0]);
  if (static_cast<int>(v.size()) != d) throw Error(std::string("--") + name + " needs 1 or d values");
  return Eigen::Map<const Vec<double>>(v.data(), d);
}

QuadratureRule rule_from(const std::string& kind, int refinement) {
  if (kind == "midpoint") return {QuadratureKind::midpoint, refinement};
  if (kind == "trapezoid") return {QuadratureKind::trapezoid, refinement};
  throw Error("unknown quadrature kind: " + kind);
}

std::optional<int> env_jobs() {
  const char* s = std::getenv("WSL_JOBS");
  if (!s || !*s) return std::nullopt;
  int v = 0;
  const auto res = std::from_chars(s, s + std::strlen(s), v);
  if (res.ec != std::errc() || *res.ptr != '\0' || v < 1) throw Error("WSL_JOBS must be a positive integer");
  return v;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weighted Lebesgue space toolkit: norms, A_p constants, operators and inequality checks", "wsl"};
  app.require_subcommand(1);
  app.footer(id_listing());

  // norm
  auto* norm = app.add_subcommand("norm", "Weighted L_p norm of a grid function file");
  double norm_p = 2;
  std::string norm_weight = "const:1", norm_input, norm_rule = "midpoint";
  int norm_refine = 1;
  norm->add_option("--p", norm_p, "Exponent (inf for the sup norm)")->required();
  norm->add_option("--weight", norm_weight, "Weight spec")->capture_default_str();
  norm->add_option("--input", norm_input, "Grid function (.gf or .csv)")->required();
  norm->add_option("--quadrature", norm_rule, "midpoint or trapezoid")->capture_default_str();
  norm->add_option("--refinement", norm_refine, "Sub-cells per axis")->capture_default_str();

  // apconst
  auto* apc = app.add_subcommand("apconst", "A_p constant estimate over dyadic cubes");
  double ap_p = 2, ap_box = 1;
  std::string ap_weight = "const:1";
  int ap_depth = 8, ap_d = 1;
  apc->add_option("--weight", ap_weight, "Weight spec")->required();
  apc->add_option("--p", ap_p, "Exponent")->required();
  apc->add_option("--depth", ap_depth, "Deepest dyadic level")->capture_default_str();
  apc->add_option("--d", ap_d, "Dimension")->capture_default_str();
  apc->add_option("--half-width", ap_box, "Base cube is [-L, L]^d")->capture_default_str();

  // op
  auto* op = app.add_subcommand("op", "Apply an operator to a grid function file");
  std::string op_tag, op_input, op_output, op_weight = "const:1";
  std::vector<double> op_u{0.0}, op_v{0.0};
  double op_delta = 0.25, op_normalizer = 1, op_sigma = 8, op_k = 0.5, op_tol = 1e-8;
  op->add_option("--op", op_tag, "E, S_u, S_uw, R, S_dv, V, Z, B, J, frac or spectrum")->required();
  op->add_option("--input", op_input, "Input grid function")->required();
  op->add_option("--output", op_output, "Output file (.gf or .csv; spectrum writes CSV)")->required();
  op->add_option("--weight", op_weight, "Weight spec")->capture_default_str();
  op->add_option("--u", op_u, "Shift u")->expected(1, 3);
  op->add_option("--v", op_v, "Shift v")->expected(1, 3);
  op->add_option("--delta", op_delta, "Box size")->capture_default_str();
  op->add_option("--normalizer", op_normalizer, "Normalizer of R")->capture_default_str();
  op->add_option("--sigma", op_sigma, "Type of J")->capture_default_str();
  op->add_option("--k", op_k, "Order of the fractional difference")->capture_default_str();
  op->add_option("--tol", op_tol, "Series tolerance")->capture_default_str();

  // verify
  auto* verify = app.add_subcommand("verify", "Run inequality checks from a config");
  std::string v_config;
  std::optional<std::uint64_t> v_seed;
  std::optional<std::string> v_out;
  std::optional<int> v_jobs;
  verify->add_option("--config", v_config, "Run config (JSON)")->required();
  verify->add_option("--seed", v_seed, "Override the ensemble seed");
  verify->add_option("--out", v_out, "Report file (JSON lines)");
  verify->add_option("--jobs", v_jobs, "Worker threads (falls back to WSL_JOBS)")->check(CLI::PositiveNumber);
  verify->footer(id_listing());

  // report
  auto* report = app.add_subcommand("report", "Summarize a report file");
  std::string r_input;
  report->add_option("--input", r_input, "Report file (JSON lines)")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*norm) {
      const auto f = load_grid_function(norm_input);
      const auto w = parse_weight(norm_weight);
      out << format_number(Measured(f.grid(), w, rule_from(norm_rule, norm_refine)).norm(f, norm_p)) << "\n";
      return 0;
    }
    if (*apc) {
      const auto w = parse_weight(ap_weight);
      const auto est = ap_constant(w, ap_p, CubeFamilyd(Boxd::cube(ap_d, -ap_box, ap_box), ap_depth));
      out << "weight = " << w.describe() << "\n";
      out << "p = " << format_number(ap_p) << "\n";
      out << "value = " << format_number(est.value) << "\n";
      out << "diverging = " << (est.diverging ? "true" : "false") << "\n";
      for (const auto& [depth, v] : est.depth_profile) out << "depth " << depth << " " << format_number(v) << "\n";
      return 0;
    }
    if (*op) {
      const auto f = load_grid_function(op_input);
      const auto w = parse_weight(op_weight);
      const int d = f.dim();
      if (op_tag == "spectrum") {
        std::ofstream os(op_output);
        if (!os) throw Error("cannot write " + op_output);
        write_spectrum_csv(os, spectrum(f));
        return 0;
      }
      GridFunctiond g;
      if (op_tag == "J") {
        g = vp_apply(f, op_sigma);
      } else if (op_tag == "frac") {
        g = frac_difference(f, op_k, op_delta, op_tol);
      } else {
        OperatorSpec<double> spec;
        spec.tag = parse_operator(op_tag);
        spec.u = vec_arg(op_u, d, "u");
        spec.v = vec_arg(op_v, d, "v");
        spec.delta = op_delta;
        spec.normalizer = op_normalizer;
        g = apply_operator(spec, f, w);
      }
      save_grid_function(op_output, g);
      return 0;
    }
    if (*verify) {
      RunConfig cfg = load_config(v_config);
      if (v_seed) cfg.ensemble.seed = *v_seed;
      if (v_out) cfg.out = *v_out;
      int jobs = 1;
      if (v_jobs)
        jobs = *v_jobs;
      else if (auto e = env_jobs())
        jobs = *e;
      else if (cfg.jobs)
        jobs = *cfg.jobs;
      const auto reports = run_checks(cfg.checks, cfg.context(), jobs);
      if (cfg.out) write_report(reports, *cfg.out);
      for (const auto& r : reports) {
        out << verdict_name(r.verdict) << " " << r.theorem_id << " ratio=" << format_number(r.ratio)
            << " constant=" << format_number(r.constant_used);
        if (r.details.contains("part")) out << " part=" << r.details["part"].get<std::string>();
        if (r.details.contains("side")) out << " side=" << r.details["side"].get<std::string>();
        out << "\n";
      }
      const auto s = summarize(reports);
      out << summary_json(s).dump() << "\n";
      return s.all_pass() ? 0 : 1;
    }
    if (*report) {
      const auto s = summarize(read_report(r_input));
      out << summary_json(s).dump() << "\n";
      return s.all_pass() ? 0 : 1;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace wsl
