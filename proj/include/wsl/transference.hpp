#pragma once

// Intermediate functions F_f(u) = int (R_{u,w} f)^q |G| w dx built from an
// extremal dual witness G, the two-sided sandwich between ||f||_{p,w} and
// sup_u F_f, and the l_s^m aggregation used by the vector-valued version.

#include "wsl/averaging.hpp"
#include "wsl/grid.hpp"
#include "wsl/norms.hpp"
#include "wsl/report.hpp"
#include "wsl/weight.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

namespace wsl {

template <typename Scalar>
struct DualWitness {
  GridFunction<Scalar> G;
  Scalar p_prime = std::numeric_limits<Scalar>::infinity();
  bool normalized = false;
};

template <typename Scalar>
struct IntermediateFunction {
  Grid<Scalar> u_grid;
  Samples<Scalar> values;
  Scalar p = 1;
  Scalar q = 1;
  DualWitness<Scalar> witness;
  Scalar normalizer = 1;
};

using DualWitnessd = DualWitness<double>;
using IntermediateFunctiond = IntermediateFunction<double>;

/// Witness attaining ||f||_{p,w} by pairing: (|f| / ||f||)^(p-1) for p > 1,
/// G = 1 for p = 1. In the discrete measure ||G||_{p',w} = 1 and
/// int |f| G w = ||f||_{p,w} up to rounding.
template <typename Scalar>
DualWitness<Scalar> extremal_witness(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> p,
                                     const Weight<Scalar>& w, const QuadratureRule& rule = {}) {
  if (!(p >= 1) || !std::isfinite(p)) throw Error("invalid exponent");
  DualWitness<Scalar> out;
  out.normalized = true;
  if (p == 1) {
    if (!(f.max_abs() > 0)) throw Error("extremal witness: zero function");
    out.G = GridFunction<Scalar>(f.grid(), Samples<Scalar>::Ones(f.size()));
    return out;
  }
  const Scalar norm = Measure<Scalar>(f.grid(), w, rule).norm(f, p);
  if (!(norm > 0)) throw Error("extremal witness: zero function");
  out.p_prime = p / (p - 1);
  out.G = GridFunction<Scalar>(f.grid(), (f.samples().abs() / norm).pow(p - 1));
  return out;
}

/// Witness for the p < 1 form: the extremal witness of f^q in L_{p/q,w}, so
/// that int f^q |G| w = ||f||_{p,w}^q.
template <typename Scalar>
DualWitness<Scalar> power_witness(const GridFunction<Scalar>& f, std::type_identity_t<Scalar> p,
                                  std::type_identity_t<Scalar> q, const Weight<Scalar>& w,
                                  const QuadratureRule& rule = {}) {
  if (q == 1) return extremal_witness(f, p, w, rule);
  if (!(q > 0 && q < p)) throw Error("power witness: need 0 < q < p");
  return extremal_witness(pow(abs(f), q), p / q, w, rule);
}

/// u = 0, s, 2s, ... up to 1 on every axis, with s the smallest grid multiple
/// of at least 1/points_per_unit. Returned as a grid whose cell centres are
/// the u values.
template <typename Scalar>
Grid<Scalar> default_u_grid(const Grid<Scalar>& grid, Index points_per_unit = 64) {
  const int d = grid.dim();
  Vec<Scalar> lo(d), hi(d);
  IVec n(d);
  for (int a = 0; a < d; ++a) {
    const Scalar h = grid.h()[a];
    const Scalar s = h * std::ceil((Scalar(1) / Scalar(points_per_unit)) / h * (1 - Scalar(1e-12)));
    n[a] = static_cast<Index>(std::floor(1 / s * (1 + Scalar(1e-12)))) + 1;
    lo[a] = -s / 2;
    hi[a] = (Scalar(n[a]) - Scalar(0.5)) * s;
  }
  return Grid<Scalar>(Box<Scalar>(lo, hi), n);
}

/// F_f(u) = int (R_{u,w} f)^q |G| w over the u values of u_grid, with
/// R_{u,w} f = f + S_{u,w} f / (2 normalizer).
template <typename Scalar>
IntermediateFunction<Scalar> intermediate_function(const GridFunction<Scalar>& f, const DualWitness<Scalar>& witness,
                                                   std::type_identity_t<Scalar> p, std::type_identity_t<Scalar> q,
                                                   const Weight<Scalar>& w, const Grid<Scalar>& u_grid,
                                                   std::type_identity_t<Scalar> normalizer,
                                                   const QuadratureRule& rule = {}) {
  if (!(p > 0) || !std::isfinite(p)) throw Error("invalid exponent");
  if (p >= 1 && q != 1) throw Error("intermediate function: q must be 1 for p >= 1");
  if (!(q > 0 && q <= 1)) throw Error("intermediate function: q must lie in (0, 1]");
  if (!(normalizer > 0)) throw Error("r operator: normalizer must be positive");
  if (!f.is_nonnegative()) throw Error("intermediate function: f must be nonnegative");
  if (witness.G.grid() != f.grid()) throw Error("grid mismatch");
  IntermediateFunction<Scalar> F;
  F.u_grid = u_grid;
  F.p = p;
  F.q = q;
  F.witness = witness;
  F.normalizer = normalizer;
  F.values = Samples<Scalar>::Zero(u_grid.size());
  const Measure<Scalar> mu(f.grid(), w, rule);
  const Samples<Scalar> absG = witness.G.samples().abs();
  const Vec<Scalar> zero = Vec<Scalar>::Zero(f.dim());
  const GridFunction<Scalar> base = weighted_steklov(f, zero, w);
  const Scalar c = Scalar(0.5) / normalizer;
  for (Index i = 0; i < u_grid.size(); ++i) {
    const Vec<Scalar> u = u_grid.point(i);
    if (u.cwiseAbs().maxCoeff() > base.support_margin() * (1 + Scalar(1e-12))) throw Error("reach exceeds margin");
    Samples<Scalar> r = f.samples() + c * translate(base, u).samples();
    if (q != 1) r = r.pow(q);
    F.values[i] = mu.apply(r * absG);
  }
  return F;
}

/// sup_u |F(u)| and max |F(u1) - F(u2)| over u-pairs with |u1 - u2| <= delta.
template <typename Scalar>
std::pair<Scalar, Scalar> sup_and_modulus(const IntermediateFunction<Scalar>& F, std::type_identity_t<Scalar> delta) {
  const auto& g = F.u_grid;
  const Scalar sup = F.values.size() ? F.values.abs().maxCoeff() : Scalar(0);
  Scalar modulus = 0;
  const int d = g.dim();
  IVec reach(d);
  for (int a = 0; a < d; ++a) reach[a] = static_cast<Index>(std::floor(delta / g.h()[a] * (1 + Scalar(1e-12))));
  detail::for_each_index(g, [&](Index linear, const IVec& idx) {
    IVec off = -reach;
    while (true) {
      Vec<Scalar> dist(d);
      bool inside = true;
      Index other = 0;
      for (int a = 0; a < d; ++a) {
        const Index k = idx[a] + off[a];
        if (k < 0 || k >= g.n()[a]) inside = false;
        other += k * g.strides()[a];
        dist[a] = Scalar(off[a]) * g.h()[a];
      }
      if (inside && dist.norm() <= delta * (1 + Scalar(1e-12)))
        modulus = std::max(modulus, std::abs(F.values[linear] - F.values[other]));
      int a = d - 1;
      for (; a >= 0; --a) {
        if (++off[a] <= reach[a]) break;
        off[a] = -reach[a];
      }
      if (a < 0) break;
    }
  });
  return {sup, modulus};
}

/// L_a norm of F over the u-box it samples, by the trapezoid rule, divided
/// by the covered volume (one for the default unit-cube grid).
template <typename Scalar>
Scalar la_norm(const IntermediateFunction<Scalar>& F, std::type_identity_t<Scalar> a) {
  if (!(a > 0)) throw Error("invalid exponent");
  const auto& g = F.u_grid;
  Scalar acc = 0, vol = 0;
  detail::for_each_index(g, [&](Index linear, const IVec& idx) {
    const Scalar m = detail::trapezoid_factor(g, idx);
    acc += m * std::pow(std::abs(F.values[linear]), a);
    vol += m;
  });
  return std::pow(acc / vol, 1 / a);
}

/// (sum_j x_j^s)^(1/s).
template <typename Scalar>
Scalar lsm_norm(const std::vector<Scalar>& seq, std::type_identity_t<Scalar> s) {
  if (!(s > 0)) throw Error("lsm norm: s must be positive");
  if (seq.empty()) throw Error("lsm norm: empty sequence");
  Scalar acc = 0;
  for (Scalar x : seq) acc += std::pow(std::abs(x), s);
  return std::pow(acc, 1 / s);
}

/// Largest ||S_{u,w} f||_{p,w} / ||f||_{p,w} over the members and the u values
/// of u_grid: an empirical lower estimate of the operator norm used as the
/// R-operator normalizer.
template <typename Scalar>
Scalar r_normalizer(const std::vector<GridFunction<Scalar>>& members, const Grid<Scalar>& u_grid,
                    std::type_identity_t<Scalar> p, const Weight<Scalar>& w, const QuadratureRule& rule = {}) {
  if (members.empty()) throw Error("operator norm: empty ensemble");
  const Measure<Scalar> mu(members.front().grid(), w, rule);
  Scalar best = 0;
  for (const auto& f : members) {
    const Scalar nf = mu.norm(f, p);
    if (!(nf > 0)) continue;
    const auto base = weighted_steklov(f, Vec<Scalar>::Zero(f.dim()), w);
    for (Index i = 0; i < u_grid.size(); ++i) best = std::max(best, mu.norm(translate(base, u_grid.point(i)), p) / nf);
  }
  if (!(best > 0)) throw Error("operator norm: empty ensemble");
  return best;
}

/// ||f||_{p,w} expressed in the units of F: the norm itself for q = 1 and
/// ||f||^q for the p < 1 form.
inline double f_units(double norm, double q) { return q == 1 ? norm : std::pow(norm, q); }

struct SandwichOptions {
  /// Exponent of the p < 1 form; 1 for p >= 1.
  double q = 1;
  double normalizer = 1;
  /// Empty grid selects default_u_grid.
  Gridd u_grid;
  /// Relative rounding budget of the discrete pairing identity.
  double tol = 1e-10;
  QuadratureRule rule;
};

/// Both sides of ||f||_{p,w} <= sup_u F_f^(1/q) <= 4^(1/min(1,p)) ||f||_{p,w}
/// as two reports: the lower one with constant 1 and a rounding budget, the
/// upper one with the R-operator constant.
inline std::vector<InequalityReport> sandwich_reports(const GridFunctiond& f, double p, const Weightd& w,
                                                      const SandwichOptions& opt) {
  const Gridd ug = opt.u_grid.size() ? opt.u_grid : default_u_grid(f.grid());
  const auto witness = power_witness(f, p, opt.q, w, opt.rule);
  const auto F = intermediate_function(f, witness, p, opt.q, w, ug, opt.normalizer, opt.rule);
  const double norm = Measured(f.grid(), w, opt.rule).norm(f, p);
  const double sup = F.values.maxCoeff();
  const double sup_norm_units = std::pow(sup, 1 / opt.q);
  nlohmann::ordered_json params = {{"p", p},
                                   {"q", opt.q},
                                   {"weight", w.describe()},
                                   {"d", f.dim()},
                                   {"normalizer", opt.normalizer},
                                   {"u_points", ug.size()}};
  std::vector<InequalityReport> out;
  auto lower = make_report("sandwich", "||f||_{p,w} <= sup_u F_f(u)^(1/q)", params, norm, sup_norm_units, 1.0,
                           opt.tol * norm);
  lower.details["side"] = "lower";
  lower.details["F_at_0"] = number_json(F.values[0]);
  out.push_back(std::move(lower));
  const double cap = std::pow(4.0, 1 / std::min(1.0, p));
  auto upper = make_report("sandwich", "sup_u F_f(u)^(1/q) <= 4^(1/min(1,p)) ||f||_{p,w}", std::move(params),
                           sup_norm_units, norm, cap, opt.tol * cap * norm);
  upper.details["side"] = "upper";
  out.push_back(std::move(upper));
  return out;
}

/// First report of sandwich_reports that fails, or the upper one.
inline InequalityReport sandwich_check(const GridFunctiond& f, double p, const Weightd& w, const SandwichOptions& opt) {
  auto reports = sandwich_reports(f, p, w, opt);
  for (auto& r : reports)
    if (r.verdict != Verdict::pass) return r;
  return reports.back();
}

struct TrverOptions {
  double q = 1;
  double normalizer = 1;
  /// Exponent of the L_a norm over u; a > 1.
  double a = 2;
  /// Exponent of the l_s^m sum; s > 2.
  double s = 3;
  Gridd u_grid;
  double tol = 1e-10;
  QuadratureRule rule;
};

/// The vector-valued chain for f and g_0..g_m, all paired with f's witness:
/// ||f||_{p,w} <= ||F_f||_{L_a}^(1/q) and
/// l_s(||F_{g_j}||_{L_a}^(1/q)) <= 4^(1/min(1,p)) l_s(||g_j||_{p,w}).
inline std::vector<InequalityReport> trver_reports(const GridFunctiond& f, const std::vector<GridFunctiond>& g_list,
                                                   double p, const Weightd& w, const TrverOptions& opt) {
  if (!(opt.a > 1)) throw Error("trver: a must be > 1");
  if (!(opt.s > 2)) throw Error("trver: s must be > 2");
  if (g_list.empty()) throw Error("trver: empty g list");
  const Gridd ug = opt.u_grid.size() ? opt.u_grid : default_u_grid(f.grid());
  const auto witness = power_witness(f, p, opt.q, w, opt.rule);
  const Measured mu(f.grid(), w, opt.rule);
  const auto Ff = intermediate_function(f, witness, p, opt.q, w, ug, opt.normalizer, opt.rule);
  const double norm_f = mu.norm(f, p);
  const double la_f = std::pow(la_norm(Ff, opt.a), 1 / opt.q);
  std::vector<double> la_g, norm_g;
  for (const auto& g : g_list) {
    const auto Fg = intermediate_function(g, witness, p, opt.q, w, ug, opt.normalizer, opt.rule);
    la_g.push_back(std::pow(la_norm(Fg, opt.a), 1 / opt.q));
    norm_g.push_back(mu.norm(g, p));
  }
  const int m = static_cast<int>(g_list.size()) - 1;
  nlohmann::ordered_json params = {{"p", p},         {"q", opt.q}, {"weight", w.describe()},
                                   {"d", f.dim()},   {"a", opt.a}, {"s", opt.s},
                                   {"m", m},         {"normalizer", opt.normalizer}};
  std::vector<InequalityReport> out;
  auto lower =
      make_report("trver", "||f||_{p,w} <= ||F_f||_{L_a(u)}^(1/q)", params, norm_f, la_f, 1.0, opt.tol * norm_f);
  lower.details["side"] = "lower";
  out.push_back(std::move(lower));
  const double cap = std::pow(4.0, 1 / std::min(1.0, p));
  const double lhs = lsm_norm(la_g, opt.s), rhs = lsm_norm(norm_g, opt.s);
  auto upper = make_report("trver", "l_s(||F_{g_j}||_{L_a}^(1/q)) <= 4^(1/min(1,p)) l_s(||g_j||_{p,w})",
                           std::move(params), lhs, rhs, cap, opt.tol * cap * rhs);
  upper.details["side"] = "upper";
  out.push_back(std::move(upper));
  return out;
}

/// CSV rows "u,F" for a one-dimensional u-grid.
template <typename Scalar>
void write_intermediate_csv(std::ostream& out, const IntermediateFunction<Scalar>& F) {
  if (F.u_grid.dim() != 1) throw Error("intermediate csv: only d = 1 is supported");
  out << "u,F\n";
  out.precision(17);
  for (Index i = 0; i < F.u_grid.size(); ++i) out << F.u_grid.point(i)[0] << ',' << F.values[i] << '\n';
}

}  // namespace wsl
