#include "wsl/ensemble.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace wsl {

namespace {

double bump(double r) { return r < 1 ? std::exp(1 - 1 / (1 - r * r)) : 0.0; }

// Independent engine per member.
std::mt19937_64 member_engine(std::uint64_t seed, int i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i)};
  return std::mt19937_64(seq);
}

GridFunctiond bump_mixture(std::mt19937_64& rng, const Gridd& grid, const Vec<double>& lo, const Vec<double>& hi) {
  const int d = grid.dim();
  std::uniform_int_distribution<int> count(1, 5);
  std::uniform_real_distribution<double> unit(0, 1);
  const double room = (hi - lo).minCoeff() / 2;
  const int k = count(rng);
  std::vector<Vec<double>> centers;
  std::vector<double> widths, heights;
  for (int j = 0; j < k; ++j) {
    const double w = room * (0.2 + 0.6 * unit(rng));
    Vec<double> c(d);
    for (int a = 0; a < d; ++a) c[a] = lo[a] + w + (hi[a] - lo[a] - 2 * w) * unit(rng);
    centers.push_back(c);
    widths.push_back(w);
    heights.push_back(0.1 + 0.9 * unit(rng));
  }
  return GridFunctiond::sample(grid, [&](const Vec<double>& x) {
    double v = 0;
    for (int j = 0; j < k; ++j) v += heights[j] * bump((x - centers[j]).norm() / widths[j]);
    return v;
  });
}

GridFunctiond trig_windowed(std::mt19937_64& rng, const Gridd& grid, const Vec<double>& lo, const Vec<double>& hi) {
  const int d = grid.dim();
  std::uniform_real_distribution<double> unit(0, 1);
  const Vec<double> center = (lo + hi) / 2;
  const Vec<double> half = (hi - lo) / 2;
  const int modes = 4;
  std::vector<Vec<double>> freq;
  std::vector<double> amp, phase;
  double total = 0;
  for (int j = 0; j < modes; ++j) {
    Vec<double> y(d);
    for (int a = 0; a < d; ++a) y[a] = (unit(rng) * 2 - 1) * 6;
    freq.push_back(y);
    amp.push_back(unit(rng));
    phase.push_back(2 * std::numbers::pi * unit(rng));
    total += amp.back();
  }
  for (double& a : amp) a /= total;
  return GridFunctiond::sample(grid, [&](const Vec<double>& x) {
    double window = 1;
    for (int a = 0; a < d; ++a) window *= bump(std::abs(x[a] - center[a]) / half[a]);
    if (window == 0) return 0.0;
    double s = 1.1;
    for (int j = 0; j < modes; ++j) s += amp[j] * std::cos(freq[j].dot(x) + phase[j]);
    return window * s;
  });
}

GridFunctiond indicator(std::mt19937_64& rng, const Gridd& grid, const Vec<double>& lo, const Vec<double>& hi) {
  const int d = grid.dim();
  const double step = 0.125;
  Vec<double> a(d), b(d);
  for (int k = 0; k < d; ++k) {
    const long first = static_cast<long>(std::ceil(lo[k] / step)), last = static_cast<long>(std::floor(hi[k] / step));
    std::uniform_int_distribution<long> pick(first, last - 1);
    long i = pick(rng), j = pick(rng);
    if (i > j) std::swap(i, j);
    a[k] = i * step;
    b[k] = (j + 1) * step;
  }
  return GridFunctiond::sample(grid, [&](const Vec<double>& x) {
    for (int k = 0; k < d; ++k)
      if (x[k] < a[k] || x[k] > b[k]) return 0.0;
    return 1.0;
  });
}

}  // namespace

const char* ensemble_kind_name(EnsembleKind k) {
  switch (k) {
    case EnsembleKind::bump_mixtures: return "bump_mixtures";
    case EnsembleKind::random_trig_windowed: return "random_trig_windowed";
    case EnsembleKind::indicators: return "indicators";
  }
  return "?";
}

EnsembleKind parse_ensemble_kind(const std::string& s) {
  if (s == "bump_mixtures") return EnsembleKind::bump_mixtures;
  if (s == "random_trig_windowed") return EnsembleKind::random_trig_windowed;
  if (s == "indicators") return EnsembleKind::indicators;
  throw Error("unknown ensemble kind: " + s);
}

Ensemble gen_ensemble(std::uint64_t seed, int n, EnsembleKind kind, const Gridd& grid, double margin) {
  if (n < 1) throw Error("ensemble: n must be >= 1");
  const Vec<double> lo = grid.box().lower().array() + margin;
  const Vec<double> hi = grid.box().upper().array() - margin;
  if (((hi - lo).array() < 0.5).any()) throw Error("ensemble: margin leaves no room for supports");
  Ensemble e;
  e.seed = seed;
  e.kind = kind;
  for (int i = 0; i < n; ++i) {
    auto rng = member_engine(seed, i);
    switch (kind) {
      case EnsembleKind::bump_mixtures: e.members.push_back(bump_mixture(rng, grid, lo, hi)); break;
      case EnsembleKind::random_trig_windowed: e.members.push_back(trig_windowed(rng, grid, lo, hi)); break;
      case EnsembleKind::indicators: e.members.push_back(indicator(rng, grid, lo, hi)); break;
    }
  }
  return e;
}

}  // namespace wsl
