#pragma once

// Seeded corpora of nonnegative, compactly supported test functions. Member i
// depends only on (seed, i, kind, inner box), so the same corpus can be
// resampled on a refined grid.

#include "wsl/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wsl {

enum class EnsembleKind { bump_mixtures, random_trig_windowed, indicators };

const char* ensemble_kind_name(EnsembleKind k);
EnsembleKind parse_ensemble_kind(const std::string& s);

struct EnsembleSpec {
  std::uint64_t seed = 1;
  int n = 16;
  EnsembleKind kind = EnsembleKind::bump_mixtures;
  /// Distance kept free between every support and the box boundary.
  double margin = 1.75;
};

struct Ensemble {
  std::uint64_t seed = 0;
  EnsembleKind kind = EnsembleKind::bump_mixtures;
  std::vector<GridFunctiond> members;
};

/// bump_mixtures: 1 to 5 smooth bumps, the first of height >= 0.1.
/// random_trig_windowed: a smooth window times 1.1 + sum a_k cos(y_k.x + phi_k)
/// with sum |a_k| <= 1. indicators: characteristic function of a box with
/// corners on the lattice of spacing 1/8.
Ensemble gen_ensemble(std::uint64_t seed, int n, EnsembleKind kind, const Gridd& grid, double margin = 1.75);

inline Ensemble gen_ensemble(const EnsembleSpec& spec, const Gridd& grid) {
  return gen_ensemble(spec.seed, spec.n, spec.kind, grid, spec.margin);
}

}  // namespace wsl
