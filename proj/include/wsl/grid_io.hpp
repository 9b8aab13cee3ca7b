#pragma once

// GridFunction files. Binary: a text header line "d n.. lower.. upper.."
// followed by little-endian float64 samples in row-major order. CSV (d = 1
// only): a header "x,f" and one row per sample.

#include "wsl/grid.hpp"

#include <iosfwd>
#include <string>

namespace wsl {

void write_gf(std::ostream& out, const GridFunctiond& f);
GridFunctiond read_gf(std::istream& in);

void write_csv(std::ostream& out, const GridFunctiond& f);
GridFunctiond read_csv(std::istream& in);

/// Picks the format from the extension (.csv or anything else as binary).
GridFunctiond load_grid_function(const std::string& path);
void save_grid_function(const std::string& path, const GridFunctiond& f);

}  // namespace wsl
