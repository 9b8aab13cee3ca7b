#include "wsl/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace wsl {

namespace {

static_assert(sizeof(double) == 8);

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_gf(std::ostream& out, const GridFunctiond& f) {
  const auto& g = f.grid();
  const int d = g.dim();
  std::ostringstream head;
  head.precision(17);
  head << d;
  for (int a = 0; a < d; ++a) head << ' ' << g.n()[a];
  for (int a = 0; a < d; ++a) head << ' ' << g.box().lower()[a];
  for (int a = 0; a < d; ++a) head << ' ' << g.box().upper()[a];
  out << head.str() << '\n';
  for (Index i = 0; i < f.size(); ++i) {
    std::uint64_t bits;
    const double x = f.samples()[i];
    std::memcpy(&bits, &x, 8);
    bits = to_le(bits);
    out.write(reinterpret_cast<const char*>(&bits), 8);
  }
  if (!out) throw Error("gf: write failed");
}

GridFunctiond read_gf(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("gf: missing header");
  std::istringstream head(line);
  int d = 0;
  if (!(head >> d) || d < 1 || d > 3) throw Error("gf: bad dimension in header");
  IVec n(d);
  Vec<double> lo(d), hi(d);
  for (int a = 0; a < d; ++a)
    if (!(head >> n[a])) throw Error("gf: truncated header");
  for (int a = 0; a < d; ++a)
    if (!(head >> lo[a])) throw Error("gf: truncated header");
  for (int a = 0; a < d; ++a)
    if (!(head >> hi[a])) throw Error("gf: truncated header");
  std::string extra;
  if (head >> extra) throw Error("gf: trailing header fields");
  Gridd grid(Boxd(lo, hi), n);
  Samples<double> s(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    std::uint64_t bits;
    if (!in.read(reinterpret_cast<char*>(&bits), 8)) throw Error("gf: truncated samples");
    bits = to_le(bits);
    std::memcpy(&s[i], &bits, 8);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error("gf: trailing bytes");
  return GridFunctiond(grid, s);
}

void write_csv(std::ostream& out, const GridFunctiond& f) {
  if (f.dim() != 1) throw Error("csv: only d = 1 is supported");
  out.precision(17);
  out << "x,f\n";
  for (Index i = 0; i < f.size(); ++i) out << f.grid().point(i)[0] << ',' << f.samples()[i] << '\n';
}

GridFunctiond read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,", 0) != 0) throw Error("csv: expected header x,f");
  std::vector<double> xs, fs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error("csv: malformed row");
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      fs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error("csv: malformed row");
    }
  }
  const Index n = static_cast<Index>(xs.size());
  if (n < 2) throw Error("csv: need at least 2 rows");
  const double h = (xs.back() - xs.front()) / double(n - 1);
  if (!(h > 0)) throw Error("csv: x must increase");
  for (Index i = 0; i < n; ++i)
    if (std::abs(xs[i] - (xs.front() + double(i) * h)) > 1e-9 * (1 + std::abs(xs[i]))) throw Error("csv: x is not uniform");
  Gridd grid(Boxd::cube(1, xs.front() - h / 2, xs.back() + h / 2), IVec::Constant(1, n));
  return GridFunctiond(grid, Eigen::Map<Samples<double>>(fs.data(), n));
}

GridFunctiond load_grid_function(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  return ends_with(path, ".csv") ? read_csv(in) : read_gf(in);
}

void save_grid_function(const std::string& path, const GridFunctiond& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  if (ends_with(path, ".csv"))
    write_csv(out, f);
  else
    write_gf(out, f);
}

}  // namespace wsl
