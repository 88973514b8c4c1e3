#include "lyapband/mm_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "lyapband/error.hpp"

namespace lyapband {

namespace {

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorCode::parse_error, "Matrix Market line " + std::to_string(line) + ": " + what);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

BandedMatrix read_matrix_market(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_fail(1, "empty input");
  ++line_no;
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    parse_fail(line_no, "malformed header, expected '%%MatrixMarket matrix coordinate ...'");
  }
  if (lower(field) != "real" && lower(field) != "double") {
    parse_fail(line_no, "unsupported field '" + field + "', only real is accepted");
  }
  symmetry = lower(symmetry);
  if (symmetry != "general" && symmetry != "symmetric") {
    parse_fail(line_no, "unsupported symmetry qualifier '" + symmetry + "'");
  }
  const bool sym = symmetry == "symmetric";

  long long rows = -1, cols = -1, entries = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream size_line(line);
    if (!(size_line >> rows >> cols >> entries) || rows < 0 || cols < 0 || entries < 0) {
      parse_fail(line_no, "malformed size line");
    }
    break;
  }
  if (rows < 0) parse_fail(line_no, "missing size line");
  if (rows != cols) parse_fail(line_no, "matrix is not square");
  const Index dim = static_cast<Index>(rows);

  std::vector<std::pair<Index, Index>> seen;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(sym ? 2 * entries : entries));
  long long read = 0;
  while (read < entries && std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long long i = 0, j = 0;
    std::string value_text;
    if (!(entry >> i >> j >> value_text)) parse_fail(line_no, "malformed entry");
    std::string rest;
    if (entry >> rest) parse_fail(line_no, "trailing data, only real entries are accepted");
    if (i < 1 || j < 1 || i > rows || j > cols) parse_fail(line_no, "index out of range");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument("junk");
    } catch (const std::exception&) {
      parse_fail(line_no, "malformed value '" + value_text + "'");
    }
    const Index r = static_cast<Index>(i - 1);
    const Index c = static_cast<Index>(j - 1);
    if (sym && c > r) parse_fail(line_no, "symmetric file holds an upper-triangle entry");
    seen.emplace_back(r, c);
    trip.push_back({r, c, v});
    if (sym && r != c) trip.push_back({c, r, v});
    ++read;
  }
  if (read < entries) parse_fail(line_no, "expected " + std::to_string(entries) + " entries, got " +
                                             std::to_string(read));
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
    parse_fail(line_no, "duplicate entry");
  }
  return BandedMatrix::from_triplets(dim, std::move(trip));
}

BandedMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::io_error, "cannot open '" + path + "' for reading");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const BandedMatrix& x) {
  for (double v : x.values()) {
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "write_matrix_market: non-finite value");
  }
  const bool sym = x.symmetric();
  std::size_t count = 0;
  for (Index i = 0; i < x.dim(); ++i) {
    for (Index j : x.pattern().row(i)) {
      if (!sym || j <= i) ++count;
    }
  }
  out << "%%MatrixMarket matrix coordinate real " << (sym ? "symmetric" : "general") << '\n';
  out << x.dim() << ' ' << x.dim() << ' ' << count << '\n';
  for (Index i = 0; i < x.dim(); ++i) {
    const auto c = x.pattern().row(i);
    const auto v = x.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (sym && c[k] > i) continue;
      out << i + 1 << ' ' << c[k] + 1 << ' ' << format_value(v[k]) << '\n';
    }
  }
  if (!out) fail(ErrorCode::io_error, "write_matrix_market: stream write failed");
}

void write_matrix_market(const std::string& path, const BandedMatrix& x) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io_error, "cannot open '" + path + "' for writing");
  write_matrix_market(out, x);
}

void write_pattern_market(const std::string& path, const SparsityPattern& s) {
  write_matrix_market(path, BandedMatrix(s, std::vector<double>(s.nnz(), 1.0), s.is_symmetric()));
}

}  // namespace lyapband
