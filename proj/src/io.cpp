#include "cifeast/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>

#include "cifeast/error.hpp"
#include "cifeast/format.hpp"

namespace cifeast {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view token, std::size_t line) {
  std::string text(token);
  // Fortran-style exponents (1.0D+02) show up in older collection files.
  std::replace_if(text.begin(), text.end(), [](char c) { return c == 'D' || c == 'd'; }, 'e');
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec == std::errc::result_out_of_range) {
    // Subnormal or overflowing literals: fall back to strtod's IEEE rounding.
    value = std::strtod(text.c_str(), nullptr);
  } else if (ec != std::errc() || ptr != last) {
    parse_fail(line, "bad number '" + std::string(token) + "'");
  }
  return value;
}

Index parse_index(std::string_view token, std::size_t line) {
  unsigned long long value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    parse_fail(line, "bad integer '" + std::string(token) + "'");
  return static_cast<Index>(value);
}

// Reads the next line that is neither blank nor a comment.
bool next_data_line(std::istream& in, std::string& line, std::size_t& number) {
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '%') continue;
    return true;
  }
  return false;
}

bool parse_flag(std::string_view token, std::size_t line) {
  if (token == "1" || token == "true") return true;
  if (token == "0" || token == "false") return false;
  parse_fail(line, "bad flag '" + std::string(token) + "'");
}

}  // namespace

MatrixMarketData parse_matrix_market(std::istream& in, Index dense_limit) {
  std::string line;
  std::size_t number = 0;
  if (!std::getline(in, line)) parse_fail(1, "empty input");
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto banner = split_ws(line);
  if (banner.size() != 5 || lower(banner[0]) != "%%matrixmarket")
    parse_fail(number, "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  if (lower(banner[1]) != "matrix") parse_fail(number, "only 'matrix' objects are supported");

  MatrixMarketData data;
  MatrixMarketHeader& h = data.header;
  h.format = lower(banner[2]);
  h.field = lower(banner[3]);
  h.symmetry = lower(banner[4]);
  if (h.format != "coordinate" && h.format != "array")
    parse_fail(number, "unknown format '" + std::string(banner[2]) + "'");
  if (h.field == "pattern" || h.field == "integer")
    fail(ErrorKind::UnsupportedField,
         "line " + std::to_string(number) + ": field '" + h.field + "' is not supported");
  if (h.field != "real" && h.field != "complex")
    parse_fail(number, "unknown field '" + std::string(banner[3]) + "'");
  if (h.symmetry != "general" && h.symmetry != "symmetric" && h.symmetry != "hermitian" &&
      h.symmetry != "skew-symmetric")
    parse_fail(number, "unknown symmetry '" + std::string(banner[4]) + "'");
  if (h.symmetry == "hermitian" && h.field != "complex")
    parse_fail(number, "hermitian symmetry needs a complex field");

  if (!next_data_line(in, line, number)) parse_fail(number + 1, "missing size line");
  const auto size = split_ws(line);
  const bool coordinate = h.format == "coordinate";
  if (size.size() != (coordinate ? 3u : 2u)) parse_fail(number, "malformed size line");
  h.rows = parse_index(size[0], number);
  h.cols = parse_index(size[1], number);
  const bool symmetric_storage = h.symmetry != "general";
  if (symmetric_storage && h.rows != h.cols)
    parse_fail(number, "symmetric storage needs a square matrix");
  if (h.rows > dense_limit || h.cols > dense_limit)
    fail(ErrorKind::DenseLimitExceeded,
         "matrix is " + std::to_string(h.rows) + "x" + std::to_string(h.cols) +
             ", above the dense limit " + std::to_string(dense_limit) +
             "; this tool densifies every input");
  const bool skew = h.symmetry == "skew-symmetric";
  if (coordinate) {
    h.entries = parse_index(size[2], number);
  } else if (!symmetric_storage) {
    h.entries = h.rows * h.cols;
  } else {
    h.entries = skew ? h.rows * (h.rows - 1) / 2 : h.rows * (h.rows + 1) / 2;
  }

  DenseMatrix& m = data.matrix;
  m = DenseMatrix(h.rows, h.cols);
  const bool complex_field = h.field == "complex";
  const std::size_t values = complex_field ? 2 : 1;

  // First write assigns so that signed zeros survive; duplicates then add up.
  std::vector<bool> seen(h.rows * h.cols, false);
  auto put = [&](Index i, Index j, Complex v) {
    const Index k = i + j * h.rows;
    m(i, j) = seen[k] ? m(i, j) + v : v;
    seen[k] = true;
  };
  auto place = [&](Index i, Index j, Complex v, std::size_t at) {
    if (skew && i == j) parse_fail(at, "skew-symmetric storage has no diagonal");
    put(i, j, v);
    if (i == j || !symmetric_storage) return;
    if (h.symmetry == "symmetric") put(j, i, v);
    if (h.symmetry == "hermitian") put(j, i, std::conj(v));
    if (skew) put(j, i, -v);
  };

  // Array storage walks columns; symmetric variants keep the lower triangle.
  Index col = 0;
  Index row = symmetric_storage ? (skew ? 1 : 0) : 0;
  for (Index k = 0; k < h.entries; ++k) {
    if (!next_data_line(in, line, number))
      parse_fail(number + 1, "expected " + std::to_string(h.entries) + " entries, found " +
                                 std::to_string(k));
    const auto tok = split_ws(line);
    const std::size_t want = (coordinate ? 2 : 0) + values;
    if (tok.size() != want)
      parse_fail(number, "expected " + std::to_string(want) + " fields, found " +
                             std::to_string(tok.size()));
    Index i = 0;
    Index j = 0;
    std::size_t v0 = 0;
    if (coordinate) {
      i = parse_index(tok[0], number);
      j = parse_index(tok[1], number);
      if (i < 1 || i > h.rows || j < 1 || j > h.cols) parse_fail(number, "index out of range");
      --i;
      --j;
      v0 = 2;
    } else {
      i = row;
      j = col;
      if (++row == h.rows) {
        ++col;
        row = symmetric_storage ? col + (skew ? 1 : 0) : 0;
      }
    }
    const double re = parse_real(tok[v0], number);
    const double im = complex_field ? parse_real(tok[v0 + 1], number) : 0.0;
    if (h.symmetry == "hermitian" && i == j && im != 0.0)
      parse_fail(number, "hermitian diagonal must be real");
    place(i, j, Complex(re, im), number);
  }
  if (next_data_line(in, line, number)) parse_fail(number, "unexpected data after the last entry");
  return data;
}

DenseMatrix read_matrix_market(const std::filesystem::path& path, Index dense_limit) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path.string() + "'");
  try {
    return parse_matrix_market(in, dense_limit).matrix;
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_matrix_market(std::ostream& out, const DenseMatrix& m) {
  const bool real = m.is_real();
  out << "%%MatrixMarket matrix array " << (real ? "real" : "complex") << " general\n";
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      out << format_double(m(i, j).real());
      if (!real) out << ' ' << format_double(m(i, j).imag());
      out << '\n';
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  write_matrix_market(out, m);
  if (!out) fail(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

std::vector<EigenvalueRow> eigenvalue_rows(const SolveReport& report) {
  std::vector<EigenvalueRow> rows;
  for (const Eigenpair& p : report.inside_pairs())
    rows.push_back({p.value.real(), p.value.imag(), p.residual, p.inside, p.filtered});
  std::stable_sort(rows.begin(), rows.end(), [](const EigenvalueRow& a, const EigenvalueRow& b) {
    return a.re != b.re ? a.re < b.re : a.im < b.im;
  });
  return rows;
}

void write_eigenvalues_csv(std::ostream& out, const std::vector<EigenvalueRow>& rows) {
  out << "re,im,residual,inside,filtered\n";
  for (const auto& r : rows)
    out << format_double(r.re) << ',' << format_double(r.im) << ',' << format_double(r.residual)
        << ',' << (r.inside ? 1 : 0) << ',' << (r.filtered ? 1 : 0) << '\n';
}

std::vector<EigenvalueRow> read_eigenvalues_csv(std::istream& in) {
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line) || line != "re,im,residual,inside,filtered")
    parse_fail(number, "expected header 're,im,residual,inside,filtered'");
  std::vector<EigenvalueRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 5) parse_fail(number, "expected 5 fields");
    rows.push_back({parse_real(f[0], number), parse_real(f[1], number), parse_real(f[2], number),
                    parse_flag(f[3], number), parse_flag(f[4], number)});
  }
  return rows;
}

void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history) {
  out << "iter,res_max,filtered_count\n";
  for (const auto& h : history)
    out << h.iteration << ',' << format_double(h.res_max) << ',' << h.filtered_count << '\n';
}

std::vector<HistoryRow> read_history_csv(std::istream& in) {
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line) || line != "iter,res_max,filtered_count")
    parse_fail(number, "expected header 'iter,res_max,filtered_count'");
  std::vector<HistoryRow> rows;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 3) parse_fail(number, "expected 3 fields");
    rows.push_back({parse_index(f[0], number), parse_real(f[1], number), parse_index(f[2], number)});
  }
  return rows;
}

FilterGrid read_filter_csv(std::istream& in) {
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line) || line != "r,theta,abs_f,log10_abs_f")
    parse_fail(number, "expected header 'r,theta,abs_f,log10_abs_f'");
  FilterGrid grid;
  std::vector<double> rs;
  std::vector<double> thetas;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 4) parse_fail(number, "expected 4 fields");
    rs.push_back(parse_real(f[0], number));
    thetas.push_back(parse_real(f[1], number));
    const double v = parse_real(f[2], number);
    grid.abs_values.push_back(v);
    grid.pole_flags.push_back(std::isinf(v));
  }
  // r-major layout: theta repeats within each r block.
  for (std::size_t k = 0; k < thetas.size() && (k == 0 || rs[k] == rs[0]); ++k)
    grid.theta_samples.push_back(thetas[k]);
  const std::size_t per_row = grid.theta_samples.size();
  if (per_row == 0) return grid;
  if (rs.size() % per_row != 0) parse_fail(number, "rows do not form a complete grid");
  for (std::size_t k = 0; k < rs.size(); k += per_row) grid.r_samples.push_back(rs[k]);
  for (std::size_t k = 0; k < rs.size(); ++k) {
    if (rs[k] != grid.r_samples[k / per_row] || thetas[k] != grid.theta_samples[k % per_row])
      parse_fail(k + 2, "rows do not form a complete grid");
  }
  return grid;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) fail(ErrorKind::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace cifeast
