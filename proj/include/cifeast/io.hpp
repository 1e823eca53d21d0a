#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cifeast/contour.hpp"
#include "cifeast/eigensolver.hpp"
#include "cifeast/matrix.hpp"

namespace cifeast {

/// Largest dimension the reader will densify.
inline constexpr Index kReadDenseLimit = 8192;

struct MatrixMarketHeader {
  std::string format;    // coordinate | array
  std::string field;     // real | complex
  std::string symmetry;  // general | symmetric | hermitian | skew-symmetric
  Index rows = 0;
  Index cols = 0;
  Index entries = 0;  // stored entries as declared by the size line
};

struct MatrixMarketData {
  MatrixMarketHeader header;
  DenseMatrix matrix;
};

/// Coordinate or array files, real or complex, with symmetric, hermitian and
/// skew-symmetric storage expanded. Duplicate coordinate entries are summed.
/// Errors: ParseError (message carries the line number), UnsupportedField for
/// pattern/integer, DenseLimitExceeded past `dense_limit`. A file that cannot
/// be opened is reported as a ParseError too.
MatrixMarketData parse_matrix_market(std::istream& in, Index dense_limit = kReadDenseLimit);
DenseMatrix read_matrix_market(const std::filesystem::path& path,
                               Index dense_limit = kReadDenseLimit);

/// Array format, general symmetry, 17 significant digits; `real` field when
/// every imaginary part is zero.
void write_matrix_market(std::ostream& out, const DenseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const DenseMatrix& m);

// Result files ---------------------------------------------------------------

struct EigenvalueRow {
  double re = 0.0;
  double im = 0.0;
  double residual = 0.0;
  bool inside = false;
  bool filtered = false;
};

/// Rows of eigenvalues.csv: the inside pairs, sorted by (re, im).
std::vector<EigenvalueRow> eigenvalue_rows(const SolveReport& report);

/// Header `re,im,residual,inside,filtered`; flags as 0/1.
void write_eigenvalues_csv(std::ostream& out, const std::vector<EigenvalueRow>& rows);
std::vector<EigenvalueRow> read_eigenvalues_csv(std::istream& in);

/// Header `iter,res_max,filtered_count`.
void write_history_csv(std::ostream& out, const std::vector<IterationRecord>& history);

struct HistoryRow {
  Index iteration = 0;
  double res_max = 0.0;
  Index filtered_count = 0;
};
std::vector<HistoryRow> read_history_csv(std::istream& in);

/// Reloads the output of write_filter_csv. Pole cells come back flagged.
FilterGrid read_filter_csv(std::istream& in);

/// Reads the whole file; IoError when it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cifeast
