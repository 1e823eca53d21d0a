#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cifeast/eigensolver.hpp"
#include "cifeast/oracle.hpp"
#include "cifeast/subspace.hpp"

namespace cifeast {

/// Exit codes shared by the subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// One solve request as read from the command line.
struct ProblemSpec {
  std::filesystem::path a_path;
  std::optional<std::filesystem::path> b_path;  // absent: B = I
  Circle circle{Complex(0.0, 0.0), 1.0};
  Scheme scheme = Scheme::Rfeast;
  std::optional<Index> subspace;  // nullopt: "auto"
  std::optional<Index> expected_count;
  int nodes = 16;
  double tolerance = 1e-8;
  double filter_tolerance = 1e-2;
  int max_iter = 10;
  std::uint64_t seed = 0;
  int count_probes = 20;
  unsigned threads = 0;
  bool write_vectors = false;
  std::filesystem::path out_dir = ".";

  /// Checks what can be checked without the matrices.
  void validate() const;
};

MatrixPencil load_pencil(const ProblemSpec& spec);

/// Subspace size for "auto": max(ceil(1.5 * estimate), 1), capped at n.
Index auto_subspace(Index estimate, Index n);

/// Resolves "auto" through estimate_count and fills a SolverConfig.
struct ResolvedConfig {
  SolverConfig config;
  std::optional<Index> estimated_count;
};
ResolvedConfig resolve_config(const ProblemSpec& spec, const MatrixPencil& pencil);

struct SolveOutcome {
  SolveReport report;
  ResolvedConfig resolved;
  Index n = 0;
  double wall_seconds = 0.0;
};

/// Loads, solves and writes eigenvalues.csv, history.csv, summary.json and,
/// when asked, eigenvectors.mtx (columns in eigenvalues.csv row order).
SolveOutcome run_solve(const ProblemSpec& spec);

/// Exit code 0 converged, 2 max_iter reached, 1 error (JSON on `err`).
int cli_solve(const ProblemSpec& spec, std::ostream& out, std::ostream& err);

struct FilterSpec {
  Circle circle{Complex(0.0, 0.0), 1.0};
  int nodes = 16;
  int r_count = 41;     // r sampled uniformly on [0, r_max]
  double r_max = 2.0;
  int theta_count = 64;  // theta_k = 2 pi k / theta_count
};

/// Writes the |f~| grid CSV to `out`.
int cli_filter(const FilterSpec& spec, std::ostream& out, std::ostream& err);

struct VerifyReport {
  Index n = 0;
  bool count_only = false;  // oracle skipped past the dense limit
  Index solver_count = 0;
  Index oracle_count = 0;   // in count-only mode: filtered count for seed + 1
  bool counts_match = false;
  Index matched = 0;
  double max_mismatch = 0.0;
  Index near_boundary = 0;
  SolveStatus status = SolveStatus::MaxIterReached;
  double res_max = 0.0;
  Index iterations = 0;
  double solver_seconds = 0.0;
  double oracle_seconds = 0.0;
  double speedup = 0.0;  // oracle_seconds / solver_seconds

  bool agrees() const;
};

/// Solves and compares against reference_solve; past `dense_limit` it falls
/// back to comparing filtered counts from two seeds.
VerifyReport run_verify(const ProblemSpec& spec, Index dense_limit = kDefaultDenseLimit);

/// JSON report on `out`; exit 0 on agreement, 2 otherwise, 1 on error.
int cli_verify(const ProblemSpec& spec, std::ostream& out, std::ostream& err,
               Index dense_limit = kDefaultDenseLimit);

struct CountReport {
  Index estimate = 0;
  double trace = 0.0;
  Index suggested_subspace = 0;
};
CountReport run_count(const ProblemSpec& spec);

/// Prints the estimate and the suggested subspace size as JSON.
int cli_count(const ProblemSpec& spec, std::ostream& out, std::ostream& err);

struct SynthSpec {
  Index n = 100;
  Index inside = 10;
  Circle circle{Complex(0.0, 0.0), 1.0};
  double conditioning = 10.0;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
};

/// Writes A.mtx, B.mtx and planted.csv (`re,im,inside`).
int cli_synth(const SynthSpec& spec, std::ostream& out, std::ostream& err);

/// `{"error": {"kind": ..., "message": ...}}`
std::string error_json(std::string_view kind, std::string_view message);

}  // namespace cifeast
