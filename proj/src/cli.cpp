#include "cifeast/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cifeast/contour.hpp"
#include "cifeast/error.hpp"
#include "cifeast/format.hpp"
#include "cifeast/io.hpp"
#include "json.hpp"

namespace cifeast {
namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Non-finite values have no JSON literal; they become null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

int report_error(std::ostream& err, std::string_view kind, std::string_view message) {
  err << error_json(kind, message) << '\n';
  return kExitError;
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return report_error(err, to_string(e.kind()), e.what());
  } catch (const std::exception& e) {
    return report_error(err, "InternalError", e.what());
  }
}

Json config_json(const ProblemSpec& spec, const ResolvedConfig& resolved) {
  const SolverConfig& c = resolved.config;
  Json j;
  j["a"] = spec.a_path.string();
  j["b"] = spec.b_path ? Json(spec.b_path->string()) : Json(nullptr);
  j["scheme"] = std::string(to_string(c.scheme));
  j["center"] = {c.contour.center.real(), c.contour.center.imag()};
  j["radius"] = c.contour.radius;
  j["subspace"] = c.subspace;
  j["subspace_mode"] = spec.subspace ? "fixed" : "auto";
  j["expected_count"] = c.expected_count ? Json(*c.expected_count) : Json(nullptr);
  j["nodes"] = c.nodes;
  j["eps"] = c.tolerance;
  j["eta"] = c.filter_tolerance;
  j["max_iter"] = c.max_iter;
  j["seed"] = c.seed;
  return j;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::IoError, "cannot create '" + dir.string() + "': " + ec.message());
}

Index filtered_count(const SolveReport& report) {
  Index k = 0;
  for (const auto& p : report.pairs) k += p.filtered ? 1 : 0;
  return k;
}

Index converged_count(const SolveReport& report) {
  Index k = 0;
  for (const auto& p : report.pairs) k += p.converged ? 1 : 0;
  return k;
}

double last_res(const SolveReport& report) {
  return report.history.empty() ? std::numeric_limits<double>::infinity()
                                : report.history.back().res_max;
}

}  // namespace

void ProblemSpec::validate() const {
  if (a_path.empty()) fail(ErrorKind::InvalidArgument, "a matrix file for A is required");
  if (nodes < 2 || nodes > kMaxQuadratureNodes)
    fail(ErrorKind::InvalidArgument, "nodes must lie in [2, 512]");
  if (!(tolerance >= 0.0 && tolerance < filter_tolerance))
    fail(ErrorKind::InvalidArgument, "need 0 <= eps < eta");
  if (max_iter < 0) fail(ErrorKind::InvalidArgument, "max-iter must be >= 0");
  if (subspace && *subspace == 0) fail(ErrorKind::InvalidArgument, "subspace must be >= 1");
  if (count_probes < 1) fail(ErrorKind::InvalidArgument, "probes must be >= 1");
}

MatrixPencil load_pencil(const ProblemSpec& spec) {
  DenseMatrix a = read_matrix_market(spec.a_path);
  if (a.rows() != a.cols())
    fail(ErrorKind::DimensionMismatch, spec.a_path.string() + " is not square");
  if (!spec.b_path) return MatrixPencil::standard(std::move(a));
  DenseMatrix b = read_matrix_market(*spec.b_path);
  if (b.rows() != a.rows() || b.cols() != a.cols())
    fail(ErrorKind::DimensionMismatch, "A and B have different sizes");
  return MatrixPencil(std::move(a), std::move(b));
}

Index auto_subspace(Index estimate, Index n) {
  const Index t = std::max<Index>((3 * estimate + 1) / 2, 1);
  return std::min(t, n);
}

ResolvedConfig resolve_config(const ProblemSpec& spec, const MatrixPencil& pencil) {
  spec.validate();
  ResolvedConfig out;
  SolverConfig& c = out.config;
  c.contour = spec.circle;
  c.nodes = spec.nodes;
  c.tolerance = spec.tolerance;
  c.filter_tolerance = spec.filter_tolerance;
  c.max_iter = spec.max_iter;
  c.seed = spec.seed;
  c.scheme = spec.scheme;
  c.parallel.threads = spec.threads;
  c.expected_count = spec.expected_count;
  if (spec.subspace) {
    c.subspace = *spec.subspace;
  } else if (spec.expected_count) {
    c.subspace = auto_subspace(*spec.expected_count, pencil.size());
  } else {
    const ContourRule rule = build_rule(spec.circle, spec.nodes);
    const Index estimate =
        estimate_count(pencil, rule, spec.count_probes, spec.seed, c.parallel);
    out.estimated_count = estimate;
    c.subspace = auto_subspace(estimate, pencil.size());
  }
  c.validate(pencil.size());
  return out;
}

SolveOutcome run_solve(const ProblemSpec& spec) {
  spec.validate();
  const auto start = Clock::now();
  const MatrixPencil pencil = load_pencil(spec);
  SolveOutcome out;
  out.n = pencil.size();
  out.resolved = resolve_config(spec, pencil);
  out.report = solve(pencil, out.resolved.config);
  out.wall_seconds = seconds_since(start);

  ensure_dir(spec.out_dir);
  const auto rows = eigenvalue_rows(out.report);
  {
    std::ostringstream csv;
    write_eigenvalues_csv(csv, rows);
    write_text_file(spec.out_dir / "eigenvalues.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_history_csv(csv, out.report.history);
    write_text_file(spec.out_dir / "history.csv", csv.str());
  }
  if (spec.write_vectors) {
    const EigenpairSet inside = out.report.inside_pairs();
    DenseMatrix x(out.n, inside.size());
    for (Index j = 0; j < inside.size(); ++j) x.set_column(j, inside[j].vector);
    write_matrix_market(spec.out_dir / "eigenvectors.mtx", x);
  }

  Json summary;
  summary["scheme"] = std::string(to_string(out.report.scheme));
  summary["status"] = std::string(to_string(out.report.status));
  summary["exit_code"] =
      out.report.status == SolveStatus::Converged ? kExitOk : kExitNotConverged;
  summary["n"] = out.n;
  summary["iterations"] = out.report.iterations;
  summary["res_max"] = number(last_res(out.report));
  summary["inside_count"] = rows.size();
  summary["filtered_count"] = filtered_count(out.report);
  summary["converged_count"] = converged_count(out.report);
  summary["singular_nodes"] = out.report.singular_nodes;
  summary["estimated_count"] =
      out.resolved.estimated_count ? Json(*out.resolved.estimated_count) : Json(nullptr);
  summary["wall_time_seconds"] = out.wall_seconds;
  summary["config"] = config_json(spec, out.resolved);
  Json values = Json::array();
  for (const auto& r : rows) {
    if (r.filtered) values.push_back({r.re, r.im});
  }
  summary["filtered_eigenvalues"] = values;
  write_text_file(spec.out_dir / "summary.json", summary.dump(2) + "\n");
  return out;
}

int cli_solve(const ProblemSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SolveOutcome o = run_solve(spec);
    out << to_string(o.report.status) << ": " << filtered_count(o.report)
        << " filtered eigenvalues after " << o.report.iterations << " iterations, Res "
        << format_double(last_res(o.report)) << '\n';
    return o.report.status == SolveStatus::Converged ? kExitOk : kExitNotConverged;
  });
}

int cli_filter(const FilterSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (spec.r_count < 1 || spec.theta_count < 1 || !(spec.r_max >= 0.0))
      fail(ErrorKind::InvalidArgument, "grid needs r-count >= 1, theta-count >= 1, r-max >= 0");
    const ContourRule rule = build_rule(spec.circle, spec.nodes);
    std::vector<double> rs(spec.r_count);
    for (int i = 0; i < spec.r_count; ++i)
      rs[i] = spec.r_count == 1 ? 0.0 : spec.r_max * i / (spec.r_count - 1);
    std::vector<double> thetas(spec.theta_count);
    for (int k = 0; k < spec.theta_count; ++k)
      thetas[k] = 2.0 * std::numbers::pi * k / spec.theta_count;
    write_filter_csv(out, filter_grid(rule, rs, thetas));
    return kExitOk;
  });
}

bool VerifyReport::agrees() const {
  if (!counts_match) return false;
  return count_only || matched == solver_count;
}

VerifyReport run_verify(const ProblemSpec& spec, Index dense_limit) {
  spec.validate();
  const MatrixPencil pencil = load_pencil(spec);
  VerifyReport r;
  r.n = pencil.size();
  const ResolvedConfig resolved = resolve_config(spec, pencil);

  auto start = Clock::now();
  const SolveReport report = solve(pencil, resolved.config);
  r.solver_seconds = seconds_since(start);
  r.status = report.status;
  r.res_max = last_res(report);
  r.iterations = static_cast<Index>(report.iterations);
  r.solver_count = filtered_count(report);

  if (r.n > dense_limit) {
    r.count_only = true;
    SolverConfig second = resolved.config;
    second.seed = spec.seed + 1;
    r.oracle_count = filtered_count(solve(pencil, second));
    r.counts_match = r.oracle_count == r.solver_count;
    return r;
  }

  start = Clock::now();
  const ReferenceSpectrum ref = reference_solve(pencil, {dense_limit, false});
  r.oracle_seconds = seconds_since(start);
  r.speedup = r.solver_seconds > 0.0 ? r.oracle_seconds / r.solver_seconds : 0.0;
  r.oracle_count = count_inside(ref, spec.circle);
  r.near_boundary = count_near_boundary(ref, spec.circle);
  r.counts_match = r.oracle_count == r.solver_count;

  std::vector<Complex> found;
  for (const auto& p : report.pairs)
    if (p.filtered) found.push_back(p.value);
  std::vector<Complex> inside;
  for (const Complex v : ref.values)
    if (spec.circle.contains(v)) inside.push_back(v);
  const double scale = std::max(1.0, std::abs(spec.circle.center) + spec.circle.radius);
  const SpectrumMatch m = match_spectra(found, inside, kMatchRadius * scale);
  r.matched = m.matched;
  r.max_mismatch = m.max_distance;
  return r;
}

int cli_verify(const ProblemSpec& spec, std::ostream& out, std::ostream& err, Index dense_limit) {
  return guarded(err, [&] {
    const VerifyReport r = run_verify(spec, dense_limit);
    Json j;
    j["n"] = r.n;
    j["mode"] = r.count_only ? "count-only" : "oracle";
    j["solver_count"] = r.solver_count;
    j[r.count_only ? "second_seed_count" : "oracle_count"] = r.oracle_count;
    j["counts_match"] = r.counts_match;
    if (!r.count_only) {
      j["matched"] = r.matched;
      j["max_mismatch"] = number(r.max_mismatch);
      j["oracle_near_boundary"] = r.near_boundary;
      j["oracle_seconds"] = r.oracle_seconds;
      j["speedup"] = r.speedup;
    }
    j["status"] = std::string(to_string(r.status));
    j["iterations"] = r.iterations;
    j["res_max"] = number(r.res_max);
    j["solver_seconds"] = r.solver_seconds;
    j["agrees"] = r.agrees();
    out << j.dump(2) << '\n';
    return r.agrees() ? kExitOk : kExitNotConverged;
  });
}

CountReport run_count(const ProblemSpec& spec) {
  spec.validate();
  const MatrixPencil pencil = load_pencil(spec);
  const ContourRule rule = build_rule(spec.circle, spec.nodes);
  const ShiftedFactorCache cache = build_cache(pencil, rule, {spec.threads});
  CountReport r;
  r.trace = estimate_trace(cache, pencil, spec.count_probes, spec.seed);
  r.estimate = estimate_count(cache, pencil, spec.count_probes, spec.seed);
  r.suggested_subspace = auto_subspace(r.estimate, pencil.size());
  return r;
}

int cli_count(const ProblemSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CountReport r = run_count(spec);
    Json j;
    j["estimated_count"] = r.estimate;
    j["trace"] = r.trace;
    j["probes"] = spec.count_probes;
    j["suggested_subspace"] = r.suggested_subspace;
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int cli_synth(const SynthSpec& spec, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SyntheticPencil syn =
        make_disk_synthetic(spec.n, spec.inside, spec.circle, spec.conditioning, spec.seed);
    ensure_dir(spec.out_dir);
    write_matrix_market(spec.out_dir / "A.mtx", syn.a);
    write_matrix_market(spec.out_dir / "B.mtx", syn.b);
    std::ostringstream csv;
    csv << "re,im,inside\n";
    for (const Complex v : syn.planted())
      csv << format_double(v.real()) << ',' << format_double(v.imag()) << ','
          << (spec.circle.contains(v) ? 1 : 0) << '\n';
    write_text_file(spec.out_dir / "planted.csv", csv.str());
    Json j;
    j["n"] = spec.n;
    j["inside"] = syn.inside_count(spec.circle);
    j["out_dir"] = spec.out_dir.string();
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

std::string error_json(std::string_view kind, std::string_view message) {
  Json j;
  j["error"] = {{"kind", std::string(kind)}, {"message", std::string(message)}};
  return j.dump(-1, ' ', false, Json::error_handler_t::replace);
}

}  // namespace cifeast
