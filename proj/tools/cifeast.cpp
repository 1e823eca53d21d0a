// cifeast: contour-integral eigensolver for A x = lambda B x inside a disk.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cifeast/cli.hpp"
#include "cifeast/error.hpp"

namespace {

struct CircleArgs {
  double center_re = 0.0;
  double center_im = 0.0;
  double radius = 1.0;
};

void add_circle(CLI::App& app, CircleArgs& c) {
  app.add_option("--center-re", c.center_re, "real part of the disk center");
  app.add_option("--center-im", c.center_im, "imaginary part of the disk center");
  app.add_option("--radius", c.radius, "disk radius")->required();
}

struct ProblemArgs {
  cifeast::ProblemSpec spec;
  CircleArgs circle;
  std::string scheme = "rfeast";
  std::string subspace = "auto";
  std::string b_path;
  std::size_t expected = 0;
};

void add_problem(CLI::App& app, ProblemArgs& p) {
  app.add_option("-A,--a", p.spec.a_path, "Matrix Market file for A")->required();
  app.add_option("-B,--b", p.b_path, "Matrix Market file for B (omit for B = I)");
  add_circle(app, p.circle);
  app.add_option("--scheme", p.scheme, "feast, bfeast or rfeast")
      ->check(CLI::IsMember({"feast", "bfeast", "rfeast"}))
      ->capture_default_str();
  app.add_option("--subspace", p.subspace, "subspace size t, or 'auto'")->capture_default_str();
  app.add_option("--expected-count", p.expected, "number of eigenvalues inside, when known");
  app.add_option("--nodes", p.spec.nodes, "quadrature nodes q")->capture_default_str();
  app.add_option("--eps", p.spec.tolerance, "convergence tolerance")->capture_default_str();
  app.add_option("--eta", p.spec.filter_tolerance, "residual filter for spurious pairs")
      ->capture_default_str();
  app.add_option("--max-iter", p.spec.max_iter, "iteration limit")->capture_default_str();
  app.add_option("--seed", p.spec.seed, "random seed")->capture_default_str();
  app.add_option("--probes", p.spec.count_probes, "probe vectors for the count estimate")
      ->capture_default_str();
  app.add_option("--threads", p.spec.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
}

cifeast::ProblemSpec finish(ProblemArgs& p, CLI::App& app) {
  cifeast::ProblemSpec spec = p.spec;
  if (!p.b_path.empty()) spec.b_path = p.b_path;
  spec.circle = cifeast::Circle({p.circle.center_re, p.circle.center_im}, p.circle.radius);
  spec.scheme = cifeast::parse_scheme(p.scheme);
  if (p.subspace != "auto") {
    std::size_t used = 0;
    long long t = -1;
    try {
      t = std::stoll(p.subspace, &used);
    } catch (const std::exception&) {
    }
    if (t < 1 || used != p.subspace.size())
      cifeast::fail(cifeast::ErrorKind::InvalidArgument,
                    "--subspace takes a positive integer or 'auto'");
    spec.subspace = static_cast<cifeast::Index>(t);
  }
  if (app.count("--expected-count") > 0) spec.expected_count = p.expected;
  return spec;
}

int run(int argc, char** argv) {
  CLI::App app{"Contour-integral eigensolver for A x = lambda B x inside a disk"};
  app.require_subcommand(1);

  ProblemArgs solve_args;
  auto* solve = app.add_subcommand("solve", "solve and write eigenvalues.csv, history.csv, summary.json");
  add_problem(*solve, solve_args);
  solve->add_option("--out-dir", solve_args.spec.out_dir, "output directory")->capture_default_str();
  solve->add_flag("--vectors", solve_args.spec.write_vectors, "also write eigenvectors.mtx");

  ProblemArgs verify_args;
  auto* verify = app.add_subcommand("verify", "compare the solver with a dense reference solve");
  add_problem(*verify, verify_args);
  std::size_t dense_limit = cifeast::kDefaultDenseLimit;
  verify->add_option("--dense-limit", dense_limit, "largest n for the dense reference")
      ->capture_default_str();

  ProblemArgs count_args;
  auto* count = app.add_subcommand("count", "estimate the number of eigenvalues inside");
  add_problem(*count, count_args);

  cifeast::FilterSpec filter_spec;
  CircleArgs filter_circle;
  auto* filter = app.add_subcommand("filter", "tabulate |f(mu)| of the quadrature filter as CSV");
  add_circle(*filter, filter_circle);
  filter->add_option("--nodes", filter_spec.nodes, "quadrature nodes q")->capture_default_str();
  filter->add_option("--r-count", filter_spec.r_count, "radial samples on [0, r-max]")
      ->capture_default_str();
  filter->add_option("--r-max", filter_spec.r_max, "largest radius, relative to the disk")
      ->capture_default_str();
  filter->add_option("--theta-count", filter_spec.theta_count, "angular samples")
      ->capture_default_str();

  cifeast::SynthSpec synth_spec;
  CircleArgs synth_circle;
  auto* synth = app.add_subcommand("synth", "write a random pencil with a planted spectrum");
  add_circle(*synth, synth_circle);
  synth->add_option("--n", synth_spec.n, "matrix size")->capture_default_str();
  synth->add_option("--inside", synth_spec.inside, "eigenvalues planted inside")
      ->capture_default_str();
  synth->add_option("--cond", synth_spec.conditioning, "condition number of each transform")
      ->capture_default_str();
  synth->add_option("--seed", synth_spec.seed, "random seed")->capture_default_str();
  synth->add_option("--out-dir", synth_spec.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << cifeast::error_json("UsageError", e.what()) << '\n';
    return cifeast::kExitError;
  }

  try {
    if (*solve) return cifeast::cli_solve(finish(solve_args, *solve), std::cout, std::cerr);
    if (*verify)
      return cifeast::cli_verify(finish(verify_args, *verify), std::cout, std::cerr, dense_limit);
    if (*count) return cifeast::cli_count(finish(count_args, *count), std::cout, std::cerr);
    if (*filter) {
      filter_spec.circle = cifeast::Circle({filter_circle.center_re, filter_circle.center_im},
                                           filter_circle.radius);
      return cifeast::cli_filter(filter_spec, std::cout, std::cerr);
    }
    synth_spec.circle =
        cifeast::Circle({synth_circle.center_re, synth_circle.center_im}, synth_circle.radius);
    return cifeast::cli_synth(synth_spec, std::cout, std::cerr);
  } catch (const cifeast::Error& e) {
    std::cerr << cifeast::error_json(cifeast::to_string(e.kind()), e.what()) << '\n';
    return cifeast::kExitError;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
