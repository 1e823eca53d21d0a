#include <algorithm>
#include <cmath>
#include <random>

#include "cifeast/eigensolver.hpp"
#include "cifeast/error.hpp"
#include "cifeast/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cifeast;
using cifeast::testing::random_hermitian;
using cifeast::testing::random_hpd;
using cifeast::testing::random_matrix;

namespace {

DenseMatrix laplacian(Index n) {
  DenseMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = 2.0;
    if (i + 1 < n) m(i, i + 1) = m(i + 1, i) = -1.0;
  }
  return m;
}

SolverConfig config_for(const Circle& c, Index t, Scheme scheme, std::uint64_t seed = 1) {
  SolverConfig cfg;
  cfg.contour = c;
  cfg.subspace = t;
  cfg.scheme = scheme;
  cfg.seed = seed;
  return cfg;
}

std::vector<Complex> converged_values(const SolveReport& rep) {
  std::vector<Complex> out;
  for (const auto& p : rep.pairs)
    if (p.converged) out.push_back(p.value);
  return out;
}

std::vector<Complex> inside_reference(const MatrixPencil& p, const Circle& c) {
  std::vector<Complex> out;
  for (const Complex v : reference_solve(p).values)
    if (std::isfinite(v.real()) && c.contains(v)) out.push_back(v);
  return out;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_CASE("rfeast on diag(0.2, 0.5, 5) finds the two inside eigenvalues") {
  const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(std::vector<Complex>{0.2, 0.5, 5.0}));
  for (Scheme scheme : {Scheme::Rfeast, Scheme::Bfeast}) {
    const SolveReport rep = solve(p, config_for(Circle({0.0, 0.0}, 1.0), 3, scheme));
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.iterations <= 2);
    const auto inside = rep.inside_pairs();
    REQUIRE(inside.size() == 2);
    CHECK(std::abs(inside[0].value - 0.2) <= 1e-12);
    CHECK(std::abs(inside[1].value - 0.5) <= 1e-12);
    for (const auto& pr : inside) {
      CHECK(pr.residual < 1e-12);
      CHECK(pr.filtered);
      CHECK(pr.converged);
    }
    // The third candidate is the outside eigenvalue 5.
    CHECK(rep.pairs.size() == 3);
    CHECK_FALSE(rep.pairs.back().inside);
  }
}

TEST_CASE("Laplacian pencil: rfeast matches the dense reference inside the disk") {
  const Index n = 100;
  const MatrixPencil p = MatrixPencil::standard(laplacian(n));
  auto lambda = [n](int k) { return 2.0 - 2.0 * std::cos(k * std::numbers::pi / (n + 1.0)); };
  const double upper = 0.5 * (lambda(10) + lambda(11));
  const Circle c({0.5 * upper, 0.0}, 0.5 * upper);
  const auto truth = inside_reference(p, c);
  REQUIRE(truth.size() == 10);
  for (Scheme scheme : {Scheme::Rfeast, Scheme::Bfeast, Scheme::Feast}) {
    const SolveReport rep = solve(p, config_for(c, 15, scheme, 4));
    CHECK(rep.status == SolveStatus::Converged);
    const auto got = converged_values(rep);
    INFO("scheme " << to_string(scheme));
    CHECK(got.size() == 10);
    CHECK(testing::matched_distance(got, truth) <= 1e-8);
  }
}

TEST_CASE("rfeast on a 200x200 pencil with planted Jordan blocks") {
  const Circle c({0.0, 0.0}, 1.0);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<JordanBlock> blocks;
  Index inside = 0;
  // 16 simple + two 2x2 Jordan blocks inside: s = 20.
  for (int i = 0; i < 16; ++i)
    blocks.push_back({std::polar(0.8 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng)), 1});
  blocks.push_back({Complex(0.3, 0.1), 2});
  blocks.push_back({Complex(-0.4, -0.35), 2});
  for (const auto& b : blocks) inside += b.size;
  REQUIRE(inside == 20);
  while (inside + blocks.size() - 18 < 200)
    blocks.push_back({std::polar(1.3 + 1.7 * u(rng), 2.0 * std::numbers::pi * u(rng)), 1});
  const SyntheticPencil syn = make_synthetic(blocks, {}, 200, 10.0, 9);
  REQUIRE(syn.inside_count(c) == 20);

  SolverConfig cfg = config_for(c, 24, Scheme::Rfeast, 2);
  cfg.expected_count = 20;
  const SolveReport rep = rfeast(syn.pencil(), cfg);
  CHECK(rep.status == SolveStatus::Converged);

  // A 2x2 Jordan block comes back as a split pair lambda +- delta with delta
  // of order sqrt(residual); the pair's mean is accurate to first order.
  std::vector<Complex> got = converged_values(rep);
  CHECK(got.size() >= 20);
  std::vector<Complex> simple;
  for (int i = 0; i < 16; ++i) simple.push_back(blocks[static_cast<std::size_t>(i)].value);
  const SpectrumMatch simple_match = match_spectra(simple, got, 1e-8);
  CHECK(simple_match.matched == 16);
  for (const Complex lambda : {Complex(0.3, 0.1), Complex(-0.4, -0.35)}) {
    std::vector<Complex> near;
    for (const Complex v : simple_match.unmatched_right)
      if (std::abs(v - lambda) <= 1e-3) near.push_back(v);
    REQUIRE(near.size() == 2);
    CHECK(std::abs(near[0] - lambda) <= 1e-4);
    CHECK(std::abs(near[1] - lambda) <= 1e-4);
    CHECK(std::abs(0.5 * (near[0] + near[1]) - lambda) <= 1e-8);
  }

  // Res decreases monotonically once it is defined.
  double previous = std::numeric_limits<double>::infinity();
  for (const auto& rec : rep.history) {
    if (!std::isfinite(rec.res_max)) continue;
    CHECK(rec.res_max <= previous);
    previous = rec.res_max;
  }
}

TEST_CASE("bfeast and feast agree on a Hermitian problem with B = I") {
  const MatrixPencil p = MatrixPencil::standard(random_hermitian(60, 12));
  const Circle c({0.0, 0.0}, 2.0);
  const Index s = inside_reference(p, c).size();
  REQUIRE(s > 0);
  const Index t = static_cast<Index>(std::ceil(1.5 * static_cast<double>(s)));
  const SolveReport fe = feast_hermitian(p, config_for(c, t, Scheme::Feast));
  const SolveReport bf = bfeast(p, config_for(c, t, Scheme::Bfeast));
  CHECK(testing::matched_distance(converged_values(fe), converged_values(bf)) <= 1e-10);
}

TEST_CASE("feast on diag(1..10) with the circle around [2.5, 6.5]") {
  std::vector<Complex> d;
  for (int i = 1; i <= 10; ++i) d.push_back(static_cast<double>(i));
  const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(d));
  const SolveReport rep = feast_hermitian(p, config_for(Circle({4.5, 0.0}, 2.0), 6, Scheme::Feast));
  CHECK(rep.status == SolveStatus::Converged);
  const auto inside = rep.inside_pairs();
  REQUIRE(inside.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(inside[static_cast<std::size_t>(i)].value - (3.0 + i)) <= 1e-12);
}

TEST_CASE("feast matches the dense reference on random Hermitian problems") {
  const Circle c({0.3, 0.0}, 1.5);
  SUBCASE("B = I, n = 80") {
    const MatrixPencil p = MatrixPencil::standard(random_hermitian(80, 31));
    const auto truth = inside_reference(p, c);
    const SolveReport rep =
        feast_hermitian(p, config_for(c, static_cast<Index>(std::ceil(1.5 * truth.size())), Scheme::Feast));
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(testing::matched_distance(converged_values(rep), truth) <= 1e-9);
  }
  SUBCASE("Hermitian positive definite B") {
    const MatrixPencil p(random_hermitian(80, 32), random_hpd(80, 33));
    REQUIRE(p.b_definite());
    const auto truth = inside_reference(p, c);
    REQUIRE(!truth.empty());
    const SolveReport rep =
        feast_hermitian(p, config_for(c, static_cast<Index>(std::ceil(1.5 * truth.size())), Scheme::Feast));
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(testing::matched_distance(converged_values(rep), truth) <= 1e-9);
  }
}

TEST_CASE("feast rejects non-Hermitian pencils and off-axis centers") {
  const MatrixPencil general = MatrixPencil::standard(random_matrix(10, 10, 1));
  CHECK(kind_of([&] { feast_hermitian(general, config_for(Circle({0.0, 0.0}, 1.0), 3, Scheme::Feast)); }) ==
        ErrorKind::NotHermitian);
  DenseMatrix indefinite = DenseMatrix::identity(10);
  indefinite(0, 0) = -1.0;
  const MatrixPencil indef(random_hermitian(10, 2), indefinite);
  CHECK(kind_of([&] { feast_hermitian(indef, config_for(Circle({0.0, 0.0}, 1.0), 3, Scheme::Feast)); }) ==
        ErrorKind::NotHermitian);
  const MatrixPencil herm = MatrixPencil::standard(random_hermitian(10, 3));
  CHECK(kind_of([&] { feast_hermitian(herm, config_for(Circle({0.0, 0.5}, 1.0), 3, Scheme::Feast)); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("solver configuration is validated") {
  const MatrixPencil p = MatrixPencil::standard(DenseMatrix::identity(5));
  const Circle c({0.0, 0.0}, 2.0);
  SolverConfig cfg = config_for(c, 0, Scheme::Rfeast);
  CHECK(kind_of([&] { rfeast(p, cfg); }) == ErrorKind::InvalidArgument);
  cfg.subspace = 6;
  CHECK(kind_of([&] { rfeast(p, cfg); }) == ErrorKind::InvalidArgument);
  cfg.subspace = 2;
  cfg.tolerance = 1e-2;
  CHECK(kind_of([&] { rfeast(p, cfg); }) == ErrorKind::InvalidArgument);
  cfg.tolerance = 1e-8;
  cfg.nodes = 1;
  CHECK(kind_of([&] { rfeast(p, cfg); }) == ErrorKind::InvalidArgument);
  cfg.nodes = 16;
  CHECK(kind_of([&] { rfeast(p, cfg, DenseMatrix(5, 3)); }) == ErrorKind::DimensionMismatch);
  CHECK(parse_scheme("bfeast") == Scheme::Bfeast);
  CHECK(kind_of([] { parse_scheme("qz"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("max_iter = 0 reports MaxIterReached with no pairs") {
  const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(std::vector<Complex>{0.1, 3.0}));
  SolverConfig cfg = config_for(Circle({0.0, 0.0}, 1.0), 1, Scheme::Rfeast);
  cfg.max_iter = 0;
  const SolveReport rep = rfeast(p, cfg);
  CHECK(rep.status == SolveStatus::MaxIterReached);
  CHECK(rep.iterations == 0);
  CHECK(rep.pairs.empty());
  CHECK(rep.history.empty());
}

TEST_CASE("subspace collapse below the expected count throws") {
  const MatrixPencil p =
      MatrixPencil::standard(DenseMatrix::diagonal(std::vector<Complex>{0.1, 0.2, 1e4, 2e4, 3e4}));
  SolverConfig cfg = config_for(Circle({0.0, 0.0}, 1.0), 3, Scheme::Rfeast);
  cfg.expected_count = 3;
  CHECK(kind_of([&] { rfeast(p, cfg); }) == ErrorKind::SubspaceCollapse);
}

TEST_CASE("a supplied starting block is used as is") {
  const MatrixPencil p(random_matrix(30, 30, 70, false), random_hpd(30, 71));
  const Circle c({0.0, 0.0}, 0.8);
  SolverConfig cfg = config_for(c, 6, Scheme::Bfeast, 5);
  const DenseMatrix y0 = random_matrix(30, 6, 72, false);
  const SolveReport a = bfeast(p, cfg, y0);
  cfg.seed = 99;  // BFEAST draws nothing else from the generator
  const SolveReport b = bfeast(p, cfg, y0);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i].value == b.pairs[i].value);
}

TEST_CASE("eigenvectors are unit norm with a real positive leading entry") {
  const MatrixPencil p(random_matrix(40, 40, 80), random_matrix(40, 40, 81));
  const SolveReport rep = rfeast(p, config_for(Circle({0.0, 0.0}, 0.6), 8, Scheme::Rfeast));
  REQUIRE(!rep.pairs.empty());
  for (const auto& pr : rep.pairs) {
    CHECK(std::abs(norm2(pr.vector) - 1.0) <= 1e-13);
    double peak = 0.0;
    for (const Complex v : pr.vector) peak = std::max(peak, std::abs(v));
    for (const Complex v : pr.vector) {
      if (std::abs(v) > 1e-8 * peak) {
        CHECK(v.imag() == 0.0);
        CHECK(v.real() > 0.0);
        break;
      }
    }
    // Stored residual is recomputable from the stored fields.
    if (std::isfinite(pr.value.real()))
      CHECK(std::abs(compute_residual(p, pr.value, pr.vector) - pr.residual) <=
            1e-14 + 1e-10 * pr.residual);
  }
}

TEST_CASE("compute_residual examples") {
  const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(std::vector<Complex>{1.0, 2.0}));
  const std::vector<Complex> e1{1.0, 0.0};
  CHECK(compute_residual(p, 1.0, e1) == 0.0);
  const std::vector<Complex> scaled{0.0, 3.5};
  CHECK(compute_residual(p, 2.0, scaled) <= 1e-15);
  CHECK(kind_of([&] { compute_residual(p, 1.0, std::vector<Complex>{0.0, 0.0}); }) ==
        ErrorKind::ZeroVector);
  CHECK(std::isinf(compute_residual(p, Complex(INFINITY, 0.0), e1)));

  // Random data against a direct evaluation of the formula.
  const DenseMatrix a = random_matrix(20, 20, 90);
  const DenseMatrix b = random_matrix(20, 20, 91);
  const MatrixPencil g(a, b);
  std::mt19937_64 rng(92);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Complex> x(20);
    for (auto& v : x) v = Complex(nd(rng), nd(rng));
    const Complex lambda(nd(rng), nd(rng));
    const auto ax = multiply(a, x);
    const auto bx = multiply(b, x);
    double num = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
      num += std::norm(ax[i] - lambda * bx[i]);
      na += std::norm(ax[i]);
      nb += std::norm(bx[i]);
    }
    const double expected = std::sqrt(num) / (std::sqrt(na) + std::sqrt(nb));
    CHECK(std::abs(compute_residual(g, lambda, x) - expected) <= 1e-14 * std::max(1.0, expected));
  }
}

TEST_CASE("filter_pairs examples") {
  const Circle c({0.0, 0.0}, 1.0);
  EigenpairSet pairs(4);
  pairs[0].value = 0.3;
  pairs[0].residual = 1e-9;
  pairs[1].value = Complex(0.0, 0.5);
  pairs[1].residual = 0.5;
  pairs[2].value = 1.01;
  pairs[2].residual = 1e-12;
  pairs[3].value = Complex(0.0, 1.0 + 1e-10);
  pairs[3].residual = 1e-12;
  const EigenpairSet out = filter_pairs(pairs, c, 1e-2);
  CHECK(out[0].inside);
  CHECK(out[0].filtered);
  CHECK(out[1].inside);
  CHECK_FALSE(out[1].filtered);
  CHECK_FALSE(out[2].inside);
  CHECK_FALSE(out[2].filtered);
  CHECK_FALSE(out[3].inside);
  CHECK(out[3].near_boundary);
  CHECK_FALSE(out[0].near_boundary);
}

TEST_CASE("estimate_count brackets the true inside count") {
  const ContourRule rule = build_rule(Circle({0.0, 0.0}, 1.0), 16);
  SUBCASE("diagonal pencil with five inside") {
    std::vector<Complex> d{0.1, -0.3, Complex(0.2, 0.4), Complex(-0.5, -0.2), 0.6};
    for (int i = 0; i < 35; ++i) d.push_back(std::polar(2.0 + 0.2 * i, 0.9 * i));
    const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(d));
    const Index est = estimate_count(p, rule, 30, 3);
    CHECK(est >= 3);
    CHECK(est <= 7);
  }
  SUBCASE("empty region") {
    std::vector<Complex> d;
    for (int i = 0; i < 30; ++i) d.push_back(std::polar(3.0 + i, 0.4 * i));
    const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(d));
    CHECK(estimate_count(p, rule, 20, 1) == 0);
  }
  SUBCASE("Hermitian 100x100 with 12 inside, ten seeds") {
    std::vector<double> lambda;
    for (int i = 0; i < 12; ++i) lambda.push_back(-0.9 + 0.15 * i);
    for (int i = 0; i < 88; ++i) lambda.push_back((i % 2 == 0 ? 1.0 : -1.0) * (1.5 + 0.1 * i));
    const DenseMatrix q = testing::random_unitary_columns(100, 100, 5);
    DenseMatrix scaled = q;
    for (Index j = 0; j < 100; ++j)
      for (Complex& v : scaled.col(j)) v *= lambda[j];
    const MatrixPencil p = MatrixPencil::standard(scaled * q.adjoint());
    const ShiftedFactorCache cache = build_cache(p, rule);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Index est = estimate_count(cache, p, 20, seed);
      CHECK(est >= 9);
      CHECK(est <= 15);
    }
  }
}

TEST_CASE("t = s recovers the planted spectrum for rfeast and bfeast") {
  const Circle c({0.0, 0.0}, 1.0);
  for (Scheme scheme : {Scheme::Rfeast, Scheme::Bfeast}) {
    int successes = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const Index s = 3 + seed % 10;
      const SyntheticPencil syn = make_disk_synthetic(80, s, c, 10.0, 7000 + seed);
      SolverConfig cfg = config_for(c, s, scheme, seed);
      cfg.expected_count = s;
      const SolveReport rep = solve(syn.pencil(), cfg);
      std::vector<Complex> truth;
      for (const Complex v : syn.planted())
        if (c.contains(v)) truth.push_back(v);
      const SpectrumMatch m = match_spectra(converged_values(rep), truth, 1e-8);
      if (rep.status == SolveStatus::Converged && m.matched == s) ++successes;
    }
    INFO("scheme " << to_string(scheme));
    CHECK(successes >= 99);
  }
}

TEST_CASE("Res decreases monotonically on well separated spectra") {
  const Circle c({1.0, -1.0}, 2.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SyntheticPencil syn = make_disk_synthetic(80, 6, c, 10.0, 300 + seed, 0.7, 1.6, 3.0);
    SolverConfig cfg = config_for(c, 9, Scheme::Rfeast, seed);
    cfg.expected_count = 6;
    cfg.tolerance = 1e-14;
    const SolveReport rep = rfeast(syn.pencil(), cfg);
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& rec : rep.history) {
      if (!std::isfinite(rec.res_max)) continue;
      if (previous < 1e-13) break;
      CHECK(rec.res_max <= previous);
      previous = rec.res_max;
    }
  }
}

TEST_CASE("rate law: residuals and subspace distance shrink by the predicted factor") {
  const Index s = 4;
  const auto spec = testing::rate_spectrum(40, s, 1e-3);
  const MatrixPencil p = MatrixPencil::standard(DenseMatrix::diagonal(spec.values));
  const ContourRule rule = build_rule(Circle({0.0, 0.0}, 1.0), 16);
  ReferenceSpectrum ref;
  ref.values = spec.values;
  for (Scheme scheme : {Scheme::Rfeast, Scheme::Bfeast}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      SolverConfig cfg = config_for(Circle({0.0, 0.0}, 1.0), s + 1, scheme, seed);
      cfg.expected_count = s;
      cfg.tolerance = 1e-15;
      cfg.max_iter = 6;
      std::vector<std::vector<double>> residuals(s);
      std::vector<std::vector<double>> distances(s);
      solve(p, cfg, std::nullopt, [&](const IterationView& v) {
        for (Index j = 0; j < s; ++j) {
          std::vector<Complex> ej(40, 0.0);
          ej[j] = 1.0;
          distances[j].push_back(testing::distance_to_span(v.basis.basis, ej));
          double best = std::numeric_limits<double>::infinity();
          double res = 0.0;
          for (const auto& pr : v.pairs) {
            const double d = std::abs(pr.value - spec.values[j]);
            if (d < best) {
              best = d;
              res = pr.residual;
            }
          }
          residuals[j].push_back(res);
        }
      });
      for (Index j = 0; j < s; ++j) {
        const double predicted = std::log10(predict_rate(ref, rule, s + 1, j));
        std::vector<double> above;
        for (const double r : residuals[j])
          if (r > 1e-13) above.push_back(r);
        REQUIRE(above.size() >= 2);
        const double slope = testing::log10_slope(above);
        INFO("scheme " << to_string(scheme) << " seed " << seed << " pair " << j);
        CHECK(slope <= predicted / 2.0);
        CHECK(slope >= predicted * 2.0);
        const double rate = std::pow(10.0, predicted);
        for (std::size_t k = 1; k < distances[j].size(); ++k) {
          if (distances[j][k - 1] < 1e-12) break;
          CHECK(distances[j][k] / distances[j][k - 1] <= 2.0 * rate);
        }
      }
    }
  }
}

TEST_CASE("random left blocks give a nonsingular leading block") {
  // (S^{-1})(1:s, :) Y has full rank for Gaussian Y.
  const Circle c({0.0, 0.0}, 1.0);
  const SyntheticPencil syn = make_disk_synthetic(60, 8, c, 100.0, 4);
  const DenseMatrix lead = syn.s_inv.adjoint().columns(0, 8).adjoint();
  Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const DenseMatrix z = lead * gaussian_matrix(60, 8, rng);
    const SmallEigResult e = eig_dense(adjoint_times(z, z), {false});
    double smallest = std::numeric_limits<double>::infinity();
    for (const Complex v : e.values) smallest = std::min(smallest, v.real());
    CHECK(std::sqrt(std::max(smallest, 0.0)) > 1e-10);
  }
}
