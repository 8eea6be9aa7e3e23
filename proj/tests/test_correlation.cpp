#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nhimp/correlation.hpp"
#include "nhimp/errors.hpp"

using namespace nhimp;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams chain(double tR, double tL, int N = 0, double t = 1.0) {
  ModelParams p;
  p.t = t;
  p.tR = tR;
  p.tL = tL;
  p.N = N;
  return p;
}

// product T realized as (T, 1)
ModelParams product(double T) { return chain(T, 1.0); }

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct FrozenImpurity {
  int n;
  double T, value;
};

// Impurity term from 40-digit quadrature of the defining integral.
const FrozenImpurity kFrozen[] = {
    {5, 0.2, -0.044627219421912604095}, {4, -3, 0.22222222222222222222},    {3, -3, -0.26306274988315079216},
    {2, 4, -0.375},                     {7, 4, -0.046231881994628901351},   {11, -0.5, 0.076122810738264764642},
    {6, -0.5, 0.0},                     {9, 1.5, -0.032284577251145481773}, {10, -1.5, -0.16460905349794238683},
    {3, 0.9, 0.0070689461949550633309},
};

}  // namespace

TEST_CASE("sine_kernel") {
  CHECK(sine_kernel(0) == 0.5);
  CHECK(sine_kernel(2) == 0.0);
  CHECK(sine_kernel(1) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
  CHECK(sine_kernel(-3) == sine_kernel(3));
  CHECK(sine_kernel(3) == doctest::Approx(-1.0 / (3.0 * kPi)).epsilon(1e-15));
}

TEST_CASE("impurity_term_quadrature: anchors") {
  CHECK(impurity_term_quadrature(2, 5, product(1.0)) == cplx(0.0));
  CHECK(impurity_term_quadrature(1, 2, product(0.0)).real() == doctest::Approx(1.0 / (3.0 * kPi)).epsilon(1e-10));
  const ModelParams p = chain(0.4, 0.5);
  CHECK(std::abs(impurity_term_quadrature(2, 3, p) - impurity_term_closed(2, 3, p)) <= 1e-8);
}

TEST_CASE("impurity_term_quadrature: divergence point and guard band") {
  CHECK_THROWS_AS(impurity_term_quadrature(1, 2, product(-1.0)), InvalidArgument);
  CHECK_THROWS_AS(impurity_term_quadrature(1, 2, product(-1.0 + 1e-7)), InvalidArgument);
  CHECK_THROWS_AS(impurity_term_quadrature(1, 2, product(1.0 + 1e-7)), InvalidArgument);
  CHECK_THROWS_AS(impurity_term_quadrature(0, 2, product(0.5)), InvalidArgument);
}

TEST_CASE("impurity_term_quadrature: non-convergence is reported") {
  QuadratureConfig tight;
  tight.absTol = 1e-300;
  tight.relTol = 1e-300;
  tight.maxSubdivisions = 2;
  try {
    impurity_term_quadrature(1, 200, product(-0.999), tight);
    FAIL("expected a NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.operation() == "impurity_term_quadrature");
    CHECK(std::string(e.what()).find("error estimate") != std::string::npos);
  }
}

TEST_CASE("impurity_term_closed: case table") {
  CHECK(impurity_term_closed(1, 3, product(0.25)) == cplx(0.0));
  for (const int n : {1, 3, 5, 7, 13, 101}) {
    const double expected = -std::sin(kPi * n / 2.0) / (kPi * n);
    CHECK(impurity_term_closed(1, n - 1 > 0 ? n - 1 : 1, product(0.0)).real() ==
          doctest::Approx(n == 1 ? -std::sin(kPi) / (2 * kPi) : expected));
  }
  const ModelParams neg = chain(-3.0, 1.0);
  CHECK(std::abs(impurity_term_closed(1, 3, neg) - impurity_term_quadrature(1, 3, neg)) <= 1e-8);
  CHECK_THROWS_AS(impurity_term_closed(1, 2, product(1.0)), InvalidArgument);
  CHECK_THROWS_AS(impurity_term_closed(1, 2, product(-1.0)), InvalidArgument);
}

TEST_CASE("impurity term: frozen high-precision values") {
  for (const auto& f : kFrozen) {
    CAPTURE(f.n);
    CAPTURE(f.T);
    CHECK(std::abs(impurity_term_closed(1, f.n - 1, product(f.T)).real() - f.value) <= 1e-13);
    CHECK(std::abs(impurity_term_quadrature(1, f.n - 1, product(f.T)).real() - f.value) <= 1e-10);
  }
}

TEST_CASE("impurity term: closed form equals quadrature across regimes") {
  for (const double T : {0.2, -0.2, 0.5, -0.5, 0.9, -0.9, 1.5, -1.5, 3.0, -3.0}) {
    const ModelParams p = product(T);
    for (int n = 2; n <= 400; n += 7) {
      CAPTURE(T);
      CAPTURE(n);
      CHECK(std::abs(impurity_term_closed(1, n - 1, p) - impurity_term_quadrature(1, n - 1, p)) <= 1e-8);
    }
  }
}

TEST_CASE("impurity term: parity selection inside the unit disk") {
  for (const double T : {0.2, -0.2, 0.6, -0.6, 0.95, -0.95})
    for (int n = 2; n <= 60; n += 2) CHECK(std::abs(impurity_term_quadrature(1, n - 1, product(T))) <= 1e-10);
}

TEST_CASE("bound_contribution") {
  CHECK(bound_contribution(1, 1, product(4.0)) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(bound_contribution(3, 4, product(0.5)) == 0.0);
  CHECK(bound_contribution(3, 4, product(-4.0)) == 0.0);
  for (const int m : {1, 4, 9})
    CHECK(bound_contribution(2, m + 2, product(2.5)) / bound_contribution(2, m, product(2.5)) ==
          doctest::Approx(1.0 / 2.5).epsilon(1e-14));
  // it cancels the residue term of the scattering part
  for (int n = 2; n < 30; ++n) {
    const double b = 0.5 * (1.0 - 3.0) * std::pow(3.0, -n / 2.0);
    CHECK(bound_contribution(1, n - 1, product(3.0)) == doctest::Approx(-b).epsilon(1e-14));
  }
}

TEST_CASE("asymptotic_corr") {
  for (int l = 1; l < 6; ++l)
    for (int m = 1; m < 6; ++m) CHECK(asymptotic_corr(l, m, product(1.0)) == doctest::Approx(sine_kernel(l - m)));
  CHECK(asymptotic_corr(1, 2, product(0.0)) == doctest::Approx(1.0 / kPi + 1.0 / (3.0 * kPi)).epsilon(1e-14));
  const ModelParams p = chain(0.4, 0.5);
  const double exact = sine_kernel(50 - 51) + impurity_term_closed(50, 51, p).real();
  CHECK(std::abs(asymptotic_corr(50, 51, p) - exact) <= 1e-3);
  CHECK_THROWS_AS(asymptotic_corr(1, 2, product(-1.0)), InvalidArgument);
}

TEST_CASE("assemble_correlation: unit product is the sine kernel") {
  AssemblyOptions fallback;
  fallback.quadratureFallback = true;
  const CorrelationMatrix C = assemble_correlation(chain(1.0, 1.0), Partition::kind_I(40), Route::analytic, fallback);
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j) CHECK(C.entries(i, j) == cplx(sine_kernel(i - j)));
  CHECK_THROWS_AS(assemble_correlation(chain(1.0, 1.0), Partition::kind_I(40), Route::analytic), InvalidArgument);
}

TEST_CASE("assemble_correlation: metadata and preconditions") {
  const CorrelationMatrix C = assemble_correlation(chain(0.3, 0.6), Partition::kind_II(10, 500), Route::asymptotic);
  CHECK(C.offset == 501);
  CHECK(C.provenance == Route::asymptotic);
  CHECK(C.hermitian);
  CHECK(C.entries.rows() == 10);
  ModelParams mu = chain(0.3, 0.6);
  mu.mu = 0.2;
  CHECK_THROWS_AS(assemble_correlation(mu, Partition::kind_I(10), Route::analytic), InvalidArgument);
  CHECK_THROWS_AS(assemble_correlation(chain(0.3, 0.6), Partition::kind_I(10), Route::numeric), InvalidArgument);
  CHECK_THROWS_AS(assemble_correlation(chain(0.3, 0.6, 20), Partition::kind_I(10), Route::numeric), InvalidArgument);
  CHECK_THROWS_AS(assemble_correlation(chain(-2.0, 0.5), Partition::kind_I(10), Route::analytic), InvalidArgument);
}

TEST_CASE("assemble_correlation: numeric and analytic routes agree at N = 2000") {
  const Partition part = Partition::kind_I(60);
  const CorrelationMatrix num = assemble_correlation(chain(0.3, 0.6, 2000), part, Route::numeric);
  const CorrelationMatrix ana = assemble_correlation(chain(0.3, 0.6), part, Route::analytic);
  CHECK(max_diff(num.entries, ana.entries) <= 2e-3);
  CHECK(num.provenance == Route::numeric);
}

TEST_CASE("assemble_correlation: bound-state term is needed above t_R t_L = 1") {
  const Partition part = Partition::kind_I(30);
  const CorrelationMatrix num = assemble_correlation(chain(2.0, 2.0, 1002), part, Route::numeric);
  const CorrelationMatrix with_b = assemble_correlation(chain(2.0, 2.0), part, Route::analytic);
  AssemblyOptions without;
  without.includeBound = false;
  const CorrelationMatrix no_b = assemble_correlation(chain(2.0, 2.0), part, Route::analytic, without);
  CHECK(max_diff(num.entries, with_b.entries) <= 2e-3);
  CHECK(std::abs(num.entries(0, 0) - no_b.entries(0, 0)) > 0.1);
}

TEST_CASE("assemble_correlation: negative bulk hopping is a gauge transform") {
  const Partition part = Partition::kind_I(20);
  const CorrelationMatrix num = assemble_correlation(chain(-0.3, -0.45, 1002, -1.5), part, Route::numeric);
  const CorrelationMatrix ana = assemble_correlation(chain(-0.3, -0.45, 0, -1.5), part, Route::analytic);
  CHECK(max_diff(num.entries, ana.entries) <= 2e-3);
  const CorrelationMatrix pos = assemble_correlation(chain(0.2, 0.3), part, Route::analytic);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) CHECK(ana.entries(i, j) == ((i + j) % 2 == 0 ? 1.0 : -1.0) * pos.entries(i, j));
}

TEST_CASE("Hermiticity of the thermodynamic routes for real products") {
  AssemblyOptions fallback;
  fallback.quadratureFallback = true;
  for (const double T : {-3.0, -0.9, -0.25, 0.0, 0.3, 1.0, 2.0, 7.0})
    for (const Route r : {Route::analytic, Route::asymptotic}) {
      const CorrelationMatrix C = assemble_correlation(product(T), Partition::kind_I(50), r, fallback);
      CHECK(hermiticity_defect(C.entries) <= 1e-8);
      CHECK(C.hermitian);
      CHECK(C.entries.allFinite());
    }
}

TEST_CASE("numeric route: Hermitian at t_R = t_L, asymmetry decays with N otherwise") {
  const CorrelationMatrix herm = assemble_correlation(chain(0.6, 0.6, 302), Partition::kind_I(40), Route::numeric);
  CHECK(hermiticity_defect(herm.entries) <= 1e-8);
  CHECK(herm.hermitian);
  const double small = hermiticity_defect(
      assemble_correlation(chain(0.3, 0.6, 202), Partition::kind_I(40), Route::numeric).entries);
  const double large = hermiticity_defect(
      assemble_correlation(chain(0.3, 0.6, 802), Partition::kind_I(40), Route::numeric).entries);
  CHECK(large < 0.5 * small);
}

TEST_CASE("numeric route: full correlation matrix is a projector at t_R = t_L") {
  const ModelParams p = chain(0.4, 0.4, 150);
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(p));
  const CMatrix C = numeric_correlation(es, 1, 150);
  CHECK((C * C - C).cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(std::abs(C.trace() - 75.0) < 1e-9);
}

TEST_CASE("bulk windows are the sine kernel up to 1/(2 pi L_0)") {
  const int L0 = 500;
  AssemblyOptions fallback;
  fallback.quadratureFallback = true;
  for (const double T : {0.0, 0.04, 0.3, 1.0, 3.0, 10.0}) {
    const CorrelationMatrix C = assemble_correlation(product(T), Partition::kind_II(64, L0), Route::analytic, fallback);
    double worst = 0.0;
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) worst = std::max(worst, std::abs(C.entries(i, j) - sine_kernel(i - j)));
    CHECK(worst <= 1.0 / (2.0 * kPi * L0));
  }
}

TEST_CASE("route and partition names") {
  CHECK(parse_route("numeric") == Route::numeric);
  CHECK(to_string(Route::asymptotic) == "asymptotic");
  CHECK_THROWS_AS(parse_route("exact"), InvalidArgument);
  CHECK(parse_partition_kind("II") == PartitionKind::II);
  CHECK_THROWS_AS(parse_partition_kind("III"), InvalidArgument);
  CHECK_THROWS_AS(Partition::kind_I(0).validate(), InvalidArgument);
  CHECK_THROWS_AS((Partition{PartitionKind::I, 4, 3}).validate(), InvalidArgument);
}
