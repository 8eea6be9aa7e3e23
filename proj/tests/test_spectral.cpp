#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nhimp/errors.hpp"
#include "nhimp/spectral.hpp"

using namespace nhimp;

namespace {

ModelParams chain(double tR, double tL, int N, double t = 1.0, double mu = 0.0) {
  ModelParams p;
  p.t = t;
  p.tR = tR;
  p.tL = tL;
  p.mu = mu;
  p.N = N;
  return p;
}

double residual(const CMatrix& H, const EigenSystem& es) {
  const CMatrix r = H * es.right - es.right * es.energies.asDiagonal();
  return r.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("build_hamiltonian: periodic ring") {
  const CMatrix H = build_hamiltonian(chain(1.0, 1.0, 10));
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const int d = std::abs(i - j);
      const double expected = (d == 1 || d == 9) ? -1.0 : 0.0;
      CHECK(H(i, j) == cplx(expected, 0.0));
    }
}

TEST_CASE("build_hamiltonian: open chain is exactly tridiagonal") {
  const CMatrix H = build_hamiltonian(chain(0.0, 0.0, 12, 1.0, 0.3));
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      if (std::abs(i - j) > 1) CHECK(H(i, j) == cplx(0.0));
      if (i == j) CHECK(H(i, j) == cplx(-0.3));
    }
}

TEST_CASE("build_hamiltonian: non-Hermitian corners") {
  const CMatrix H = build_hamiltonian(chain(0.3, 0.5, 8));
  const CMatrix D = H - H.adjoint();
  int nonzero = 0;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j)
      if (D(i, j) != cplx(0.0)) ++nonzero;
  CHECK(nonzero == 2);
  CHECK(H(0, 7) == cplx(-0.3));
  CHECK(H(7, 0) == cplx(-0.5));
  CHECK(D(0, 7) != cplx(0.0));
}

TEST_CASE("build_hamiltonian: rejects short chains and zero bulk hopping") {
  CHECK_THROWS_AS(build_hamiltonian(chain(1.0, 1.0, 3)), InvalidArgument);
  CHECK_THROWS_AS(build_hamiltonian(chain(1.0, 1.0, 8, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(build_hamiltonian(chain(NAN, 1.0, 8)), InvalidArgument);
}

TEST_CASE("solve_biorthogonal: Hermitian input has left = right up to phases") {
  const CMatrix H = build_hamiltonian(chain(0.7, 0.7, 30));
  const EigenSystem es = solve_biorthogonal(H);
  CHECK(es.energies.imag().cwiseAbs().maxCoeff() < 1e-12);
  for (int k = 0; k < 30; ++k) {
    const cplx overlap = es.right.col(k).dot(es.left.col(k));
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-9);
    CHECK((es.left.col(k) - overlap * es.right.col(k)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("solve_biorthogonal: non-Hermitian impurity keeps the spectrum real") {
  const CMatrix H = build_hamiltonian(chain(0.3, 0.5, 40));
  const EigenSystem es = solve_biorthogonal(H);
  CHECK(es.energies.imag().cwiseAbs().maxCoeff() < 1e-9);
  CHECK(residual(H, es) <= 1e-9 * H.cwiseAbs().maxCoeff());
  CHECK((es.left.adjoint() * es.right - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("solve_biorthogonal: two out-of-band levels for t_R t_L = 5") {
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(chain(2.0, 2.5, 40)));
  const double z = 1.0 / std::sqrt(5.0);
  const double level = z + 1.0 / z;
  std::vector<double> outside;
  for (int i = 0; i < 40; ++i)
    if (std::abs(es.energies(i).real()) > 2.0) outside.push_back(es.energies(i).real());
  REQUIRE(outside.size() == 2);
  std::sort(outside.begin(), outside.end());
  CHECK(outside[0] == doctest::Approx(-level).epsilon(1e-9));
  CHECK(outside[1] == doctest::Approx(level).epsilon(1e-9));
}

TEST_CASE("solve_biorthogonal: sorted by real part, half filling") {
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(chain(0.3, 0.5, 42)));
  for (int i = 1; i < 42; ++i) CHECK(es.energies(i - 1).real() <= es.energies(i).real());
  CHECK(es.occupied_count() == 21);
  CHECK(es.zero_mode_count() == 0);
  CHECK_NOTHROW(require_unambiguous_filling(es));
}

TEST_CASE("solve_biorthogonal: complex input goes through the complex solver") {
  CMatrix H = build_hamiltonian(chain(0.3, 0.5, 12));
  H(3, 4) = cplx(-1.0, 0.2);
  const EigenSystem es = solve_biorthogonal(H);
  CHECK(residual(H, es) <= 1e-9 * H.cwiseAbs().maxCoeff());
  CHECK((es.left.adjoint() * es.right - CMatrix::Identity(12, 12)).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("solve_biorthogonal: zero modes at N = 0 mod 4 for the periodic ring") {
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(chain(1.0, 1.0, 40)));
  CHECK(es.zero_mode_count() == 2);
  CHECK_THROWS_AS(require_unambiguous_filling(es), NumericalError);
  const EigenSystem ok = solve_biorthogonal(build_hamiltonian(chain(1.0, 1.0, 42)));
  CHECK(ok.zero_mode_count() == 0);
  CHECK(ok.occupied_count() == 21);
}

TEST_CASE("solve_biorthogonal: defective matrix is rejected") {
  CMatrix J = CMatrix::Zero(2, 2);
  J(0, 1) = 1.0;
  CHECK_THROWS_AS(solve_biorthogonal(J), NumericalError);
  CHECK_THROWS_AS(solve_biorthogonal(CMatrix::Zero(2, 3)), InvalidArgument);
}

TEST_CASE("quadratic_branches: closed-chain and textbook examples") {
  SUBCASE("t_R = t_L = 0") {
    const cplx z = std::polar(1.0, 0.7);
    const QuadraticBranch q = quadratic_branches(z, chain(0.0, 0.0, 8));
    CHECK(std::abs(q.a - z * z) < 1e-15);
    CHECK(std::abs(q.b) == 0.0);
    CHECK(std::abs(q.c + 1.0) < 1e-15);
    CHECK(std::min(std::abs(q.y1 - 1.0 / z), std::abs(q.y1 + 1.0 / z)) < 1e-14);
    CHECK(std::abs(q.y1 + q.y2) < 1e-14);
  }
  SUBCASE("t_R = t_L = 1 gives a double root at 1") {
    const QuadraticBranch q = quadratic_branches(std::polar(1.0, std::numbers::pi / 5), chain(1.0, 1.0, 8));
    CHECK(std::abs(q.y1 - 1.0) < 1e-7);
    CHECK(std::abs(q.y2 - 1.0) < 1e-7);
  }
  SUBCASE("z = i, t_R = 2, t_L = 0.5") {
    const QuadraticBranch q = quadratic_branches(cplx(0.0, 1.0), chain(2.0, 0.5, 8));
    CHECK(std::abs(q.a + 2.0) < 1e-15);
    CHECK(std::abs(q.b - 5.0) < 1e-15);
    CHECK(std::abs(q.c + 2.0) < 1e-15);
    CHECK(std::abs(q.y1 - 2.0) < 1e-14);
    CHECK(std::abs(q.y2 - 0.5) < 1e-14);
  }
}

TEST_CASE("quadratic_branches: degenerate and invalid input") {
  const QuadraticBranch q = quadratic_branches(cplx(0.5, 0.0), chain(0.5, 0.5, 8));
  CHECK(q.degenerate);
  CHECK(std::abs(q.b * q.y1 + q.c) < 1e-15);
  CHECK_THROWS_AS(quadratic_branches(cplx(0.0), chain(0.5, 0.5, 8)), InvalidArgument);
}

TEST_CASE("quadratic_branches: residual, product and ordering properties") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> hop(-3.0, 3.0), angle(-std::numbers::pi, std::numbers::pi);
  for (int trial = 0; trial < 500; ++trial) {
    const ModelParams p = chain(hop(rng), hop(rng), 8, trial % 3 == 0 ? -1.7 : 1.0);
    const cplx z = std::polar(trial % 5 == 0 ? 0.6 : 1.0, angle(rng));
    const QuadraticBranch q = quadratic_branches(z, p);
    for (const cplx y : {q.y1, q.y2}) {
      const double scale = std::abs(q.a) * std::norm(y) + std::abs(q.b) * std::abs(y) + std::abs(q.c);
      CHECK(std::abs(q.a * y * y + q.b * y + q.c) <= 1e-12 * scale);
    }
    if (!q.degenerate) CHECK(std::abs(q.y1 * q.y2 - q.c / q.a) <= 1e-12 * std::max(1.0, std::abs(q.c / q.a)));
    CHECK(std::abs(q.y1) >= std::abs(q.y2) * (1.0 - 1e-12));
  }
}

TEST_CASE("quadratic_branches: normalizes by t") {
  const cplx z = std::polar(1.0, 0.4);
  const QuadraticBranch a = quadratic_branches(z, chain(0.6, 1.4, 8, 2.0));
  const QuadraticBranch b = quadratic_branches(z, chain(0.3, 0.7, 8, 1.0));
  CHECK(std::abs(a.y1 - b.y1) < 1e-15);
  CHECK(std::abs(a.y2 - b.y2) < 1e-15);
}

TEST_CASE("thermo_modes: momenta, dispersion, biorthonormality") {
  const ModeSet set = thermo_modes(chain(0.3, 0.5, 40));
  CHECK(set.modes.size() == 80);
  CHECK_FALSE(set.flagged);
  int usable = 0;
  for (const Mode& m : set.modes) {
    CHECK(m.k >= -std::numbers::pi);
    CHECK(m.k < std::numbers::pi);
    CHECK(std::abs(std::abs(m.z) - 1.0) < 1e-15);
    CHECK(m.energy == doctest::Approx(-2.0 * std::cos(m.k)));
    if (!m.usable) continue;
    ++usable;
    CHECK(std::abs(m.psiL.dot(m.psiR) - 1.0) <= 1e-10);
  }
  CHECK(usable == 76);  // k = 0 and k = -pi carry vanishing standing waves
}

TEST_CASE("thermo_modes: dispersion anchors") {
  const ModeSet set = thermo_modes(chain(0.3, 0.5, 8));
  for (const Mode& m : set.modes) {
    if (std::abs(std::abs(m.k) - std::numbers::pi / 2) < 1e-12) CHECK(std::abs(m.energy) < 1e-15);
    if (m.k == 0.0) CHECK(m.energy == -2.0);
  }
}

TEST_CASE("thermo_modes: periodic ring flags every mode") {
  const ModeSet set = thermo_modes(chain(1.0, 1.0, 20));
  CHECK(set.flagged);
  for (const Mode& m : set.modes) {
    CHECK(std::abs(m.normLR) < kMinNormLR);
    CHECK_FALSE(m.usable);
  }
}

TEST_CASE("thermo_modes: preconditions") {
  CHECK_THROWS_AS(thermo_modes(chain(0.3, 0.5, 41)), InvalidArgument);
  CHECK_THROWS_AS(thermo_modes(chain(0.3, 0.5, 40, 1.0, 0.1)), InvalidArgument);
}

TEST_CASE("thermo_modes: mode sum matches finite-N diagonalization in the bulk") {
  const ModelParams p = chain(0.3, 0.5, 400);
  const ModeSet set = thermo_modes(p);
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(p));
  const int first = 101, size = 40;
  const CMatrix modes = mode_sum_correlation(set, first, size);
  CMatrix exact(size, size);
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      cplx s = 0.0;
      for (int k = 0; k < p.N; ++k)
        if (es.occupied[k]) s += std::conj(es.left(first - 1 + i, k)) * es.right(first - 1 + j, k);
      exact(i, j) = s;
    }
  CHECK((modes - exact).cwiseAbs().maxCoeff() <= 5e-3);
}

TEST_CASE("bound_states: absent for |t_R t_L| <= 1") {
  CHECK(bound_states(chain(1.0, 0.5, 20)).empty());
  CHECK(bound_states(chain(-1.0, 1.0, 20)).empty());
  CHECK(bound_states(chain(0.0, 3.0, 20)).empty());
}

TEST_CASE("bound_states: t_R = t_L = 2") {
  const auto bs = bound_states(chain(2.0, 2.0, 40));
  REQUIRE(bs.size() == 2);
  CHECK(bs[0].z == cplx(0.5));
  CHECK(bs[1].z == cplx(-0.5));
  CHECK(bs[0].energy.real() == doctest::Approx(-2.5));
  CHECK(bs[1].energy.real() == doctest::Approx(2.5));
  CHECK(bs[0].occupied);
  CHECK_FALSE(bs[1].occupied);
  CHECK(std::abs(bs[0].normB - 2.0 * 0.25 / 0.75) < 1e-15);
  for (const auto& b : bs) CHECK(std::abs(b.z) < 1.0);
}

TEST_CASE("bound_states: overlap with the finite-N eigenvector") {
  const ModelParams p = chain(2.0, 2.0, 200);
  const auto bs = bound_states(p);
  const EigenSystem es = solve_biorthogonal(build_hamiltonian(p));
  // lowest level is the z = 1/2 bound state
  const CVector v = es.right.col(0);
  const CVector& psi = bs[0].psiR;
  const double overlap = std::abs(psi.dot(v)) / (psi.norm() * v.norm());
  CHECK(overlap >= 0.999);
  CHECK(std::abs(es.energies(0) - bs[0].energy) < 1e-6);
}

TEST_CASE("bound_states: negative product gives nonstandard imaginary roots") {
  const auto bs = bound_states(chain(-3.0, 1.0, 20));
  REQUIRE(bs.size() == 2);
  for (const auto& b : bs) {
    CHECK(b.nonstandard);
    CHECK_FALSE(b.occupied);
    CHECK(b.z.real() == 0.0);
    CHECK(std::abs(std::abs(b.z) - 1.0 / std::sqrt(3.0)) < 1e-15);
  }
}

TEST_CASE("bound_states: count is two iff |t_R t_L| > 1") {
  for (const double tR : {-2.5, -1.2, -0.9, -0.2, 0.0, 0.4, 0.99, 1.01, 3.0})
    for (const double tL : {-1.5, 0.5, 1.0, 2.0}) {
      const auto bs = bound_states(chain(tR, tL, 20));
      CHECK(bs.size() == (std::abs(tR * tL) > 1.0 ? 2u : 0u));
    }
}
