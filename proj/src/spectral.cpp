#include "nhimp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <lapacke.h>

#include "nhimp/errors.hpp"

namespace nhimp {

namespace {

constexpr double kPi = std::numbers::pi;

struct RawEigen {
  CVector values;
  CMatrix vectors;
};

RawEigen eig_real(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd work = A;
  Eigen::VectorXd wr(n), wi(n);
  Eigen::MatrixXd vr(n, n);
  const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, wr.data(), wi.data(),
                                        nullptr, 1, vr.data(), n);
  if (info != 0) throw NumericalError("solve_biorthogonal", "dgeev failed, info = " + std::to_string(info));

  RawEigen out{CVector(n), CMatrix(n, n)};
  for (int j = 0; j < n; ++j) {
    out.values(j) = cplx(wr(j), wi(j));
    if (wi(j) == 0.0) {
      out.vectors.col(j) = vr.col(j).cast<cplx>();
    } else if (wi(j) > 0.0 && j + 1 < n) {
      // conjugate pair stored as (re, im) in consecutive columns
      for (int i = 0; i < n; ++i) {
        out.vectors(i, j) = cplx(vr(i, j), vr(i, j + 1));
        out.vectors(i, j + 1) = cplx(vr(i, j), -vr(i, j + 1));
      }
      out.values(j + 1) = cplx(wr(j + 1), wi(j + 1));
      ++j;
    }
  }
  return out;
}

RawEigen eig_complex(const CMatrix& A) {
  const int n = static_cast<int>(A.rows());
  CMatrix work = A;
  CVector w(n);
  CMatrix vr(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
                    reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
                    reinterpret_cast<lapack_complex_double*>(vr.data()), n);
  if (info != 0) throw NumericalError("solve_biorthogonal", "zgeev failed, info = " + std::to_string(info));
  return {std::move(w), std::move(vr)};
}

bool lexicographic_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

int EigenSystem::occupied_count() const {
  return static_cast<int>(std::count(occupied.begin(), occupied.end(), true));
}

int EigenSystem::zero_mode_count() const {
  int count = 0;
  for (Eigen::Index i = 0; i < energies.size(); ++i)
    if (std::abs(energies(i).real()) <= kOccupationEps) ++count;
  return count;
}

CMatrix build_hamiltonian(const ModelParams& params) {
  params.validate();
  const int n = params.N;
  CMatrix H = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) H(i, i) = -params.mu;
  for (int i = 0; i + 1 < n; ++i) {
    H(i, i + 1) = -params.t;
    H(i + 1, i) = -params.t;
  }
  H(0, n - 1) = -params.tR;
  H(n - 1, 0) = -params.tL;
  return H;
}

EigenSystem solve_biorthogonal(const CMatrix& H) {
  if (H.rows() != H.cols() || H.rows() == 0) throw InvalidArgument("solve_biorthogonal: matrix must be square");
  if (!H.allFinite()) throw InvalidArgument("solve_biorthogonal: matrix has non-finite entries");

  const bool real_input = (H.imag().array() == 0.0).all();
  RawEigen raw = real_input ? eig_real(H.real()) : eig_complex(H);

  const Eigen::Index n = H.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return lexicographic_less(raw.values(a), raw.values(b)); });

  EigenSystem es;
  es.energies.resize(n);
  es.right.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    es.energies(j) = raw.values(order[j]);
    es.right.col(j) = raw.vectors.col(order[j]).normalized();
  }

  Eigen::PartialPivLU<CMatrix> lu(es.right);
  const double rcond = lu.rcond();
  es.condition = rcond > 0.0 ? 1.0 / rcond : INFINITY;
  if (!(es.condition <= kMaxEigenbasisCondition))
    throw NumericalError("solve_biorthogonal", "right eigenvector matrix is singular (condition estimate " +
                                                   std::to_string(es.condition) +
                                                   "), parameters are close to an eigenvector coalescence");
  es.left = lu.inverse().adjoint();

  es.occupied.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) es.occupied[j] = es.energies(j).real() < -kOccupationEps;
  return es;
}

void require_unambiguous_filling(const EigenSystem& es) {
  if (const int zero = es.zero_mode_count(); zero > 0)
    throw NumericalError("half-filling ambiguity",
                         std::to_string(zero) + " eigenvalue(s) with |Re E| <= 1e-9; choose N = 2 mod 4 for PBC-like "
                                                "couplings");
}

QuadraticBranch quadratic_branches(cplx z, const ModelParams& params) {
  if (z == 0.0) throw InvalidArgument("quadratic_branches: z must be nonzero");
  const ModelParams p = params.normalized();
  const double T = p.tR * p.tL;
  const cplx z2 = z * z;

  QuadraticBranch qb;
  qb.a = z2 - T;
  qb.b = (1.0 - z2) * (p.tL + p.tR);
  qb.c = z2 * T - 1.0;

  // magnitude of the individual terms that make up a, b and c
  const double scale = 2.0 * std::max(std::norm(z), 1.0) * std::max(std::abs(T), 1.0) *
                       std::max(std::abs(p.tL + p.tR), 1.0);
  const double eps = 1e-14 * scale;
  if (std::abs(qb.a) <= eps) {
    if (std::abs(qb.b) <= eps) throw NumericalError("quadratic_branches", "a = b = 0, no isolated root");
    qb.degenerate = true;
    qb.a = 0.0;
    qb.y1 = qb.y2 = -qb.c / qb.b;
    return qb;
  }

  // cancellation-free form: q = -(b + sign * sqrt(disc)) / 2, y = q / a and c / q
  cplx root = std::sqrt(qb.b * qb.b - 4.0 * qb.a * qb.c);
  if ((std::conj(qb.b) * root).real() < 0.0) root = -root;
  const cplx q = -0.5 * (qb.b + root);
  cplx r1 = q / qb.a;
  cplx r2 = q != 0.0 ? qb.c / q : r1;

  const double m1 = std::abs(r1), m2 = std::abs(r2);
  const bool swap = std::abs(m1 - m2) <= 1e-12 * std::max(m1, m2) ? r2.real() > r1.real() : m2 > m1;
  if (swap) std::swap(r1, r2);
  qb.y1 = r1;
  qb.y2 = r2;
  return qb;
}

ModeSet thermo_modes(const ModelParams& params) {
  params.validate();
  if (params.N % 2 != 0) throw InvalidArgument("thermo_modes: N must be even");
  params.require_half_filling("thermo_modes");
  const ModelParams p = params.normalized();
  const int N = p.N;
  const cplx prefactor = 1.0 / (cplx(0.0, 1.0) * std::sqrt(2.0 * N));

  ModeSet set;
  set.modes.reserve(2 * static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    double k = 2.0 * kPi * n / N;
    if (k >= kPi) k -= 2.0 * kPi;
    const cplx z = std::polar(1.0, k);
    QuadraticBranch qb;
    try {
      qb = quadratic_branches(z, p);
    } catch (const NumericalError&) {
      // a = b = 0: no branch root exists at this momentum
      for (int branch = 0; branch < 2; ++branch) {
        Mode mode;
        mode.k = k;
        mode.z = z;
        mode.energy = -2.0 * std::cos(k) - p.mu;
        mode.branch = branch;
        mode.normLR = 0.0;
        mode.usable = false;
        mode.psiR = CVector::Zero(N);
        mode.psiL = CVector::Zero(N);
        set.modes.push_back(std::move(mode));
      }
      set.flagged = true;
      continue;
    }

    for (int branch = 0; branch < 2; ++branch) {
      Mode mode;
      mode.k = k;
      mode.z = z;
      mode.energy = -2.0 * std::cos(k) - p.mu;
      mode.branch = branch;
      mode.zN = branch == 0 ? qb.y1 : qb.y2;
      const cplx y = mode.zN;

      mode.psiR.resize(N);
      mode.psiL.resize(N);
      if (std::abs(y) < kMinNormLR) {
        mode.normLR = 0.0;
        mode.usable = false;
        set.flagged = true;
        mode.psiR.setZero();
        mode.psiL.setZero();
        set.modes.push_back(std::move(mode));
        continue;
      }
      mode.normLR = 1.0 + p.tR * p.tL - 0.5 * (p.tR + p.tL) * (y + 1.0 / y);

      const cplx yc = std::conj(y), zc = std::conj(z);
      const cplx r1 = 1.0 - p.tR / y, r2 = 1.0 - y * p.tR;
      const cplx l1 = 1.0 - p.tL / yc, l2 = 1.0 - yc * p.tL;
      cplx zn = 1.0, zcn = 1.0;
      for (int site = 1; site <= N; ++site) {
        zn *= z;
        zcn *= zc;
        mode.psiR(site - 1) = prefactor * (r1 * zn - r2 / zn);
        mode.psiL(site - 1) = prefactor * (l1 * zcn - l2 / zcn);
      }

      // With the i/sqrt(2N) prefactor on both vectors the bare overlap is -normLR.
      const cplx overlap = mode.psiL.dot(mode.psiR);
      if (std::abs(mode.normLR) < kMinNormLR) {
        mode.usable = false;
        set.flagged = true;
      } else if (std::abs(overlap) < kMinNormLR) {
        mode.usable = false;  // k = 0 or -pi: both standing waves vanish
      } else {
        const cplx s = std::sqrt(-mode.normLR);
        mode.psiR /= s;
        mode.psiL /= std::conj(s);
      }
      set.modes.push_back(std::move(mode));
    }
  }
  return set;
}

CMatrix mode_sum_correlation(const ModeSet& modes, int first, int size) {
  if (modes.modes.empty()) throw InvalidArgument("mode_sum_correlation: empty mode set");
  const int N = static_cast<int>(modes.modes.front().psiR.size());
  if (first < 1 || size < 1 || first + size - 1 > N)
    throw InvalidArgument("mode_sum_correlation: site window outside the chain");

  CMatrix C = CMatrix::Zero(size, size);
  for (const Mode& mode : modes.modes) {
    if (!mode.usable || !(mode.energy < -kOccupationEps)) continue;
    const auto L = mode.psiL.segment(first - 1, size);
    const auto R = mode.psiR.segment(first - 1, size);
    C.noalias() += 0.5 * L.conjugate() * R.transpose();
  }
  return C;
}

std::vector<BoundState> bound_states(const ModelParams& params) {
  params.validate();
  const ModelParams p = params.normalized();
  const double T = p.tR * p.tL;
  if (std::abs(T) <= 1.0) return {};

  const bool nonstandard = T < 0.0;
  const double r = std::sqrt(1.0 / std::abs(T));
  const cplx base = nonstandard ? cplx(0.0, r) : cplx(r, 0.0);

  std::vector<BoundState> out;
  for (const cplx z : {base, -base}) {
    BoundState bs;
    bs.z = z;
    bs.nonstandard = nonstandard;
    bs.energy = params.t * (-(z + 1.0 / z) - p.mu);
    bs.normB = 2.0 * z * z / (1.0 - z * z);
    bs.occupied = !nonstandard && bs.energy.real() < 0.0;

    const int N = p.N;
    const cplx zc = std::conj(z);
    // powers z^n for n = 0..N+1, exact products instead of pow()
    CVector zpow(N + 2), zcpow(N + 2);
    zpow(0) = zcpow(0) = 1.0;
    for (int n = 1; n <= N + 1; ++n) {
      zpow(n) = zpow(n - 1) * z;
      zcpow(n) = zcpow(n - 1) * zc;
    }
    bs.psiR.resize(N);
    bs.psiL.resize(N);
    for (int n = 1; n <= N; ++n) {
      bs.psiR(n - 1) = z * p.tL * zpow(n) + zpow(N - n + 1);
      bs.psiL(n - 1) = zc * p.tR * zcpow(n) + zcpow(N - n + 1);
    }
    out.push_back(std::move(bs));
  }
  return out;
}

}  // namespace nhimp
