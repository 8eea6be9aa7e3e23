#pragma once

#include <vector>

#include "nhimp/params.hpp"

namespace nhimp {

/// States with Re(E) below -kOccupationEps are filled at half filling.
inline constexpr double kOccupationEps = 1e-9;

/// Right-eigenvector bases with a condition estimate above this are rejected.
inline constexpr double kMaxEigenbasisCondition = 1e12;

/// Modes whose biorthonormalization constant falls below this are unusable.
inline constexpr double kMinNormLR = 1e-10;

/// Dense single-particle Hamiltonian; sites are 0-based in the matrix, 1-based
/// in the physics (H(0, N-1) = -t_R is the c^dag_1 c_N amplitude).
CMatrix build_hamiltonian(const ModelParams& params);

/// Finite-N biorthogonal spectrum.
///
/// Columns of `right` are unit-norm right eigenvectors, `left` is defined by
/// left^dag = right^{-1}, so left^dag * right = 1 up to rounding. Energies are
/// sorted by real part, imaginary part breaking ties.
struct EigenSystem {
  CVector energies;
  CMatrix right;
  CMatrix left;
  std::vector<bool> occupied;
  /// 1-norm condition estimate of `right`.
  double condition = 1.0;

  int occupied_count() const;
  /// Number of states with |Re E| <= kOccupationEps.
  int zero_mode_count() const;
};

/// General complex eigensolve of `H` plus biorthonormal left vectors.
/// Throws NumericalError when the right basis is numerically singular.
EigenSystem solve_biorthogonal(const CMatrix& H);

/// Throws NumericalError("half-filling ambiguity") if `es` has zero modes.
void require_unambiguous_filling(const EigenSystem& es);

/// Coefficients and roots of a y^2 + b y + c = 0 with y = z^N.
struct QuadraticBranch {
  cplx a, b, c;
  /// Larger modulus first; ties go to the larger real part.
  cplx y1, y2;
  /// a == 0: the equation is linear, y1 == y2 is its single root.
  bool degenerate = false;
};

QuadraticBranch quadratic_branches(cplx z, const ModelParams& params);

/// Thermodynamic-limit scattering mode on one quadratic branch.
struct Mode {
  double k = 0.0;      ///< momentum in [-pi, pi)
  cplx z;              ///< e^{ik}
  double energy = 0.0; ///< -2 cos k - mu
  int branch = 0;      ///< 0 -> y1, 1 -> y2
  cplx zN;             ///< branch root standing in for z^N
  cplx normLR;         ///< 1 + t_R t_L - (t_R + t_L)(z^N + z^-N)/2
  /// false when |normLR| < kMinNormLR, or when both standing waves vanish
  /// identically (k = 0 and k = -pi).
  bool usable = true;
  /// Biorthonormalized amplitudes on sites 1..N, <psiL|psiR> = 1 when usable.
  CVector psiR;
  CVector psiL;
};

struct ModeSet {
  std::vector<Mode> modes;
  /// Set when any mode has |normLR| below threshold.
  bool flagged = false;
};

/// One mode per (k = 2 pi n / N, branch). Requires N even and mu = 0.
ModeSet thermo_modes(const ModelParams& params);

/// C(l, m) = 1/2 sum over occupied usable modes of conj(psiL(l)) psiR(m) on sites
/// first..first+size-1. The 1/2 undoes the (z, 1/z) double count of the two branches.
CMatrix mode_sum_correlation(const ModeSet& modes, int first, int size);

/// Impurity-localized state for |t_R t_L| > 1.
struct BoundState {
  cplx z;
  cplx energy;
  CVector psiR;
  CVector psiL;
  cplx normB;  ///< 2 z^2 / (1 - z^2)
  bool occupied = false;
  /// t_R t_L < -1: purely imaginary z and complex energy, excluded from sums.
  bool nonstandard = false;
};

/// Empty for |t_R t_L| <= 1, otherwise the z > 0 branch first.
std::vector<BoundState> bound_states(const ModelParams& params);

}  // namespace nhimp
