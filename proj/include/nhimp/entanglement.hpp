#pragma once

#include <string>

#include "nhimp/correlation.hpp"

namespace nhimp {

inline constexpr const char* kBranchConvention = "principal-log, Im in (-pi, pi]";

/// xi within this distance of 0 or 1 contributes nothing to the entropy.
inline constexpr double kXiEdgeTolerance = 1e-12;

struct EntanglementResult {
  CVector xi;
  cplx S;
  double norm = 0.0;
  Partition partition;
  std::string branchConvention = kBranchConvention;
};

/// Principal block of `C` on the partition's sites. `C` must cover them.
CorrelationMatrix correlation_submatrix(const CorrelationMatrix& C, const Partition& partition);

/// Eigenvalues of a correlation block, ascending by real part. Hermitian blocks
/// go through a self-adjoint solver and come back with zero imaginary parts.
CVector xi_spectrum(const CorrelationMatrix& CA);

/// -sum [xi log xi + (1 - xi) log(1 - xi)] with the principal logarithm.
cplx entropy_from_xi(const CVector& xi);

/// Largest singular value.
double spectral_norm(const CorrelationMatrix& CA);

/// Block extraction, spectrum, entropy and norm in one pass.
EntanglementResult entanglement(const CorrelationMatrix& C, const Partition& partition);

}  // namespace nhimp
