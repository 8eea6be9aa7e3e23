#pragma once

#include <string>

#include "nhimp/params.hpp"
#include "nhimp/partition.hpp"
#include "nhimp/quadrature.hpp"
#include "nhimp/spectral.hpp"

namespace nhimp {

enum class Route { numeric, analytic, asymptotic };

std::string to_string(Route route);
Route parse_route(const std::string& text);

/// Correlation block C(l, m) = <G^L| c^dag_l c_m |G^R> on sites offset..offset+L-1.
struct CorrelationMatrix {
  CMatrix entries;
  int offset = 1;
  Route provenance = Route::analytic;
  /// Set when ||C - C^dag||_max <= kHermitianTolerance.
  bool hermitian = false;
};

inline constexpr double kHermitianTolerance = 1e-8;

/// Distance from |t_R t_L| = 1 inside which the closed forms are not used.
inline constexpr double kUnitProductGuard = 1e-6;

/// sin(pi d / 2) / (pi d), and 1/2 at d = 0.
double sine_kernel(long d);

/// Impurity term by direct integration over the Fermi sea k in [-pi/2, pi/2].
/// Exactly 0 at t_R t_L = 1. Rejects |t_R t_L + 1| <= kUnitProductGuard, where
/// the integral diverges.
cplx impurity_term_quadrature(int l, int m, const ModelParams& params, const QuadratureConfig& cfg = {});

/// Residue/hypergeometric evaluation of the same integral. Rejects
/// ||t_R t_L| - 1| <= kUnitProductGuard.
cplx impurity_term_closed(int l, int m, const ModelParams& params);

/// Occupied bound-state term ((T - 1)/2) T^{-(l+m)/2} for T = t_R t_L > 1, else 0.
double bound_contribution(int l, int m, const ModelParams& params);

/// Large-(l+m) form with the hypergeometric factor replaced by 1/(1 + T).
/// Rejects |T + 1| <= kUnitProductGuard.
double asymptotic_corr(int l, int m, const ModelParams& params);

struct AssemblyOptions {
  /// Add the occupied bound state on the analytic and asymptotic routes.
  bool includeBound = true;
  /// On the analytic route, use quadrature where the closed form is guarded out.
  bool quadratureFallback = false;
  QuadratureConfig quadrature{};
};

/// Partition block of the correlation matrix by the requested route. The
/// numeric route needs params.N and fails with "half-filling ambiguity" when
/// the finite spectrum has zero modes; the other two need mu = 0.
CorrelationMatrix assemble_correlation(const ModelParams& params, const Partition& partition, Route route,
                                       const AssemblyOptions& options = {});

/// Finite-N correlation sum_{occupied k} conj(left(l, k)) right(m, k) on sites
/// first..first+size-1 (1-based).
CMatrix numeric_correlation(const EigenSystem& es, int first, int size);

/// max |C - C^dag| entry.
double hermiticity_defect(const CMatrix& C);

}  // namespace nhimp
