#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nhimp/correlation.hpp"
#include "nhimp/entanglement.hpp"

namespace nhimp {

/// Fit of S = (c_eff / 3) ln L_A + g, real and imaginary parts separately.
struct FitResult {
  cplx cEff;
  cplx g;
  double rmsResidual = 0.0;
  std::vector<int> window;
  Partition partition;
};

/// Requires at least four points with even, strictly increasing L_A.
FitResult fit_log_scaling(const std::vector<std::pair<int, cplx>>& points, const Partition& partition);

/// Even L_A from 64 to 2048 for kind I. For kind II the four largest powers of
/// two in [16, L_0/2], so the subsystem never reaches back to the impurity.
std::vector<int> default_window(PartitionKind kind, int L0);

/// Guard on |t_R t_L +- 1| for fit points and phase labels.
inline constexpr double kPhaseGuard = 1e-3;

struct FitSettings {
  Route route = Route::analytic;
  std::vector<int> window;  ///< empty: default_window
  AssemblyOptions assembly{true, true, {}};
};

/// Entropies for every L_A in `window` from one correlation block at the
/// largest L_A (smaller subsystems are its leading principal blocks).
std::vector<EntanglementResult> entropy_series(const ModelParams& params, PartitionKind kind, int L0,
                                               const std::vector<int>& window, Route route,
                                               const AssemblyOptions& options = {true, true, {}});

/// entropy_series followed by fit_log_scaling.
FitResult fit_point(const ModelParams& params, PartitionKind kind, int L0, const FitSettings& settings = {});

enum class FormulaSource { unitary, complex, continuation };
std::string to_string(FormulaSource source);

struct FormulaPrediction {
  double theta = 0.0;       ///< arctan(sqrt T) arctan(1/sqrt T), positive products only
  double thetaTilde = 0.0;  ///< ln|(1 - sqrt|T|)/(1 + sqrt|T|)|, negative products only
  cplx cEffPredicted;
  FormulaSource source = FormulaSource::unitary;
};

/// 1/2 + (128/pi^4) Theta^2 for t_R t_L > 0.
FormulaPrediction c_eff_unitary(double tR, double tL);
/// Re = 1/2 - (4/pi^2) ThetaTilde^2, Im = -(16/pi^3) ThetaTilde^3 for t_R t_L < 0.
FormulaPrediction c_eff_complex(double tR, double tL);
/// The positive-product law continued to t_R -> -t_R (arctanh below |T| = 1,
/// arccoth above); same imaginary part as c_eff_complex.
FormulaPrediction c_eff_continuation(double tR, double tL);

struct DualityReport {
  FitResult original;
  FitResult dual;
  double deltaC = 0.0;  ///< |c_eff(dual) - c_eff(original)|
  cplx deltaG;          ///< g(dual) - g(original)
};

/// Fits at (t_R, t_L) and the dual point (t^2/t_R, t^2/t_L) with identical settings.
DualityReport duality_check(const ModelParams& params, PartitionKind kind = PartitionKind::I, int L0 = 0,
                            const FitSettings& settings = {});

enum class Phase { q1_real, q2_complex, boundary, excluded, indeterminate };
std::string to_string(Phase phase);

struct PhasePoint {
  double tR = 0.0;
  double tL = 0.0;
  cplx cEffFit;
  cplx cEffFormula;
  double norm = 0.0;
  Phase phase = Phase::indeterminate;
};

/// Label from the product sign and the entanglement diagnostics. Points whose
/// diagnostics contradict their quadrant are `indeterminate`.
Phase classify_phase(double tR, double tL, const EntanglementResult& ee);

/// Full pipeline for one sweep point: fit, formula and label. Guard-banded
/// points are returned as `excluded` with NaN numbers and no computation.
PhasePoint phase_point(const ModelParams& params, PartitionKind kind = PartitionKind::I, int L0 = 0,
                       const FitSettings& settings = {});

}  // namespace nhimp
