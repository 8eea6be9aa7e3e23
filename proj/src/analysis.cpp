#include "nhimp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>

#include "nhimp/errors.hpp"

namespace nhimp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double theta_tilde(double T) {
  const double r = std::sqrt(std::abs(T));
  return std::log(std::abs((1.0 - r) / (1.0 + r)));
}

}  // namespace

FitResult fit_log_scaling(const std::vector<std::pair<int, cplx>>& points, const Partition& partition) {
  if (points.size() < 4) throw InvalidArgument("fit_log_scaling: at least 4 points are required");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int LA = points[i].first;
    if (LA < 2 || LA % 2 != 0) throw InvalidArgument("fit_log_scaling: L_A values must be even and positive");
    if (i > 0 && LA <= points[i - 1].first)
      throw InvalidArgument("fit_log_scaling: L_A values must be strictly increasing");
  }

  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd X(n, 2);
  Eigen::MatrixXd Y(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(static_cast<double>(points[i].first));
    Y(i, 0) = points[i].second.real();
    Y(i, 1) = points[i].second.imag();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < 2) throw NumericalError("fit_log_scaling", "rank-deficient design matrix");
  const Eigen::MatrixXd beta = qr.solve(Y);
  const Eigen::MatrixXd resid = Y - X * beta;

  FitResult r;
  r.cEff = 3.0 * cplx(beta(1, 0), beta(1, 1));
  r.g = cplx(beta(0, 0), beta(0, 1));
  r.rmsResidual = std::sqrt(resid.squaredNorm() / static_cast<double>(n));
  for (const auto& p : points) r.window.push_back(p.first);
  r.partition = partition;
  return r;
}

std::vector<int> default_window(PartitionKind kind, int L0) {
  if (kind == PartitionKind::I) return {64, 128, 256, 512, 1024, 2048};
  std::vector<int> powers;
  for (int p = 16; p <= L0 / 2; p *= 2) powers.push_back(p);
  if (powers.size() < 4)
    throw InvalidArgument("default_window: L_0 = " + std::to_string(L0) +
                          " leaves fewer than four powers of two in [16, L_0/2]; pass an explicit L_A list");
  return {powers.end() - 4, powers.end()};
}

std::vector<EntanglementResult> entropy_series(const ModelParams& params, PartitionKind kind, int L0,
                                               const std::vector<int>& window, Route route,
                                               const AssemblyOptions& options) {
  if (window.empty()) throw InvalidArgument("entropy_series: empty L_A window");
  const int largest = *std::max_element(window.begin(), window.end());
  const Partition outer{kind, largest, kind == PartitionKind::I ? 0 : L0};
  const CorrelationMatrix C = assemble_correlation(params, outer, route, options);

  std::vector<EntanglementResult> out;
  out.reserve(window.size());
  for (const int LA : window) out.push_back(entanglement(C, Partition{kind, LA, outer.L0}));
  return out;
}

FitResult fit_point(const ModelParams& params, PartitionKind kind, int L0, const FitSettings& settings) {
  const std::vector<int> window = settings.window.empty() ? default_window(kind, L0) : settings.window;
  const auto series = entropy_series(params, kind, L0, window, settings.route, settings.assembly);
  std::vector<std::pair<int, cplx>> points;
  for (const auto& ee : series) points.emplace_back(ee.partition.LA, ee.S);
  const int largest = *std::max_element(window.begin(), window.end());
  return fit_log_scaling(points, Partition{kind, largest, kind == PartitionKind::I ? 0 : L0});
}

std::string to_string(FormulaSource source) {
  switch (source) {
    case FormulaSource::unitary: return "unitary";
    case FormulaSource::complex: return "complex";
    case FormulaSource::continuation: return "continuation";
  }
  return "unknown";
}

FormulaPrediction c_eff_unitary(double tR, double tL) {
  const double T = tR * tL;
  if (!(T > 0.0)) throw InvalidArgument("c_eff_unitary: requires t_R t_L > 0");
  FormulaPrediction p;
  const double r = std::sqrt(T);
  p.theta = std::atan(r) * std::atan(1.0 / r);
  p.cEffPredicted = 0.5 + 128.0 / std::pow(kPi, 4) * p.theta * p.theta;
  p.source = FormulaSource::unitary;
  return p;
}

FormulaPrediction c_eff_complex(double tR, double tL) {
  const double T = tR * tL;
  if (!(T < 0.0)) throw InvalidArgument("c_eff_complex: requires t_R t_L < 0");
  if (T == -1.0) throw InvalidArgument("c_eff_complex: diverges at t_R t_L = -1");
  FormulaPrediction p;
  const double th = theta_tilde(T);
  p.thetaTilde = th;
  p.cEffPredicted = cplx(0.5 - 4.0 / (kPi * kPi) * th * th, -16.0 / std::pow(kPi, 3) * th * th * th);
  p.source = FormulaSource::complex;
  return p;
}

FormulaPrediction c_eff_continuation(double tR, double tL) {
  const double T = tR * tL;
  if (!(T < 0.0)) throw InvalidArgument("c_eff_continuation: requires t_R t_L < 0");
  if (T == -1.0) throw InvalidArgument("c_eff_continuation: diverges at t_R t_L = -1");
  FormulaPrediction p;
  const double th = theta_tilde(T);
  const double r = std::sqrt(-T);
  const double inv_hyp = r < 1.0 ? std::atanh(r) : std::atanh(1.0 / r);
  p.thetaTilde = th;
  const double re = 0.5 - 8.0 * th * th / (kPi * kPi) + 32.0 * std::pow(th, 4) / std::pow(kPi, 4) * inv_hyp * inv_hyp;
  p.cEffPredicted = cplx(re, -16.0 / std::pow(kPi, 3) * th * th * th);
  p.source = FormulaSource::continuation;
  return p;
}

DualityReport duality_check(const ModelParams& params, PartitionKind kind, int L0, const FitSettings& settings) {
  if (params.tR == 0.0 || params.tL == 0.0) throw InvalidArgument("duality_check: t_R and t_L must be nonzero");
  ModelParams dual = params;
  dual.tR = params.t * params.t / params.tR;
  dual.tL = params.t * params.t / params.tL;

  DualityReport r;
  r.original = fit_point(params, kind, L0, settings);
  r.dual = fit_point(dual, kind, L0, settings);
  r.deltaC = std::abs(r.dual.cEff - r.original.cEff);
  r.deltaG = r.dual.g - r.original.g;
  return r;
}

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::q1_real: return "Q1-real";
    case Phase::q2_complex: return "Q2-complex";
    case Phase::boundary: return "boundary";
    case Phase::excluded: return "excluded";
    case Phase::indeterminate: return "indeterminate";
  }
  return "unknown";
}

Phase classify_phase(double tR, double tL, const EntanglementResult& ee) {
  const double T = tR * tL;
  if (std::abs(T + 1.0) < kPhaseGuard || std::abs(T - 1.0) < kPhaseGuard) return Phase::excluded;
  if (T == 0.0) return Phase::boundary;
  if (T > 0.0) return std::abs(ee.S.imag()) <= 1e-6 ? Phase::q1_real : Phase::indeterminate;
  return ee.norm > 1.0 + 1e-6 ? Phase::q2_complex : Phase::indeterminate;
}

PhasePoint phase_point(const ModelParams& params, PartitionKind kind, int L0, const FitSettings& settings) {
  PhasePoint pp;
  pp.tR = params.tR;
  pp.tL = params.tL;
  const double T = params.product();
  if (std::abs(T + 1.0) < kPhaseGuard || std::abs(T - 1.0) < kPhaseGuard) {
    pp.cEffFit = pp.cEffFormula = cplx(kNaN, kNaN);
    pp.norm = kNaN;
    pp.phase = Phase::excluded;
    return pp;
  }

  const std::vector<int> window = settings.window.empty() ? default_window(kind, L0) : settings.window;
  const auto series = entropy_series(params, kind, L0, window, settings.route, settings.assembly);
  std::vector<std::pair<int, cplx>> points;
  for (const auto& ee : series) points.emplace_back(ee.partition.LA, ee.S);
  const int largest = *std::max_element(window.begin(), window.end());
  const FitResult fit = fit_log_scaling(points, Partition{kind, largest, kind == PartitionKind::I ? 0 : L0});

  const EntanglementResult& widest = *std::max_element(
      series.begin(), series.end(), [](const auto& a, const auto& b) { return a.partition.LA < b.partition.LA; });
  pp.cEffFit = fit.cEff;
  pp.norm = widest.norm;
  if (T > 0.0) pp.cEffFormula = c_eff_unitary(T, 1.0).cEffPredicted;
  else if (T < 0.0) pp.cEffFormula = c_eff_complex(T, 1.0).cEffPredicted;
  else pp.cEffFormula = 0.5;
  pp.phase = classify_phase(T, 1.0, widest);
  return pp;
}

}  // namespace nhimp
