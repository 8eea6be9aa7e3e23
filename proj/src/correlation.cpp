#include "nhimp/correlation.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "nhimp/errors.hpp"
#include "nhimp/special.hpp"
#include "nhimp/spectral.hpp"

namespace nhimp {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(pi n / 2) for integer n, exactly
double sin_half_pi(long n) {
  const long r = ((n % 4) + 4) % 4;
  return r == 1 ? 1.0 : (r == 3 ? -1.0 : 0.0);
}

void require_sites(int l, int m) {
  if (l < 1 || m < 1) throw InvalidArgument("site indices are 1-based and must be positive");
}

double gauge_sign(const ModelParams& params, long n) { return (params.t < 0.0 && (n % 2 != 0)) ? -1.0 : 1.0; }

// (1 - T)/2 * T^{-n/2}; for T < -1 only even n carries a real residue term.
double residue_term(long n, double T) {
  if (std::abs(T) <= 1.0) return 0.0;
  if (T > 0.0) return 0.5 * (1.0 - T) * std::pow(T, -0.5 * static_cast<double>(n));
  if (n % 2 != 0) return 0.0;
  const double sign = ((n / 2) % 2 == 0) ? 1.0 : -1.0;
  return 0.5 * (1.0 - T) * sign * std::pow(-T, -0.5 * static_cast<double>(n));
}

double closed_term(long n, double T) {
  double value = residue_term(n, T);
  if (n % 2 != 0) {
    const double a = (1.0 - T) * sin_half_pi(n) / (kPi * static_cast<double>(n));
    value -= a * hyp2f1_1_s(0.5 * static_cast<double>(n), -T);
  }
  return value;
}

double quadrature_term(long n, double T, const QuadratureConfig& cfg) {
  if (T == 1.0) return 0.0;
  const double dn = static_cast<double>(n);
  // Re[e^{ink} / (T e^{2ik} - 1)] is even in k, so integrate over [0, pi/2] twice.
  auto integrand = [dn, T](double k) {
    const cplx num = std::polar(1.0, dn * k);
    const cplx den = T * std::polar(1.0, 2.0 * k) - 1.0;
    return (num / den).real();
  };
  const double integral = integrate(integrand, 0.0, 0.5 * kPi, cfg, "impurity_term_quadrature");
  return (1.0 - T) / kPi * integral;
}

double bound_term(long n, double T) {
  return T > 1.0 ? 0.5 * (T - 1.0) * std::pow(T, -0.5 * static_cast<double>(n)) : 0.0;
}

double asymptotic_term(long n, double T) {
  return -(1.0 - T) / (1.0 + T) * sin_half_pi(n) / (kPi * static_cast<double>(n)) + residue_term(n, T);
}

}  // namespace

std::string to_string(Route route) {
  switch (route) {
    case Route::numeric: return "numeric";
    case Route::analytic: return "analytic";
    case Route::asymptotic: return "asymptotic";
  }
  return "unknown";
}

Route parse_route(const std::string& text) {
  if (text == "numeric") return Route::numeric;
  if (text == "analytic") return Route::analytic;
  if (text == "asymptotic") return Route::asymptotic;
  throw InvalidArgument("route must be numeric, analytic or asymptotic, got '" + text + "'");
}

double sine_kernel(long d) {
  if (d == 0) return 0.5;
  return sin_half_pi(d) / (kPi * static_cast<double>(d));
}

cplx impurity_term_quadrature(int l, int m, const ModelParams& params, const QuadratureConfig& cfg) {
  require_sites(l, m);
  params.validate_couplings();
  const double T = params.product();
  if (std::abs(T + 1.0) <= kUnitProductGuard)
    throw InvalidArgument("impurity_term_quadrature: the integral diverges at t_R t_L = -1");
  if (T != 1.0 && std::abs(T - 1.0) <= kUnitProductGuard)
    throw InvalidArgument("impurity_term_quadrature: t_R t_L inside the guard band around 1");
  const long n = static_cast<long>(l) + m;
  return gauge_sign(params, n) * quadrature_term(n, T, cfg);
}

cplx impurity_term_closed(int l, int m, const ModelParams& params) {
  require_sites(l, m);
  params.validate_couplings();
  const double T = params.product();
  if (std::abs(std::abs(T) - 1.0) <= kUnitProductGuard)
    throw InvalidArgument("impurity_term_closed: |t_R t_L| = 1 is outside the closed form");
  const long n = static_cast<long>(l) + m;
  return gauge_sign(params, n) * closed_term(n, T);
}

double bound_contribution(int l, int m, const ModelParams& params) {
  require_sites(l, m);
  params.validate_couplings();
  const long n = static_cast<long>(l) + m;
  return gauge_sign(params, n) * bound_term(n, params.product());
}

double asymptotic_corr(int l, int m, const ModelParams& params) {
  require_sites(l, m);
  params.validate_couplings();
  const double T = params.product();
  if (std::abs(T + 1.0) <= kUnitProductGuard) throw InvalidArgument("asymptotic_corr: diverges at t_R t_L = -1");
  const long n = static_cast<long>(l) + m;
  return gauge_sign(params, n) * (sine_kernel(static_cast<long>(l) - m) + asymptotic_term(n, T));
}

CMatrix numeric_correlation(const EigenSystem& es, int first, int size) {
  const auto N = es.energies.size();
  if (first < 1 || size < 1 || first - 1 + size > N) throw InvalidArgument("numeric_correlation: sites outside the chain");
  std::vector<Eigen::Index> occ;
  for (Eigen::Index k = 0; k < N; ++k)
    if (es.occupied[k]) occ.push_back(k);

  CMatrix Lsub(size, occ.size()), Rsub(size, occ.size());
  for (std::size_t j = 0; j < occ.size(); ++j) {
    Lsub.col(j) = es.left.col(occ[j]).segment(first - 1, size);
    Rsub.col(j) = es.right.col(occ[j]).segment(first - 1, size);
  }
  return Lsub.conjugate() * Rsub.transpose();
}

double hermiticity_defect(const CMatrix& C) {
  if (C.size() == 0) return 0.0;
  return (C - C.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

CorrelationMatrix numeric_block(const ModelParams& params, const Partition& part) {
  params.validate();
  if (2 * (static_cast<long>(part.L0) + part.LA) >= params.N)
    throw InvalidArgument("numeric route: the subsystem needs L_0 + L_A < N/2");

  const EigenSystem es = solve_biorthogonal(build_hamiltonian(params));
  require_unambiguous_filling(es);

  CorrelationMatrix out;
  out.entries = numeric_correlation(es, part.first_site(), part.LA);
  out.offset = part.first_site();
  out.provenance = Route::numeric;
  out.hermitian = hermiticity_defect(out.entries) <= kHermitianTolerance;
  return out;
}

CorrelationMatrix thermodynamic_block(const ModelParams& params, const Partition& part, Route route,
                                      const AssemblyOptions& options) {
  params.validate_couplings();
  params.require_half_filling(route == Route::analytic ? "analytic correlation" : "asymptotic correlation");
  const double T = params.product();
  if (std::abs(T + 1.0) <= kUnitProductGuard)
    throw InvalidArgument("correlation: t_R t_L = -1 is the divergence point");

  const bool near_unit = std::abs(std::abs(T) - 1.0) <= kUnitProductGuard;
  if (route == Route::analytic && near_unit && !options.quadratureFallback)
    throw InvalidArgument("analytic correlation: |t_R t_L| = 1 needs the quadrature fallback");

  // Entries depend on l - m and l + m only; tabulate both profiles once.
  const long first = part.first_site();
  const long last = part.last_site();
  std::vector<double> diff(static_cast<std::size_t>(part.LA));
  for (long d = 0; d < part.LA; ++d) diff[d] = sine_kernel(d);

  const long n_lo = 2 * first, n_hi = 2 * last;
  std::vector<double> sum(static_cast<std::size_t>(n_hi - n_lo + 1));
  for (long n = n_lo; n <= n_hi; ++n) {
    double value;
    if (route == Route::asymptotic) value = asymptotic_term(n, T);
    else if (near_unit) value = quadrature_term(n, T, options.quadrature);
    else value = closed_term(n, T);
    if (options.includeBound) value += bound_term(n, T);
    sum[n - n_lo] = gauge_sign(params, n) * value;
  }

  CorrelationMatrix out;
  out.entries.resize(part.LA, part.LA);
  for (long i = 0; i < part.LA; ++i)
    for (long j = 0; j < part.LA; ++j) {
      const long l = first + i, m = first + j;
      const double kernel = gauge_sign(params, l + m) * diff[std::abs(l - m)];
      out.entries(i, j) = kernel + sum[l + m - n_lo];
    }
  out.offset = static_cast<int>(first);
  out.provenance = route;
  out.hermitian = true;  // real symmetric by construction for real t_R t_L
  return out;
}

}  // namespace

CorrelationMatrix assemble_correlation(const ModelParams& params, const Partition& partition, Route route,
                                       const AssemblyOptions& options) {
  partition.validate();
  if (route == Route::numeric) return numeric_block(params, partition);
  return thermodynamic_block(params, partition, route, options);
}

}  // namespace nhimp
