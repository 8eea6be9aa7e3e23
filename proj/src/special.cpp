#include "nhimp/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <gsl/gsl_sf_psi.h>

#include "nhimp/errors.hpp"

namespace nhimp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesRadius = 0.7;
constexpr double kPfaffLimit = -3.0;
constexpr double kStop = 1e-17;
constexpr int kMaxTerms = 100000;

[[noreturn]] void no_convergence(const char* branch, double s, double x) {
  throw NumericalError("hyp2f1_1_s", std::string(branch) + " did not converge at s = " + std::to_string(s) +
                                         ", x = " + std::to_string(x));
}

// s * sum_j x^j / (s + j)
double direct_series(double s, double x) {
  double sum = 0.0, xp = 1.0;
  for (int j = 0; j < kMaxTerms; ++j) {
    const double term = s * xp / (s + j);
    sum += term;
    if (j > 2 && std::abs(term) <= kStop * std::abs(sum)) return sum;
    xp *= x;
  }
  no_convergence("power series", s, x);
}

// Pfaff: F(1,s;s+1;x) = (1-x)^-1 F(1,1;s+1;w), w = x/(x-1) in (0, 3/4] for x in [-3, 0)
double pfaff_series(double s, double x) {
  const double w = x / (x - 1.0);
  double sum = 0.0, term = 1.0;
  for (int j = 0; j < kMaxTerms; ++j) {
    sum += term;
    if (term <= kStop * sum) return sum / (1.0 - x);
    term *= (j + 1.0) / (s + 1.0 + j) * w;
  }
  no_convergence("Pfaff series", s, x);
}

// Expansion in 1/x; for x > 1 the lead term is replaced by its principal value.
double inverse_series(double s, double x) {
  const double ax = std::abs(x);
  const double rounded = std::round(s);
  if (std::abs(s - rounded) > 1e-14) {
    const double lead = x < 0.0 ? kPi * s * std::pow(ax, -s) / std::sin(kPi * s)
                                : kPi * s * std::pow(x, -s) / std::tan(kPi * s);
    double sum = 0.0, xp = 1.0;
    for (int j = 1; j < kMaxTerms; ++j) {
      xp /= x;
      const double term = xp / (s - j);
      sum += term;
      if (j > s + 2 && std::abs(term) <= kStop * std::abs(sum)) return lead - s * sum;
    }
    no_convergence("1/x expansion", s, x);
  }

  // integer s: the gamma poles merge into a logarithm
  const int si = static_cast<int>(rounded);
  const double xs = std::pow(x, -s);
  double tail = 0.0, xp = xs;
  int j = 1;
  for (; j < kMaxTerms; ++j) {
    xp /= x;
    const double term = xp / j;
    tail += term;
    if (std::abs(term) <= kStop * std::abs(tail)) break;
  }
  if (j == kMaxTerms) no_convergence("1/x expansion", s, x);
  double head = 0.0;
  xp = 1.0;
  for (int i = 1; i < si; ++i) {
    xp /= x;
    head += xp / (s - i);
  }
  return -s * xs * std::log(ax) + s * tail - s * head;
}

// Logarithmic expansion about x = 1 (c = a + b case), real part off the cut.
double log_series(double s, double x) {
  const double y = 1.0 - x;
  const double L = std::log(std::abs(y));
  double psi1 = gsl_sf_psi(1.0), psis = gsl_sf_psi(s);
  double coef = 1.0, yp = 1.0, sum = 0.0;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double weight = coef * yp;
    sum += weight * (psi1 - psis - L);
    if (k > 5 && std::abs(weight) <= kStop * std::max(std::abs(sum), 1.0)) return s * sum;
    psi1 += 1.0 / (k + 1.0);
    psis += 1.0 / (s + k);
    coef *= (s + k) / (k + 1.0);
    yp *= y;
  }
  no_convergence("expansion about x = 1", s, x);
}

}  // namespace

double hyp2f1_1_s(double s, double x) {
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidArgument("hyp2f1_1_s: s must be positive and finite");
  if (!std::isfinite(x)) throw InvalidArgument("hyp2f1_1_s: x must be finite");
  if (x == 1.0) throw InvalidArgument("hyp2f1_1_s: x = 1 is a logarithmic singularity");

  if (std::abs(x) <= kSeriesRadius) return direct_series(s, x);
  if (x < 0.0) return x >= kPfaffLimit ? pfaff_series(s, x) : inverse_series(s, x);
  if (x < 1.0) return s * (1.0 - x) <= 1.0 ? log_series(s, x) : direct_series(s, x);
  return (x - 1.0 < 0.5 && s * (x - 1.0) <= 3.0) ? log_series(s, x) : inverse_series(s, x);
}

}  // namespace nhimp
