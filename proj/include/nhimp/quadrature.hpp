#pragma once

#include <functional>

namespace nhimp {

struct QuadratureConfig {
  double absTol = 1e-10;
  double relTol = 1e-10;
  int maxSubdivisions = 2000;

  void validate() const;
};

/// Adaptive Gauss-Kronrod integral of a real function over [a, b].
/// Throws NumericalError(operation, ...) with the achieved error estimate when
/// the tolerance is not met.
double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg,
                 const char* operation);

}  // namespace nhimp
