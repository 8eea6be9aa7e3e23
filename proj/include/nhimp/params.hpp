#pragma once

#include <complex>

#include <Eigen/Dense>

namespace nhimp {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Physical parameters of the ring with one impurity bond between sites N and 1.
///
/// Bulk bonds carry hopping -t, the impurity bond carries -t_R (c^dag_1 c_N) and
/// -t_L (c^dag_N c_1), the diagonal carries -mu. All amplitudes are real.
struct ModelParams {
  double t = 1.0;
  double tR = 0.0;
  double tL = 0.0;
  double mu = 0.0;
  int N = 0;

  /// Impurity product t_R t_L in units of t^2.
  double product() const noexcept { return tR * tL / (t * t); }

  /// Throws InvalidArgument unless N >= 4, t != 0 and every amplitude is finite.
  void validate() const;

  /// Amplitude checks only; the thermodynamic-limit routes never look at N.
  void validate_couplings() const;

  /// Same model in units t = 1 (hoppings and mu divided by t).
  ModelParams normalized() const;

  /// Throws InvalidArgument when mu != 0; the closed-form routes assume k_F = pi/2.
  void require_half_filling(const char* operation) const;
};

}  // namespace nhimp
