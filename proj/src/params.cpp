#include "nhimp/params.hpp"

#include <cmath>
#include <string>

#include "nhimp/errors.hpp"

namespace nhimp {

void ModelParams::validate() const {
  if (N < 4) throw InvalidArgument("lattice size N must be >= 4, got " + std::to_string(N));
  validate_couplings();
}

void ModelParams::validate_couplings() const {
  if (!std::isfinite(t) || t == 0.0) throw InvalidArgument("bulk hopping t must be finite and nonzero");
  if (!std::isfinite(tR) || !std::isfinite(tL) || !std::isfinite(mu))
    throw InvalidArgument("t_R, t_L and mu must be finite");
}

ModelParams ModelParams::normalized() const {
  ModelParams p = *this;
  p.tR = tR / t;
  p.tL = tL / t;
  p.mu = mu / t;
  p.t = 1.0;
  return p;
}

void ModelParams::require_half_filling(const char* operation) const {
  if (mu != 0.0)
    throw InvalidArgument(std::string(operation) + ": closed-form correlations need mu = 0 (k_F = pi/2)");
}

}  // namespace nhimp
