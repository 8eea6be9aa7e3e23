#pragma once

namespace nhimp {

/// Gauss hypergeometric 2F1(1, s; s + 1; x) for real s > 0 and real x != 1.
///
/// For x > 1 the function sits on its branch cut; the principal value (mean of
/// the two boundary values, i.e. the real part) is returned. Accuracy is 1e-12
/// absolute or 1e-14 relative, whichever is looser.
double hyp2f1_1_s(double s, double x);

}  // namespace nhimp
