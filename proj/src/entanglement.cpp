#include "nhimp/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nhimp/errors.hpp"

namespace nhimp {

namespace {

double condition_estimate(const CMatrix& A) {
  Eigen::PartialPivLU<CMatrix> lu(A);
  const double rcond = lu.rcond();
  return rcond > 0.0 ? 1.0 / rcond : INFINITY;
}

[[noreturn]] void eigensolver_failed(const CMatrix& A) {
  std::ostringstream msg;
  msg << "eigensolver did not converge on a " << A.rows() << "x" << A.cols() << " block (condition estimate "
      << condition_estimate(A) << ")";
  throw NumericalError("xi_spectrum", msg.str());
}

double xlogx_real(double x) { return x * std::log(x); }

cplx xlogx(cplx x) {
  if (std::abs(x) < kXiEdgeTolerance) return 0.0;
  if (x.imag() == 0.0) {
    if (x.real() > 0.0) return xlogx_real(x.real());
    x = cplx(x.real(), 0.0);  // a signed -0 imaginary part would select the -i pi side
  }
  return x * std::log(x);
}

}  // namespace

CorrelationMatrix correlation_submatrix(const CorrelationMatrix& C, const Partition& partition) {
  partition.validate();
  const long lo = static_cast<long>(partition.first_site()) - C.offset;
  if (lo < 0 || lo + partition.LA > C.entries.rows())
    throw InvalidArgument("correlation_submatrix: partition sites outside the correlation block");
  CorrelationMatrix out;
  out.entries = C.entries.block(lo, lo, partition.LA, partition.LA);
  out.offset = partition.first_site();
  out.provenance = C.provenance;
  out.hermitian = C.hermitian;
  return out;
}

CVector xi_spectrum(const CorrelationMatrix& CA) {
  const CMatrix& A = CA.entries;
  if (A.rows() != A.cols()) throw InvalidArgument("xi_spectrum: block must be square");
  if (A.size() == 0) return CVector();

  if (CA.hermitian) {
    if ((A.imag().array() == 0.0).all()) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.real(), Eigen::EigenvaluesOnly);
      if (es.info() != Eigen::Success) eigensolver_failed(A);
      return es.eigenvalues().cast<cplx>();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) eigensolver_failed(A);
    return es.eigenvalues().cast<cplx>();
  }

  Eigen::ComplexEigenSolver<CMatrix> es(A, false);
  if (es.info() != Eigen::Success) eigensolver_failed(A);
  CVector xi = es.eigenvalues();
  std::vector<cplx> v(xi.data(), xi.data() + xi.size());
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return Eigen::Map<CVector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

cplx entropy_from_xi(const CVector& xi) {
  cplx S = 0.0;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    if (std::abs(xi(i)) < kXiEdgeTolerance || std::abs(1.0 - xi(i)) < kXiEdgeTolerance) continue;
    S -= xlogx(xi(i)) + xlogx(1.0 - xi(i));
  }
  return S;
}

double spectral_norm(const CorrelationMatrix& CA) {
  const CMatrix& A = CA.entries;
  if (A.rows() != A.cols()) throw InvalidArgument("spectral_norm: block must be square");
  if (A.size() == 0) return 0.0;
  if (CA.hermitian) return xi_spectrum(CA).cwiseAbs().maxCoeff();
  Eigen::BDCSVD<CMatrix> svd(A);
  return svd.singularValues()(0);
}

EntanglementResult entanglement(const CorrelationMatrix& C, const Partition& partition) {
  const CorrelationMatrix block = correlation_submatrix(C, partition);
  EntanglementResult r;
  r.xi = xi_spectrum(block);
  r.S = entropy_from_xi(r.xi);
  r.norm = block.hermitian ? r.xi.cwiseAbs().maxCoeff() : spectral_norm(block);
  r.partition = partition;
  return r;
}

}  // namespace nhimp
