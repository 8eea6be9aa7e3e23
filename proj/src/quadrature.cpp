#include "nhimp/quadrature.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "nhimp/errors.hpp"

namespace nhimp {

void QuadratureConfig::validate() const {
  if (!(absTol > 0.0) || !(relTol > 0.0)) throw InvalidArgument("QuadratureConfig: tolerances must be positive");
  if (maxSubdivisions < 1) throw InvalidArgument("QuadratureConfig: maxSubdivisions must be at least 1");
}

namespace {

double trampoline(double x, void* data) { return (*static_cast<const std::function<double(double)>*>(data))(x); }

struct WorkspaceDeleter {
  void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureConfig& cfg,
                 const char* operation) {
  cfg.validate();
  // GSL's default handler aborts; errors are reported through return codes instead.
  static const gsl_error_handler_t* previous = gsl_set_error_handler_off();
  (void)previous;

  std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter> ws(
      gsl_integration_workspace_alloc(static_cast<std::size_t>(cfg.maxSubdivisions)));
  if (!ws) throw NumericalError(operation, "could not allocate quadrature workspace");

  gsl_function fn;
  fn.function = &trampoline;
  fn.params = const_cast<std::function<double(double)>*>(&f);

  double result = 0.0, error = 0.0;
  const int status = gsl_integration_qag(&fn, a, b, cfg.absTol, cfg.relTol, static_cast<std::size_t>(cfg.maxSubdivisions),
                                         GSL_INTEG_GAUSS61, ws.get(), &result, &error);
  if (status != GSL_SUCCESS || !std::isfinite(result)) {
    std::ostringstream msg;
    msg << "quadrature did not converge (" << gsl_strerror(status) << "), achieved error estimate " << error;
    throw NumericalError(operation, msg.str());
  }
  return result;
}

}  // namespace nhimp
