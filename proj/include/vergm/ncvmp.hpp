#pragma once

#include <vector>

#include "vergm/gaussian.hpp"
#include "vergm/pseudo.hpp"
#include "vergm/quadrature.hpp"

namespace vergm {

struct NcvmpConfig {
  double tol = 1e-5;  // relative increase of the approximate bound
  int max_iters = 500;
  int quad_order = 80;
  double rho0 = 0.5;  // first damped step size, used only after a decrease
  int max_halvings = 6;
};

struct NcvmpResult {
  GaussianVariational q;
  std::vector<double> trace;  // approximate bound, starting with the initial value
  std::vector<double> rho;    // step size accepted at each iteration
  int iterations = 0;
  bool converged = false;
};

/// Approximate ELBO E_q[log p~(y, theta) - log q(theta)] with the dyad
/// expectations by quadrature.
double elbo_tilde(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& q,
                  const GaussHermite& quad);

/// mu = theta_ML, Sigma = 0.01 I.
GaussianVariational ncvmp_default_init(const AdjustedPL& apl);

/// One natural-gradient step of size rho from q (rho = 1 is the plain update).
/// Throws NumericalError if the new precision is not positive definite.
GaussianVariational ncvmp_step(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& q,
                               const GaussHermite& quad, double rho);

NcvmpResult ncvmp_fit(const AdjustedPL& apl, const GaussianPrior& prior, const GaussianVariational& init,
                      const NcvmpConfig& cfg = {});

}  // namespace vergm
