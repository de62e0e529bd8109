#pragma once

#include <functional>
#include <vector>

namespace choquard::detail {

using Vec = std::vector<double>;
using LinearMap = std::function<Vec(const Vec&)>;

struct GmresResult {
  Vec x;
  double relative_residual = 0.0;
  int matvecs = 0;
  bool converged = false;
};

// Restarted GMRES with right preconditioning, x0 = 0.
GmresResult gmres(const LinearMap& A, const LinearMap& precond, const Vec& b, double rtol, int restart,
                  int max_matvecs);

}  // namespace choquard::detail
