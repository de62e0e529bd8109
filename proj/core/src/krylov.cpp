#include "krylov.hpp"

#include <cmath>

namespace choquard::detail {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void axpy(double a, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

}  // namespace

GmresResult gmres(const LinearMap& A, const LinearMap& precond, const Vec& b, double rtol, int restart,
                  int max_matvecs) {
  const std::size_t n = b.size();
  GmresResult out;
  out.x.assign(n, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Vec r = b;
  double beta = bnorm;
  while (out.matvecs < max_matvecs) {
    std::vector<Vec> V{r};
    for (double& v : V[0]) v /= beta;
    std::vector<Vec> Z;
    std::vector<std::vector<double>> H;
    std::vector<double> cs, sn, g{beta};
    int k = 0;
    for (; k < restart && out.matvecs < max_matvecs; ++k) {
      Z.push_back(precond(V[k]));
      Vec w = A(Z[k]);
      ++out.matvecs;
      std::vector<double> h(k + 2, 0.0);
      for (int i = 0; i <= k; ++i) {
        h[i] = dot(w, V[i]);
        axpy(-h[i], V[i], w);
      }
      h[k + 1] = std::sqrt(dot(w, w));
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * h[i] + sn[i] * h[i + 1];
        h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
        h[i] = t;
      }
      const double den = std::hypot(h[k], h[k + 1]);
      cs.push_back(den == 0.0 ? 1.0 : h[k] / den);
      sn.push_back(den == 0.0 ? 0.0 : h[k + 1] / den);
      const double hk1 = h[k + 1];
      h[k] = cs[k] * h[k] + sn[k] * hk1;
      h[k + 1] = 0.0;
      g.push_back(-sn[k] * g[k]);
      g[k] = cs[k] * g[k];
      H.push_back(h);
      out.relative_residual = std::abs(g[k + 1]) / bnorm;
      if (out.relative_residual <= rtol || hk1 == 0.0) {
        ++k;
        break;
      }
      for (double& v : w) v /= hk1;
      V.push_back(std::move(w));
    }
    // Back substitution on the k x k triangular system.
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double acc = g[i];
      for (int j = i + 1; j < k; ++j) acc -= H[j][i] * y[j];
      y[i] = acc / H[i][i];
    }
    for (int i = 0; i < k; ++i) axpy(y[i], Z[i], out.x);
    if (out.relative_residual <= rtol) break;
    Vec Ax = A(out.x);
    ++out.matvecs;
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ax[i];
    beta = std::sqrt(dot(r, r));
    out.relative_residual = beta / bnorm;
    if (out.relative_residual <= rtol) break;
  }
  out.converged = out.relative_residual <= rtol;
  return out;
}

}  // namespace choquard::detail
