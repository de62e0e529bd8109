#pragma once

#include <complex>
#include <string>
#include <vector>

#include "choquard/grid.hpp"

namespace choquard {

// Truncated: Fourier transform of A|x|^{-mu} restricted to |x| < L, computed by
// radial quadrature; spectrally accurate for fields supported in |x| < L/2.
// Sampled: FFT of the kernel sampled on the grid with the origin cell replaced
// by the cell average of |x|^{-mu}; exactly the discrete periodic convolution.
enum class KernelScheme { Truncated, Sampled };

std::string to_string(KernelScheme k);
KernelScheme kernel_scheme_from_string(const std::string& s);

// Average of |y|^{-mu} over the unit cube [-1/2, 1/2]^N.
double unit_cell_average(int N, double mu);

// |k|^{2s} on the half spectrum.
std::vector<double> fractional_multiplier(const Grid& g, double s);
// Riesz multiplier on the half spectrum, including the normalization A_{N,mu}.
std::vector<double> riesz_multiplier(const Grid& g, double mu, KernelScheme scheme);

class SpectralOps {
 public:
  // Falls back to the sampled kernel if the truncated multiplier has negative entries.
  SpectralOps(const Grid& g, double s, double mu, KernelScheme scheme = KernelScheme::Truncated);

  const Grid& grid() const { return grid_; }
  double s() const { return s_; }
  double mu() const { return mu_; }
  KernelScheme kernel_scheme() const { return scheme_; }
  bool kernel_fallback() const { return fallback_; }
  const std::vector<double>& lap_multiplier() const { return lap_; }
  const std::vector<double>& riesz_multiplier_table() const { return riesz_; }

  // Operators for the same arrays on the box scaled by sigma; exact scaling laws.
  SpectralOps rescaled(double sigma) const;

  Field fractional_laplacian(const Field& u) const;
  Field riesz_convolve(const Field& f) const;
  Field apply_multiplier(const Field& u, const std::vector<double>& m) const;

  // h^N sum (I * |u|^t) |u|^t, evaluated through Parseval.
  double choquard_integral(const Field& u, double t) const;
  double hs_seminorm_sq(const Field& u) const;

  // sum_k weight * m(k) |f^(k)|^2 scaled to a cell-volume weighted integral.
  double quadratic_form(const std::vector<std::complex<double>>& fhat, const std::vector<double>& m) const;
  std::vector<std::complex<double>> transform(const Field& u) const;
  Field inverse(const std::vector<std::complex<double>>& uhat) const;

 private:
  Grid grid_;
  double s_ = 0.0;
  double mu_ = 0.0;
  KernelScheme scheme_ = KernelScheme::Truncated;
  bool fallback_ = false;
  std::vector<double> lap_;
  std::vector<double> riesz_;
};

// Multiplier action with an arbitrary order s, used for composition checks.
Field fractional_laplacian(const Field& u, double s);

double l2_norm(const Field& u);
// Returns u * c / ||u||_2; throws DomainError on a zero field.
Field normalize_mass(const Field& u, double c);

}  // namespace choquard
