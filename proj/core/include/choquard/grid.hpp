#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace choquard {

inline constexpr std::size_t kDefaultMaxPoints = std::size_t{1} << 24;

struct FftPlans;

// Periodic box [-L, L)^N sampled with M points per axis, x_j = -L + j h.
// Fields are stored row-major with axis 0 slowest. Transforms are unnormalized
// real-to-complex FFTs over the half spectrum (last axis has M/2 + 1 entries).
class Grid {
 public:
  Grid(int N, int M, double L, std::size_t max_points = kDefaultMaxPoints);

  int dim() const { return N_; }
  int points_per_axis() const { return M_; }
  double half_length() const { return L_; }
  double spacing() const { return h_; }
  double cell_volume() const { return cell_volume_; }
  std::size_t size() const { return size_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  // Coordinate of 1-d index j along any axis.
  double coordinate(int j) const { return -L_ + j * h_; }
  std::array<int, 3> unflatten(std::size_t flat) const;
  double radius(std::size_t flat) const;

  // Integer squared wave number |n|^2 per half-spectrum entry; k = (pi / L) n.
  const std::vector<std::int64_t>& spectrum_n2() const { return *n2_; }
  // Multiplicity of each half-spectrum entry in the full spectrum (1 or 2).
  const std::vector<double>& spectrum_weight() const { return *weight_; }
  double wavenumber_unit() const;

  void forward(const double* in, std::complex<double>* out) const;
  // The input is not modified.
  void inverse(const std::complex<double>* in, double* out) const;

  // Same array shape on the box scaled by sigma (L -> sigma L).
  Grid rescaled(double sigma) const;

  bool same_shape(const Grid& other) const { return N_ == other.N_ && M_ == other.M_; }
  bool operator==(const Grid& other) const { return same_shape(other) && L_ == other.L_; }

 private:
  int N_;
  int M_;
  double L_;
  double h_;
  double cell_volume_;
  std::size_t size_;
  std::size_t spectrum_size_;
  std::shared_ptr<const std::vector<std::int64_t>> n2_;
  std::shared_ptr<const std::vector<double>> weight_;
  std::shared_ptr<FftPlans> plans_;
};

struct Field {
  Grid grid;
  std::vector<double> values;

  explicit Field(const Grid& g) : grid(g), values(g.size(), 0.0) {}
  Field(const Grid& g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Field with values f(x) sampled at the grid points.
template <class F>
Field sample(const Grid& g, F&& f) {
  Field u(g);
  const int N = g.dim();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < N; ++a) x[a] = g.coordinate(idx[a]);
    u.values[i] = f(x);
  }
  return u;
}

// Euclidean inner product weighted by the cell volume.
double inner(const Field& u, const Field& v);

// Exact discrete dilation (t*u)(x) = e^{Nt/2} u(e^t x): same array scaled by
// e^{Nt/2} on the box of half-length e^{-t} L.
Field dilate_exact(const Field& u, double t);

// Dilation on the same grid by periodic cubic interpolation (N = 1 only).
// Test utility; solvers never use it.
Field dilate_interpolated(const Field& u, double t);

// Even extension over every axis reflection x_a -> -x_a.
Field symmetrize_even(const Field& u);

// Mass of u in |x| > L/2.
double outer_mass(const Field& u);

}  // namespace choquard
