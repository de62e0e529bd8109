#include "choquard/grid.hpp"

#include <fftw3.h>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "choquard/params.hpp"

namespace choquard {

namespace {

// FFTW planning is not thread safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int M) { return M > 0 && (M & (M - 1)) == 0; }

}  // namespace

struct FftPlans {
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;

  FftPlans(int N, int M) {
    std::array<int, 3> n{M, M, M};
    real_size = 1;
    for (int a = 0; a < N; ++a) real_size *= static_cast<std::size_t>(M);
    complex_size = real_size / M * (M / 2 + 1);
    std::lock_guard<std::mutex> lock(planner_mutex());
    double* r = fftw_alloc_real(real_size);
    fftw_complex* c = fftw_alloc_complex(complex_size);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fwd = fftw_plan_dft_r2c(N, n.data(), r, c, flags);
    inv = fftw_plan_dft_c2r(N, n.data(), c, r, flags | FFTW_DESTROY_INPUT);
    fftw_free(r);
    fftw_free(c);
  }
  ~FftPlans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }
  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;
};

Grid::Grid(int N, int M, double L, std::size_t max_points) : N_(N), M_(M), L_(L) {
  if (N < 1 || N > 3) throw DomainError("grid dimension must be 1, 2 or 3");
  if (M < 16 || !is_power_of_two(M)) {
    throw DomainError("grid M must be a power of two >= 16, got " + std::to_string(M));
  }
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("grid L must be positive");
  size_ = 1;
  for (int a = 0; a < N; ++a) size_ *= static_cast<std::size_t>(M);
  if (size_ > max_points) {
    throw DomainError("grid has " + std::to_string(size_) + " points, cap is " + std::to_string(max_points));
  }
  h_ = 2.0 * L / M;
  cell_volume_ = std::pow(h_, N);
  const int half = M / 2 + 1;
  spectrum_size_ = size_ / M * half;

  auto n2 = std::make_shared<std::vector<std::int64_t>>(spectrum_size_);
  auto w = std::make_shared<std::vector<double>>(spectrum_size_);
  for (std::size_t i = 0; i < spectrum_size_; ++i) {
    std::size_t rest = i;
    const int last = static_cast<int>(rest % half);
    rest /= half;
    std::int64_t acc = static_cast<std::int64_t>(last) * last;
    for (int a = 0; a < N - 1; ++a) {
      const int j = static_cast<int>(rest % M);
      rest /= M;
      const std::int64_t n = j <= M / 2 ? j : j - M;
      acc += n * n;
    }
    (*n2)[i] = acc;
    (*w)[i] = (last == 0 || last == M / 2) ? 1.0 : 2.0;
  }
  n2_ = std::move(n2);
  weight_ = std::move(w);
  plans_ = std::make_shared<FftPlans>(N, M);
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = N_ - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % M_);
    flat /= M_;
  }
  return idx;
}

double Grid::radius(std::size_t flat) const {
  const auto idx = unflatten(flat);
  double r2 = 0.0;
  for (int a = 0; a < N_; ++a) {
    const double x = coordinate(idx[a]);
    r2 += x * x;
  }
  return std::sqrt(r2);
}

double Grid::wavenumber_unit() const { return std::numbers::pi / L_; }

void Grid::forward(const double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(plans_->fwd, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void Grid::inverse(const std::complex<double>* in, double* out) const {
  std::vector<std::complex<double>> scratch(in, in + spectrum_size_);
  fftw_execute_dft_c2r(plans_->inv, reinterpret_cast<fftw_complex*>(scratch.data()), out);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] *= scale;
}

Grid Grid::rescaled(double sigma) const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("rescale factor must be positive");
  Grid g = *this;
  g.L_ = L_ * sigma;
  g.h_ = 2.0 * g.L_ / M_;
  g.cell_volume_ = std::pow(g.h_, N_);
  return g;
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("field size does not match grid");
}

double inner(const Field& u, const Field& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u.values[i] * v.values[i];
  return acc * u.grid.cell_volume();
}

Field dilate_exact(const Field& u, double t) {
  Field out(u.grid.rescaled(std::exp(-t)), u.values);
  const double amp = std::exp(0.5 * u.grid.dim() * t);
  for (double& x : out.values) x *= amp;
  return out;
}

Field dilate_interpolated(const Field& u, double t) {
  const Grid& g = u.grid;
  if (g.dim() != 1) throw DomainError("interpolated dilation is implemented for N = 1");
  const int M = g.points_per_axis();
  // Append the periodic image of x_0 so the spline covers [-L, L].
  std::vector<double> ext(u.values);
  ext.push_back(u.values.front());
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline(ext.begin(), ext.end(), -g.half_length(),
                                                                      g.spacing());
  Field out(g);
  const double scale = std::exp(t);
  const double amp = std::exp(0.5 * t);
  for (int j = 0; j < M; ++j) {
    const double y = scale * g.coordinate(j);
    if (y < -g.half_length() || y > g.half_length()) continue;
    out.values[j] = amp * spline(y);
  }
  return out;
}

Field symmetrize_even(const Field& u) {
  const Grid& g = u.grid;
  const int M = g.points_per_axis();
  const int N = g.dim();
  Field out(g);
  const int images = 1 << N;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    double acc = 0.0;
    for (int mask = 0; mask < images; ++mask) {
      std::size_t flat = 0;
      for (int a = 0; a < N; ++a) {
        const int j = (mask >> a) & 1 ? (M - idx[a]) % M : idx[a];
        flat = flat * M + j;
      }
      acc += u.values[flat];
    }
    out.values[i] = acc / images;
  }
  return out;
}

double outer_mass(const Field& u) {
  const Grid& g = u.grid;
  const double cut = 0.5 * g.half_length();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.radius(i) > cut) acc += u.values[i] * u.values[i];
  }
  return acc * g.cell_volume();
}

}  // namespace choquard
