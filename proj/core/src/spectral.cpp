#include "choquard/spectral.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "choquard/params.hpp"

namespace choquard {

namespace {

using boost::math::quadrature::gauss;

constexpr double kPi = std::numbers::pi;

double sphere_factor(int N) {
  switch (N) {
    case 1: return 2.0;
    case 2: return 2.0 * kPi;
    default: return 4.0 * kPi;
  }
}

// Radial integrand y^{N-1-mu} w_N(y) of the truncated kernel transform.
double radial_integrand(int N, double mu, double y) {
  if (y == 0.0) return 0.0;
  const double pw = std::pow(y, N - 1 - mu);
  switch (N) {
    case 1: return pw * std::cos(y);
    case 2: return pw * std::cyl_bessel_j(0.0, y);
    default: return pw * std::sin(y) / y;
  }
}

class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Truncated multiplier on the box L = 1; it scales as L^{N - mu}.
std::vector<double> truncated_unit_table(const Grid& g, double mu) {
  const int N = g.dim();
  const auto& n2 = g.spectrum_n2();
  std::vector<std::int64_t> keys(n2.begin(), n2.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  auto f = [N, mu](double y) { return radial_integrand(N, mu, y); };
  const double piece = 0.5 * kPi;
  boost::math::quadrature::tanh_sinh<double> ts;

  std::map<std::int64_t, double> F;
  KahanSum acc;
  double pos = 0.0;
  for (std::int64_t key : keys) {
    if (key == 0) continue;
    const double X = kPi * std::sqrt(static_cast<double>(key));
    while (pos < X) {
      const double next = std::min(X, pos + piece);
      if (pos == 0.0) {
        acc.add(ts.integrate(f, 0.0, next));
      } else {
        acc.add(gauss<double, 20>::integrate(f, pos, next));
      }
      pos = next;
    }
    F[key] = acc.value();
  }

  const double A = riesz_constant(N, mu);
  const double S = sphere_factor(N);
  std::vector<double> m(n2.size());
  for (std::size_t i = 0; i < n2.size(); ++i) {
    if (n2[i] == 0) {
      m[i] = S * A / (N - mu);
    } else {
      const double X = kPi * std::sqrt(static_cast<double>(n2[i]));
      m[i] = S * A * std::pow(X, mu - N) * F[n2[i]];
    }
  }
  return m;
}

std::vector<double> sampled_table(const Grid& g, double mu) {
  const int N = g.dim();
  const int M = g.points_per_axis();
  const double h = g.spacing();
  const double A = riesz_constant(N, mu);
  Field kernel(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unflatten(i);
    double r2 = 0.0;
    for (int a = 0; a < N; ++a) {
      const int n = idx[a] <= M / 2 ? idx[a] : idx[a] - M;
      r2 += static_cast<double>(n) * n;
    }
    kernel.values[i] = r2 == 0.0 ? A * unit_cell_average(N, mu) * std::pow(h, -mu) : A * std::pow(h * h * r2, -0.5 * mu);
  }
  std::vector<std::complex<double>> khat(g.spectrum_size());
  g.forward(kernel.values.data(), khat.data());
  std::vector<double> m(g.spectrum_size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = g.cell_volume() * khat[i].real();
  return m;
}

using TableKey = std::tuple<int, int, double, int>;

// Tables for L = 1, shared across all grids of the same shape.
const std::vector<double>& unit_table(const Grid& g, double mu, KernelScheme scheme) {
  static std::mutex mtx;
  static std::map<TableKey, std::shared_ptr<const std::vector<double>>> cache;
  const TableKey key{g.dim(), g.points_per_axis(), mu, static_cast<int>(scheme)};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  const Grid unit = g.rescaled(1.0 / g.half_length());
  auto table = std::make_shared<const std::vector<double>>(
      scheme == KernelScheme::Truncated ? truncated_unit_table(unit, mu) : sampled_table(unit, mu));
  std::lock_guard<std::mutex> lock(mtx);
  auto [it, inserted] = cache.emplace(key, table);
  return *it->second;
}

}  // namespace

std::string to_string(KernelScheme k) { return k == KernelScheme::Truncated ? "truncated" : "sampled"; }

KernelScheme kernel_scheme_from_string(const std::string& s) {
  if (s == "truncated") return KernelScheme::Truncated;
  if (s == "sampled") return KernelScheme::Sampled;
  throw DomainError("unknown kernel scheme '" + s + "' (expected truncated or sampled)");
}

double unit_cell_average(int N, double mu) {
  if (!(mu > 0.0 && mu < N)) throw DomainError("cell average needs 0 < mu < N");
  double face = 1.0;
  auto w = [mu](double r2) { return std::pow(1.0 + r2, -0.5 * mu); };
  if (N == 2) {
    face = 2.0 * gauss<double, 30>::integrate([&](double v) { return w(v * v); }, 0.0, 1.0);
  } else if (N == 3) {
    face = 4.0 * gauss<double, 30>::integrate(
                     [&](double v1) {
                       return gauss<double, 30>::integrate([&](double v2) { return w(v1 * v1 + v2 * v2); }, 0.0, 1.0);
                     },
                     0.0, 1.0);
  }
  // 2N pyramids with apex at the origin, one per cube face.
  return 2.0 * N * std::pow(0.5, N - mu) / (N - mu) * face;
}

std::vector<double> fractional_multiplier(const Grid& g, double s) {
  const auto& n2 = g.spectrum_n2();
  const double k2 = g.wavenumber_unit() * g.wavenumber_unit();
  std::vector<double> m(n2.size());
  for (std::size_t i = 0; i < n2.size(); ++i) m[i] = n2[i] == 0 ? 0.0 : std::pow(k2 * static_cast<double>(n2[i]), s);
  return m;
}

std::vector<double> riesz_multiplier(const Grid& g, double mu, KernelScheme scheme) {
  if (!(mu > 0.0 && mu < g.dim())) throw DomainError("Riesz exponent must satisfy 0 < mu < N");
  std::vector<double> m = unit_table(g, mu, scheme);
  const double scale = std::pow(g.half_length(), g.dim() - mu);
  for (double& x : m) x *= scale;
  return m;
}

SpectralOps::SpectralOps(const Grid& g, double s, double mu, KernelScheme scheme)
    : grid_(g), s_(s), mu_(mu), scheme_(scheme) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order must lie in (0,1)");
  lap_ = fractional_multiplier(g, s);
  riesz_ = riesz_multiplier(g, mu, scheme);
  if (scheme == KernelScheme::Truncated) {
    // Zeros of the multiplier (N=3, mu=1 at kL in 2 pi Z) are exact; clear their quadrature noise.
    const double top = *std::max_element(riesz_.begin(), riesz_.end());
    const double noise = 1e-12 * top;
    const bool nonneg = std::all_of(riesz_.begin(), riesz_.end(), [&](double v) { return v >= -noise; });
    for (double& v : riesz_) v = std::abs(v) <= noise ? 0.0 : v;
    if (!nonneg) {
      scheme_ = KernelScheme::Sampled;
      fallback_ = true;
      riesz_ = riesz_multiplier(g, mu, scheme_);
    }
  }
}

SpectralOps SpectralOps::rescaled(double sigma) const {
  SpectralOps out = *this;
  out.grid_ = grid_.rescaled(sigma);
  const double fl = std::pow(sigma, -2.0 * s_);
  for (double& x : out.lap_) x *= fl;
  const double fr = std::pow(sigma, grid_.dim() - mu_);
  for (double& x : out.riesz_) x *= fr;
  return out;
}

std::vector<std::complex<double>> SpectralOps::transform(const Field& u) const {
  std::vector<std::complex<double>> out(grid_.spectrum_size());
  grid_.forward(u.values.data(), out.data());
  return out;
}

Field SpectralOps::inverse(const std::vector<std::complex<double>>& uhat) const {
  Field out(grid_);
  grid_.inverse(uhat.data(), out.values.data());
  return out;
}

Field SpectralOps::apply_multiplier(const Field& u, const std::vector<double>& m) const {
  auto uhat = transform(u);
  for (std::size_t i = 0; i < uhat.size(); ++i) uhat[i] *= m[i];
  return inverse(uhat);
}

Field SpectralOps::fractional_laplacian(const Field& u) const { return apply_multiplier(u, lap_); }

Field SpectralOps::riesz_convolve(const Field& f) const { return apply_multiplier(f, riesz_); }

double SpectralOps::quadratic_form(const std::vector<std::complex<double>>& fhat, const std::vector<double>& m) const {
  const auto& w = grid_.spectrum_weight();
  double acc = 0.0;
  for (std::size_t i = 0; i < fhat.size(); ++i) acc += w[i] * m[i] * std::norm(fhat[i]);
  return acc * grid_.cell_volume() / static_cast<double>(grid_.size());
}

double SpectralOps::choquard_integral(const Field& u, double t) const {
  Field f(grid_);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::pow(std::abs(u.values[i]), t);
  return quadratic_form(transform(f), riesz_);
}

double SpectralOps::hs_seminorm_sq(const Field& u) const { return quadratic_form(transform(u), lap_); }

Field fractional_laplacian(const Field& u, double s) {
  const auto m = fractional_multiplier(u.grid, s);
  std::vector<std::complex<double>> uhat(u.grid.spectrum_size());
  u.grid.forward(u.values.data(), uhat.data());
  for (std::size_t i = 0; i < uhat.size(); ++i) uhat[i] *= m[i];
  Field out(u.grid);
  u.grid.inverse(uhat.data(), out.values.data());
  return out;
}

double l2_norm(const Field& u) { return std::sqrt(inner(u, u)); }

Field normalize_mass(const Field& u, double c) {
  const double n = l2_norm(u);
  if (!(n > 0.0)) throw DomainError("cannot normalize the zero field");
  Field out = u;
  const double f = c / n;
  for (double& x : out.values) x *= f;
  return out;
}

}  // namespace choquard
