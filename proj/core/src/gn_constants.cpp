#include "choquard/gn_constants.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "format.hpp"
#include "json.hpp"

namespace choquard {

namespace {

// Spectral smoothing exp(-tau |k|^{2s}) with tau chosen so the normalized
// result has squared seminorm a0. Negative tau sharpens.
Field retract(const SpectralOps& ops, const Field& v, double a0) {
  const auto vhat = ops.transform(v);
  const auto& lap = ops.lap_multiplier();
  const auto& w = ops.grid().spectrum_weight();
  const double lap_max = *std::max_element(lap.begin(), lap.end());
  auto seminorm_ratio = [&](double tau) {
    // Shift exponents so the largest weight is 1.
    const double shift = tau >= 0.0 ? 0.0 : -2.0 * tau * lap_max;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < vhat.size(); ++i) {
      const double e = std::exp(-2.0 * tau * lap[i] - shift) * w[i] * std::norm(vhat[i]);
      num += lap[i] * e;
      den += e;
    }
    return num / den;
  };
  auto f = [&](double tau) { return seminorm_ratio(tau) - a0; };
  double tau = 0.0;
  const double f0 = f(0.0);
  if (f0 != 0.0) {
    double step = 1.0 / a0;
    double lo = 0.0, hi = 0.0;
    if (f0 > 0.0) {
      hi = step;
      while (f(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12 / a0) throw DomainError("retraction failed to bracket");
      }
    } else {
      lo = -std::min(step, 0.25 / lap_max);
      while (f(lo) < 0.0) {
        hi = lo;
        lo *= 2.0;
        if (-lo * lap_max > 300.0) throw DomainError("retraction failed to bracket");
      }
    }
    auto tol = boost::math::tools::eps_tolerance<double>(50);
    std::uintmax_t it = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, it);
    tau = 0.5 * (r.first + r.second);
  }
  auto uhat = vhat;
  for (std::size_t i = 0; i < uhat.size(); ++i) uhat[i] *= std::exp(-tau * lap[i]);
  return normalize_mass(ops.inverse(uhat), 1.0);
}

// Remove components along u and (-Delta)^s u.
Field project_tangent(const SpectralOps& ops, const Field& u, const Field& G) {
  Field e1 = normalize_mass(u, 1.0);
  Field Lu = ops.fractional_laplacian(u);
  const double c1 = inner(Lu, e1);
  for (std::size_t i = 0; i < Lu.size(); ++i) Lu.values[i] -= c1 * e1.values[i];
  Field out = G;
  const double g1 = inner(out, e1);
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= g1 * e1.values[i];
  const double n2 = l2_norm(Lu);
  if (n2 > 0.0) {
    const double g2 = inner(out, Lu) / (n2 * n2);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= g2 * Lu.values[i];
  }
  return out;
}

Field choquard_gradient(const SpectralOps& ops, const Field& u, double t) {
  Field f(u.grid);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::pow(std::abs(u.values[i]), t);
  Field V = ops.riesz_convolve(f);
  for (std::size_t i = 0; i < f.size(); ++i) V.values[i] *= 2.0 * t * signed_power(u.values[i], t);
  return V;
}

Field gaussian(const Grid& g, double width, const std::vector<std::array<double, 3>>& centers = {{0.0, 0.0, 0.0}},
               const std::vector<double>& amps = {1.0}, const std::vector<double>& widths = {}) {
  return sample(g, [&](const std::array<double, 3>& x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double w = widths.empty() ? width : widths[k];
      double r2 = 0.0;
      for (int a = 0; a < g.dim(); ++a) r2 += (x[a] - centers[k][a]) * (x[a] - centers[k][a]);
      acc += amps[k] * std::exp(-r2 / (2.0 * w * w));
    }
    return acc;
  });
}

}  // namespace

double weinstein_quotient(double a, double b, double l2, double t, const ProblemParams& params) {
  const double g = gamma(t, params);
  return b / (std::pow(a, t * g) * std::pow(l2, 2.0 * t * (1.0 - g)));
}

double weinstein_quotient(const SpectralOps& ops, const Field& u, double t, const ProblemParams& params) {
  const double l2 = l2_norm(u);
  if (!(l2 > 0.0)) throw DomainError("quotient of the zero field");
  return weinstein_quotient(ops.hs_seminorm_sq(u), ops.choquard_integral(u, t), l2, t, params);
}

GNEstimate ascend_quotient(double t, const ProblemParams& params, const SpectralOps& ops, const Field& start, double a0,
                           const GNConfig& config, std::vector<double>* history) {
  GNEstimate est;
  est.t = t;
  Field u = retract(ops, symmetrize_even(start), a0);
  double b = ops.choquard_integral(u, t);
  double dt = 0.1;
  int it = 0;
  for (; it < config.max_iter; ++it) {
    const Field G = symmetrize_even(choquard_gradient(ops, u, t));
    const Field Gt = project_tangent(ops, u, G);
    est.residual = l2_norm(Gt) / l2_norm(G);
    if (history) history->push_back(b);
    if (est.residual <= config.tol) break;
    bool accepted = false;
    while (dt > 1e-14) {
      Field v = u;
      for (std::size_t i = 0; i < v.size(); ++i) v.values[i] += dt * Gt.values[i] / b;
      Field cand = retract(ops, v, a0);
      const double bc = ops.choquard_integral(cand, t);
      if (bc >= b) {
        u = std::move(cand);
        b = bc;
        accepted = true;
        dt *= 1.5;
        break;
      }
      dt *= 0.5;
    }
    if (!accepted) break;
  }
  est.iterations = it;
  est.a = ops.hs_seminorm_sq(u);
  est.b = b;
  est.l2 = l2_norm(u);
  est.C_t = weinstein_quotient(est.a, est.b, est.l2, t, params);
  est.converged = est.residual <= config.tol;
  return est;
}

GNEstimate estimate_best_constant(double t, const ProblemParams& params, const SpectralOps& ops,
                                  const GNConfig& config) {
  const DerivedExponents d = derive(params);
  if (!(t > d.two_mu_lower && t < d.two_mu_upper)) {
    throw DomainError("GN exponent t must lie strictly between (2N-mu)/N and (2N-mu)/(N-2s)");
  }
  const Grid& g = ops.grid();
  const double wref = std::max(g.half_length() / 64.0, 6.0 * g.spacing());
  double a0 = config.a0;
  if (!(a0 > 0.0)) a0 = ops.hs_seminorm_sq(normalize_mass(gaussian(g, wref), 1.0));

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Field> starts;
  const double gauss_scales[] = {1.0, 0.6, 1.6, 0.8};
  for (int k = 0; k < config.starts; ++k) {
    if (k < 4) {
      starts.push_back(gaussian(g, wref * gauss_scales[k]));
      continue;
    }
    std::vector<std::array<double, 3>> centers;
    std::vector<double> amps, widths;
    for (int j = 0; j < 3; ++j) {
      std::array<double, 3> c{0.0, 0.0, 0.0};
      for (int a = 0; a < g.dim(); ++a) c[a] = (2.0 * unif(rng) - 1.0) * 1.5 * wref;
      centers.push_back(c);
      amps.push_back(0.5 + 0.5 * unif(rng));
      widths.push_back(wref * (0.5 + 1.5 * unif(rng)));
    }
    starts.push_back(gaussian(g, wref, centers, amps, widths));
  }

  std::vector<GNEstimate> results(starts.size());
  const int threads = std::max(1, config.threads);
  for (std::size_t base = 0; base < starts.size(); base += threads) {
    std::vector<std::future<GNEstimate>> jobs;
    for (std::size_t k = base; k < std::min(starts.size(), base + threads); ++k) {
      jobs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                [&, k] { return ascend_quotient(t, params, ops, starts[k], a0, config); }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) results[base + k] = jobs[k].get();
  }
  int best = 0;
  for (std::size_t k = 1; k < results.size(); ++k) {
    if (results[k].C_t > results[best].C_t) best = static_cast<int>(k);
  }
  GNEstimate out = results[best];
  out.best_start = best;
  return out;
}

std::string to_json(const GNEstimate& e) {
  nlohmann::ordered_json j;
  j["t"] = e.t;
  j["C_t"] = e.C_t;
  j["maximizer"] = {{"a", e.a}, {"b", e.b}, {"l2", e.l2}};
  j["iterations"] = e.iterations;
  j["residual"] = e.residual;
  j["converged"] = e.converged;
  j["best_start"] = e.best_start;
  return j.dump(2);
}

std::string gn_csv_header() { return "N,s,mu,t,C_t,residual"; }

std::string gn_csv_row(const ProblemParams& params, const GNEstimate& e) {
  using detail::num17;
  return std::to_string(params.N) + "," + num17(params.s) + "," + num17(params.mu) + "," + num17(e.t) + "," +
         num17(e.C_t) + "," + num17(e.residual);
}

}  // namespace choquard
