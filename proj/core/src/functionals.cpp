#include "choquard/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace choquard {

double signed_power(double u, double r) {
  if (u == 0.0) return 0.0;
  const double m = std::pow(std::abs(u), r - 1.0);
  return u > 0.0 ? m : -m;
}

namespace {

Field abs_power(const Field& u, double r) {
  Field f(u.grid);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::pow(std::abs(u.values[i]), r);
  return f;
}

}  // namespace

MomentTriple moments(const SpectralOps& ops, const Field& u, const ProblemParams& params) {
  MomentTriple m;
  m.a = ops.hs_seminorm_sq(u);
  m.b = ops.choquard_integral(u, params.q);
  m.d = ops.choquard_integral(u, params.p);
  return m;
}

double energy(const MomentTriple& m, const ProblemParams& pr) {
  return 0.5 * m.a - pr.alpha / (2.0 * pr.q) * m.b - m.d / (2.0 * pr.p);
}

double energy(const SpectralOps& ops, const Field& u, const ProblemParams& params) {
  return energy(moments(ops, u, params), params);
}

double pohozaev(const MomentTriple& m, const ProblemParams& pr) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  return pr.s * m.a - pr.alpha * pr.s * gq * m.b - pr.s * gp * m.d;
}

double pohozaev(const SpectralOps& ops, const Field& u, const ProblemParams& params) {
  return pohozaev(moments(ops, u, params), params);
}

Field weighted_gradient(const SpectralOps& ops, const Field& u, const ProblemParams& pr, double wa, double wb,
                        double wd) {
  Field g = ops.fractional_laplacian(u);
  for (double& x : g.values) x *= wa;
  const std::pair<double, double> terms[] = {{wb * pr.alpha, pr.q}, {wd, pr.p}};
  for (const auto& [coef, r] : terms) {
    if (coef == 0.0) continue;
    const Field V = ops.riesz_convolve(abs_power(u, r));
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] -= coef * V.values[i] * signed_power(u.values[i], r);
  }
  return g;
}

Field gradient(const SpectralOps& ops, const Field& u, const ProblemParams& params) {
  return weighted_gradient(ops, u, params, 1.0, 1.0, 1.0);
}

Linearization::Linearization(const SpectralOps& ops, const Field& u, const ProblemParams& pr) : ops_(ops) {
  const std::pair<double, double> spec[] = {{pr.alpha, pr.q}, {1.0, pr.p}};
  for (const auto& [coef, r] : spec) {
    if (coef == 0.0) continue;
    Term t{coef, r, {}, {}, {}};
    t.w.resize(u.size());
    t.dw.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double x = u.values[i];
      t.w[i] = signed_power(x, r);
      t.dw[i] = x == 0.0 ? (r > 2.0 ? 0.0 : (r == 2.0 ? 1.0 : 0.0)) : (r - 1.0) * std::pow(std::abs(x), r - 2.0);
    }
    t.V = ops.riesz_convolve(abs_power(u, r)).values;
    terms_.push_back(std::move(t));
  }
}

Field Linearization::apply(const Field& v) const {
  Field out = ops_.fractional_laplacian(v);
  Field wv(v.grid);
  for (const Term& t : terms_) {
    for (std::size_t i = 0; i < v.size(); ++i) wv.values[i] = t.w[i] * v.values[i];
    const Field conv = ops_.riesz_convolve(wv);
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.values[i] -= t.coef * (t.r * conv.values[i] * t.w[i] + t.dw[i] * t.V[i] * v.values[i]);
    }
  }
  return out;
}

double multiplier_estimate(const MomentTriple& m, double l2sq, const ProblemParams& pr) {
  if (!(l2sq > 0.0)) throw DomainError("multiplier estimate needs a nonzero field");
  return (m.a - pr.alpha * m.b - m.d) / l2sq;
}

double multiplier_estimate(const SpectralOps& ops, const Field& u, const ProblemParams& params) {
  return multiplier_estimate(moments(ops, u, params), inner(u, u), params);
}

double fiber_value(const MomentTriple& m, double t, const ProblemParams& pr) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  const double st = pr.s * t;
  return 0.5 * std::exp(2.0 * st) * m.a - pr.alpha / (2.0 * pr.q) * std::exp(2.0 * pr.q * gq * st) * m.b -
         m.d / (2.0 * pr.p) * std::exp(2.0 * pr.p * gp * st);
}

double fiber_d1(const MomentTriple& m, double t, const ProblemParams& pr) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  const double st = pr.s * t;
  return pr.s * std::exp(2.0 * st) * m.a - pr.alpha * pr.s * gq * std::exp(2.0 * pr.q * gq * st) * m.b -
         pr.s * gp * std::exp(2.0 * pr.p * gp * st) * m.d;
}

double fiber_d2(const MomentTriple& m, double t, const ProblemParams& pr) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  const double st = pr.s * t;
  const double s2 = 2.0 * pr.s * pr.s;
  return s2 * std::exp(2.0 * st) * m.a - s2 * pr.alpha * pr.q * gq * gq * std::exp(2.0 * pr.q * gq * st) * m.b -
         s2 * pr.p * gp * gp * std::exp(2.0 * pr.p * gp * st) * m.d;
}

std::string to_string(FiberClass c) {
  switch (c) {
    case FiberClass::Pplus: return "Pplus";
    case FiberClass::Pminus: return "Pminus";
    case FiberClass::Pzero: return "Pzero";
  }
  return "unknown";
}

std::optional<double> FiberReport::maximum_root() const {
  for (std::size_t i = roots.size(); i-- > 0;) {
    if (classes[i] == FiberClass::Pminus) return roots[i];
  }
  return std::nullopt;
}

std::optional<double> FiberReport::minimum_root() const {
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (classes[i] == FiberClass::Pplus) return roots[i];
  }
  return std::nullopt;
}

}  // namespace choquard
