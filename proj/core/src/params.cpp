#include "choquard/params.hpp"

#include <cfloat>
#include <cmath>
#include <sstream>

namespace choquard {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require_positive_constant(double C, const char* name) {
  if (!(C > 0.0) || !std::isfinite(C)) {
    throw DomainError(std::string(name) + " must be a positive finite constant, got " + fmt(C));
  }
}

struct Products {
  double gq, gp, qgq, pgp;
};

Products products(const ProblemParams& pr) {
  Products out{};
  out.gq = gamma(pr.q, pr);
  out.gp = gamma(pr.p, pr);
  out.qgq = pr.q * out.gq;
  out.pgp = pr.p * out.gp;
  return out;
}

void require_mixed(const Products& x) {
  if (!(x.qgq < 1.0)) {
    throw DomainError("threshold needs q*gamma_q < 1, got " + fmt(x.qgq));
  }
  if (!(x.pgp > 1.0)) {
    throw DomainError("threshold needs p*gamma_p > 1, got " + fmt(x.pgp));
  }
}

}  // namespace

std::string to_string(Regime r) {
  switch (r) {
    case Regime::CaseI: return "CaseI";
    case Regime::CaseII: return "CaseII";
    case Regime::CaseIII: return "CaseIII";
    case Regime::CaseIV: return "CaseIV";
  }
  return "unknown";
}

void ProblemParams::validate() const {
  if (N < 1 || N > 3) throw DomainError("N must be 1, 2 or 3, got " + std::to_string(N));
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0,1), got " + fmt(s));
  if (!(N > 2.0 * s)) throw DomainError("N > 2s violated: 2s = " + fmt(2.0 * s));
  if (!(mu > 0.0 && mu < N)) throw DomainError("mu must lie in (0,N), got " + fmt(mu));
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 0, got " + fmt(alpha));
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("c must be > 0, got " + fmt(c));
  if (!(q > 0.0 && p > 0.0)) throw DomainError("exponents must be positive");
}

double gamma(double r, const ProblemParams& params) {
  if (!(r > 0.0)) throw DomainError("gamma needs r > 0, got " + fmt(r));
  return (params.N * (r - 2.0) + params.mu) / (2.0 * r * params.s);
}

double riesz_constant(int N, double mu) {
  const double lg = std::lgamma(0.5 * mu) - (N - mu) * std::log(2.0) - 0.5 * N * std::log(M_PI) -
                    std::lgamma(0.5 * (N - mu));
  return std::exp(lg);
}

double l2_critical_exponent(const ProblemParams& params) {
  return 2.0 + (2.0 * params.s - params.mu) / params.N;
}

DerivedExponents derive(const ProblemParams& params) {
  params.validate();
  DerivedExponents d;
  d.gamma_q = gamma(params.q, params);
  d.gamma_p = gamma(params.p, params);
  d.two_mu_lower = (2.0 * params.N - params.mu) / params.N;
  d.two_mu_upper = (2.0 * params.N - params.mu) / (params.N - 2.0 * params.s);
  d.l2_critical = l2_critical_exponent(params);
  d.A_N_mu = riesz_constant(params.N, params.mu);
  return d;
}

Regime classify_regime(const ProblemParams& params) {
  const DerivedExponents d = derive(params);
  const double tol = kRegimeTolerance;
  if (!(params.q < params.p - tol)) {
    throw DomainError("q < p violated: q = " + fmt(params.q) + ", p = " + fmt(params.p));
  }
  if (!(params.q > d.two_mu_lower + tol)) {
    throw DomainError("q > (2N-mu)/N violated: q = " + fmt(params.q) + ", lower bound = " + fmt(d.two_mu_lower));
  }
  if (!(params.p < d.two_mu_upper - tol)) {
    throw DomainError("p < (2N-mu)/(N-2s) violated: p = " + fmt(params.p) + ", upper bound = " +
                      fmt(d.two_mu_upper));
  }
  const double crit = d.l2_critical;
  if (std::abs(params.q - crit) <= tol) return Regime::CaseII;
  if (params.p <= crit + tol) return Regime::CaseIV;
  if (params.q < crit) return Regime::CaseI;
  return Regime::CaseIII;
}

double alpha1(const ProblemParams& params, double C_q, double C_p) {
  require_positive_constant(C_q, "C_q");
  require_positive_constant(C_p, "C_p");
  const Products x = products(params);
  require_mixed(x);
  const double c = params.c;
  const double cq = std::pow(c, 2.0 * params.q * (1.0 - x.gq));
  const double cp = std::pow(c, 2.0 * params.p * (1.0 - x.gp));
  const double base = (1.0 - x.qgq) / (x.gp * (x.pgp - x.qgq) * C_p * cp);
  const double expo = (1.0 - x.qgq) / (x.pgp - 1.0);
  return std::pow(base, expo) * (x.pgp - 1.0) / (x.gq * (x.pgp - x.qgq) * C_q * cq);
}

double alpha2(const ProblemParams& params, double C_q, double C_p) {
  require_positive_constant(C_q, "C_q");
  require_positive_constant(C_p, "C_p");
  const Products x = products(params);
  require_mixed(x);
  const double c = params.c;
  const double cq = std::pow(c, 2.0 * params.q * (1.0 - x.gq));
  const double cp = std::pow(c, 2.0 * params.p * (1.0 - x.gp));
  const double inner = C_p * cp * (x.pgp - x.qgq) / (params.p * (1.0 - x.qgq));
  return (params.q / C_q) * (x.pgp - 1.0) / (x.pgp - x.qgq) *
         std::pow(inner, (1.0 - x.qgq) / (1.0 - x.pgp)) / cq;
}

double phi(double t, const ProblemParams& params, double C_q, double C_p) {
  const Products x = products(params);
  const double cp = std::pow(params.c, 2.0 * params.p * (1.0 - x.gp));
  return (params.q / C_q) * std::pow(t, 2.0 * (1.0 - x.qgq)) -
         (params.q * C_p * cp / (params.p * C_q)) * std::pow(t, 2.0 * (x.pgp - x.qgq));
}

double phi_argmax(const ProblemParams& params, double C_q, double C_p) {
  require_positive_constant(C_q, "C_q");
  require_positive_constant(C_p, "C_p");
  const Products x = products(params);
  require_mixed(x);
  const double cp = std::pow(params.c, 2.0 * params.p * (1.0 - x.gp));
  const double inner = C_p * cp * (x.pgp - x.qgq) / (params.p * (1.0 - x.qgq));
  return std::pow(inner, 1.0 / (2.0 * (1.0 - x.pgp)));
}

double l2_critical_mass_lhs(const ProblemParams& params, double C_q) {
  const double gq = gamma(params.q, params);
  return params.alpha / (2.0 * params.q) * C_q * std::pow(params.c, 2.0 * params.q * (1.0 - gq));
}

bool l2_critical_mass_condition(const ProblemParams& params, double C_q) {
  require_positive_constant(C_q, "C_q");
  if (classify_regime(params) != Regime::CaseII) {
    throw DomainError("the L2-critical mass condition applies to CaseII only");
  }
  return 0.5 > l2_critical_mass_lhs(params, C_q);
}

CbarResult cbar(const ProblemParams& params, double C_p) {
  if (!(C_p > 0.0)) throw DomainError("C_p must be positive, got " + fmt(C_p));
  if (classify_regime(params) != Regime::CaseIV) throw DomainError("cbar applies to CaseIV only");
  const double gp = gamma(params.p, params);
  if (!(gp < 1.0)) throw DomainError("cbar needs gamma_p < 1, got " + fmt(gp));
  const double log_value = (std::log(params.p) - std::log(C_p)) / (2.0 * params.p * (1.0 - gp));
  CbarResult out;
  if (log_value >= std::log(DBL_MAX)) {
    out.value = DBL_MAX;
    out.overflow = true;
  } else {
    out.value = std::exp(log_value);
  }
  return out;
}

}  // namespace choquard
