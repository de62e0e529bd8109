#pragma once

#include <stdexcept>
#include <string>

namespace choquard {

// Raised when inputs violate a mathematical precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Regime { CaseI, CaseII, CaseIII, CaseIV };

std::string to_string(Regime r);

struct ProblemParams {
  int N = 1;
  double s = 0.5;
  double mu = 0.5;
  double q = 2.0;
  double p = 3.0;
  double alpha = 0.0;
  double c = 1.0;

  // Throws DomainError unless N in {1,2,3}, N > 2s, 0 < mu < N, alpha >= 0, c > 0.
  void validate() const;
};

struct DerivedExponents {
  double gamma_q = 0.0;
  double gamma_p = 0.0;
  double two_mu_lower = 0.0;  // (2N - mu) / N
  double two_mu_upper = 0.0;  // (2N - mu) / (N - 2s)
  double l2_critical = 0.0;   // 2 + (2s - mu) / N
  double A_N_mu = 0.0;        // Riesz normalization constant
};

inline constexpr double kRegimeTolerance = 1e-12;

double gamma(double r, const ProblemParams& params);
double riesz_constant(int N, double mu);
double l2_critical_exponent(const ProblemParams& params);
DerivedExponents derive(const ProblemParams& params);

Regime classify_regime(const ProblemParams& params);

// Local minimum threshold. Requires q*gamma_q < 1 < p*gamma_p.
double alpha1(const ProblemParams& params, double C_q, double C_p);
// Positivity threshold; equals the maximum of phi(t) / c^{2q(1-gamma_q)}.
double alpha2(const ProblemParams& params, double C_q, double C_p);

// phi(t) = (q/C_q) t^{2(1-q gq)} - (q C_p c^{2p(1-gp)} / (p C_q)) t^{2(p gp - q gq)}
double phi(double t, const ProblemParams& params, double C_q, double C_p);
double phi_argmax(const ProblemParams& params, double C_q, double C_p);

// True iff 1/2 > (alpha / 2q) C_q c^{2q(1-gamma_q)}. Requires CaseII.
bool l2_critical_mass_condition(const ProblemParams& params, double C_q);
// The quantity compared against 1/2 above.
double l2_critical_mass_lhs(const ProblemParams& params, double C_q);

struct CbarResult {
  double value = 0.0;
  bool overflow = false;
};

// (p / C_p)^{1 / (2p(1 - gamma_p))}. Requires CaseIV and gamma_p < 1.
CbarResult cbar(const ProblemParams& params, double C_p);

}  // namespace choquard
