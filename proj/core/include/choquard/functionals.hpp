#pragma once

#include <optional>
#include <string>
#include <vector>

#include "choquard/params.hpp"
#include "choquard/spectral.hpp"

namespace choquard {

struct MomentTriple {
  double a = 0.0;  // squared H^s seminorm
  double b = 0.0;  // q-Choquard integral
  double d = 0.0;  // p-Choquard integral
};

MomentTriple moments(const SpectralOps& ops, const Field& u, const ProblemParams& params);

double energy(const MomentTriple& m, const ProblemParams& params);
double energy(const SpectralOps& ops, const Field& u, const ProblemParams& params);
double pohozaev(const MomentTriple& m, const ProblemParams& params);
double pohozaev(const SpectralOps& ops, const Field& u, const ProblemParams& params);

// |u|^{r-2} u with the signed-power convention, zero at u = 0.
double signed_power(double u, double r);

// L2 gradient of J_alpha:
//   (-Delta)^s u - alpha (I * |u|^q)|u|^{q-2}u - (I * |u|^p)|u|^{p-2}u.
Field gradient(const SpectralOps& ops, const Field& u, const ProblemParams& params);

// Same structure with the three terms weighted by (wa, wb, wd); wb multiplies alpha.
Field weighted_gradient(const SpectralOps& ops, const Field& u, const ProblemParams& params, double wa, double wb,
                        double wd);

// Second variation of J_alpha at u, applied to directions. For r < 2 the factor
// |u|^{r-2} is taken as zero where u vanishes.
class Linearization {
 public:
  Linearization(const SpectralOps& ops, const Field& u, const ProblemParams& params);
  Field apply(const Field& v) const;

 private:
  struct Term {
    double coef;
    double r;
    std::vector<double> w;   // |u|^{r-2} u
    std::vector<double> dw;  // (r-1)|u|^{r-2}
    std::vector<double> V;   // I * |u|^r
  };
  const SpectralOps& ops_;
  std::vector<Term> terms_;
};

// (a - alpha b - d) / ||u||_2^2
double multiplier_estimate(const SpectralOps& ops, const Field& u, const ProblemParams& params);
double multiplier_estimate(const MomentTriple& m, double l2sq, const ProblemParams& params);

// Fiber map t -> J_alpha(t*u) and its derivatives, from the moments alone.
double fiber_value(const MomentTriple& m, double t, const ProblemParams& params);
double fiber_d1(const MomentTriple& m, double t, const ProblemParams& params);
double fiber_d2(const MomentTriple& m, double t, const ProblemParams& params);

enum class FiberClass { Pplus, Pminus, Pzero };
std::string to_string(FiberClass c);

struct FiberOptions {
  double window = 0.0;            // search t in [-T, T]; 0 means 60 / s
  std::optional<double> C_q;      // enables the regime structure check
  std::optional<double> C_p;
};

struct FiberReport {
  std::vector<double> roots;
  std::vector<FiberClass> classes;
  std::vector<double> zeros;
  std::vector<double> values;
  bool structure_violation = false;
  bool window_exhausted = false;
  std::string note;

  // Largest root classified Pminus, if any.
  std::optional<double> maximum_root() const;
  // Smallest root classified Pplus, if any.
  std::optional<double> minimum_root() const;
};

FiberReport fiber_analyze(const MomentTriple& m, const ProblemParams& params, const FiberOptions& opts = {});

struct GFunctionReport {
  double t0 = 0.0;
  double t1 = 0.0;
  double tmax = 0.0;
  double tmin = 0.0;
  double gmax = 0.0;
  double gmin = 0.0;
  bool no_positive_region = false;
};

// g(t) = t^2/2 - (alpha/2q) C_q t^{2q gq} c^{2q(1-gq)} - (1/2p) C_p t^{2p gp} c^{2p(1-gp)}
double g_function(double t, const ProblemParams& params, double C_q, double C_p);
GFunctionReport g_analyze(const ProblemParams& params, double C_q, double C_p);

struct RadialDiagnostic {
  double max_violation = 0.0;  // largest increase of bin-averaged |u| with radius
  double min_value = 0.0;
  double max_abs = 0.0;
};

RadialDiagnostic radial_monotonicity_check(const Field& u);

std::string to_json(const FiberReport& r);
std::string to_json(const GFunctionReport& r);

}  // namespace choquard
