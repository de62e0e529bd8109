#pragma once

#include <cstdint>
#include <string>

#include "choquard/functionals.hpp"

namespace choquard {

struct GNConfig {
  int max_iter = 4000;
  int starts = 8;
  std::uint64_t seed = 20240601;
  double tol = 1e-6;
  // Target squared seminorm of the maximizer; 0 selects that of a Gaussian of
  // width max(L/64, 6h).
  double a0 = 0.0;
  int threads = 1;
};

struct GNEstimate {
  double t = 0.0;
  double C_t = 0.0;
  // Summary of the maximizing field.
  double a = 0.0;
  double b = 0.0;
  double l2 = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  int best_start = -1;
};

// b / (a^{t gamma_t} ||u||_2^{2t(1 - gamma_t)}) with b the t-Choquard integral.
double weinstein_quotient(const SpectralOps& ops, const Field& u, double t, const ProblemParams& params);
double weinstein_quotient(double a, double b, double l2, double t, const ProblemParams& params);

// Multi-start constrained ascent of the quotient among even fields.
GNEstimate estimate_best_constant(double t, const ProblemParams& params, const SpectralOps& ops,
                                  const GNConfig& config = {});

// Single ascent run from a given start field; exposed for tests.
GNEstimate ascend_quotient(double t, const ProblemParams& params, const SpectralOps& ops, const Field& start,
                           double a0, const GNConfig& config, std::vector<double>* history = nullptr);

std::string to_json(const GNEstimate& e);
std::string gn_csv_header();
std::string gn_csv_row(const ProblemParams& params, const GNEstimate& e);

}  // namespace choquard
