#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "choquard/functionals.hpp"

namespace choquard {

enum class SolveKind { LocalMin, MountainPass, GlobalMin };
std::string to_string(SolveKind k);

struct GridSettings {
  int M = 0;        // 0 selects the default for the dimension
  double L = 0.0;   // 0 selects the default for the dimension
  KernelScheme kernel = KernelScheme::Truncated;
};

// Default grids: N=1 M=1024 L=40; N=2 M=256 L=20; N=3 M=64 L=12.
GridSettings default_grid(int N);
Grid make_grid(int N, const GridSettings& settings);

struct SolveConfig {
  int max_iter = 50000;
  double dt = 1.0;
  double backtrack = 0.5;
  double grad_tol = 0.0;          // <= 0 selects 1e-8 * max(1, |level|)
  double pohozaev_tol_rel = 1e-7; // |P| tolerance relative to a
  double ball_radius = 0.0;       // t0 for the local branch; 0 disables the check
  std::uint64_t seed = 1;
  double init_width = 0.0;        // Gaussian width when auto_box is off; 0 selects L/8
  std::string init_file;          // field file used instead of a Gaussian
  GridSettings grid;
  // Place the initial Gaussian at its fiber critical point and size the box
  // as box_factor times its width (0 selects M/16, i.e. 8 points per width).
  bool auto_box = true;
  double box_factor = 0.0;
  bool newton = true;
  double newton_switch = 1e-3;    // relative residual that hands over to Newton
  bool precondition = true;
  int max_restarts = 3;
  std::vector<double> start_scales{1.0, 0.5, 2.0};  // global multi-start widths
  std::optional<double> C_q;
  std::optional<double> C_p;
  int threads = 1;
};

namespace flag {
inline constexpr const char* kBoxTooSmall = "box-too-small";
inline constexpr const char* kNotConverged = "not-converged";
inline constexpr const char* kStructureViolation = "structure-violation";
inline constexpr const char* kLeftBall = "left-the-ball";
inline constexpr const char* kCoercivity = "coercivity-check-failed";
inline constexpr const char* kKernelFallback = "kernel-fallback";
}  // namespace flag

struct SolveResult {
  Field u;
  double level = 0.0;
  double seminorm = 0.0;  // a^{1/2}
  double pohozaev_residual = 0.0;
  double lambda = 0.0;
  double grad_residual = 0.0;
  double grad_tol = 0.0;
  double pohozaev_tol = 0.0;
  double fiber_root = 0.0;  // t^3 (mountain pass) or t^1 (minimizers) of the result
  int iterations = 0;
  int newton_steps = 0;
  int restarts = 0;
  Regime regime = Regime::CaseI;
  SolveKind kind = SolveKind::LocalMin;
  std::vector<std::string> flags;

  explicit SolveResult(const Field& f) : u(f) {}
  bool converged() const;
  bool has_flag(const std::string& f) const;
};

SolveResult local_minimize(const ProblemParams& params, const SolveConfig& config, const Field* warm = nullptr);
SolveResult mountain_pass(const ProblemParams& params, const SolveConfig& config, const Field* warm = nullptr);
SolveResult global_minimize(const ProblemParams& params, const SolveConfig& config, const Field* warm = nullptr);

struct SweepRow {
  double alpha = 0.0;
  double level = 0.0;
  double seminorm = 0.0;
  double lambda = 0.0;
  double pohozaev_residual = 0.0;
  double grad_residual = 0.0;
  int iterations = 0;
  std::vector<std::string> flags;
};

struct SweepTable {
  SolveKind kind = SolveKind::LocalMin;
  std::vector<SweepRow> rows;
};

// Runs the given solver for each alpha (sorted descending), warm starting from
// the previous solution.
SweepTable alpha_sweep(const ProblemParams& base, const std::vector<double>& alphas, SolveKind kind,
                       const SolveConfig& config);

std::string sweep_csv_header();
std::string sweep_csv(const SweepTable& table);

struct SubadditivityReport {
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double m_c = 0.0;
  double m_c1 = 0.0;
  double m_c2 = 0.0;
  double gap = 0.0;  // m(c) - m(c1) - m(c2)
  double tolerance = 0.0;  // combined solver tolerance on the three levels
  bool all_converged = false;
};

SubadditivityReport subadditivity_check(const ProblemParams& params, double c1, double c2, const SolveConfig& config);

std::string to_json(const SolveResult& r);
std::string to_json(const SubadditivityReport& r);

}  // namespace choquard
