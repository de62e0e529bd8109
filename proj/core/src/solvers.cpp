#include "choquard/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>

#include "choquard/field_io.hpp"
#include "format.hpp"
#include "json.hpp"
#include "krylov.hpp"

namespace choquard {

namespace {

enum class RootKind { Minimum, Maximum };

struct State {
  SpectralOps ops;
  Field u;
};

Field gaussian_on(const Grid& g, double width, double c) {
  Field u = sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += x[a] * x[a];
    return std::exp(-r2 / (2.0 * width * width));
  });
  return normalize_mass(u, c);
}

FiberOptions fiber_options(const SolveConfig& cfg) {
  FiberOptions o;
  o.C_q = cfg.C_q;
  o.C_p = cfg.C_p;
  return o;
}

double fiber_root(const FiberReport& rep, RootKind kind) {
  const auto r = kind == RootKind::Maximum ? rep.maximum_root() : rep.minimum_root();
  if (!r) {
    throw DomainError(kind == RootKind::Maximum ? "no maximum root: the fiber map has no Pminus critical point"
                                                : "no minimum root: the fiber map has no Pplus critical point");
  }
  return *r;
}

// Moves u along its dilation orbit to the selected fiber critical point; the
// grid is rescaled with it, so the map is exact.
State to_fiber_root(State st, const ProblemParams& pr, RootKind kind) {
  const MomentTriple m = moments(st.ops, st.u, pr);
  const double t = fiber_root(fiber_analyze(m, pr), kind);
  return State{st.ops.rescaled(std::exp(-t)), dilate_exact(st.u, t)};
}

Field axpy(const Field& u, double a, const Field& d) {
  Field v = u;
  for (std::size_t i = 0; i < v.size(); ++i) v.values[i] += a * d.values[i];
  return v;
}

// A constant field has zero tangential gradient without being a solution; a
// small seeded radial bump moves it off that point.
Field escape_degenerate(Field u, std::uint64_t seed) {
  const auto [lo, hi] = std::minmax_element(u.values.begin(), u.values.end());
  const double scale = std::max(std::abs(*lo), std::abs(*hi));
  if (*hi - *lo > 1e-12 * scale) return u;
  std::mt19937_64 rng(seed);
  const double amp = 1e-6 * (scale > 0.0 ? scale : 1.0) * std::uniform_real_distribution<double>(0.5, 1.5)(rng);
  const Grid& g = u.grid;
  const double w = g.half_length() / 8.0;
  const Field bump = sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += x[a] * x[a];
    return std::exp(-r2 / (2.0 * w * w));
  });
  return axpy(u, amp, bump);
}

State initial_state(const ProblemParams& pr, const SolveConfig& cfg, const Field* warm, RootKind kind) {
  GridSettings gs = cfg.grid;
  const GridSettings def = default_grid(pr.N);
  if (gs.M <= 0) gs.M = def.M;
  if (!(gs.L > 0.0)) gs.L = def.L;

  std::optional<Field> start;
  if (warm) {
    start = *warm;
  } else if (!cfg.init_file.empty()) {
    start = read_field_file(cfg.init_file);
  }
  if (start) {
    if (start->grid.dim() != pr.N) throw DomainError("initial field dimension does not match N");
    State st{SpectralOps(start->grid, pr.s, pr.mu, gs.kernel),
             normalize_mass(escape_degenerate(*start, cfg.seed), pr.c)};
    return cfg.auto_box ? to_fiber_root(std::move(st), pr, kind) : st;
  }
  if (cfg.auto_box) {
    const double factor = cfg.box_factor > 0.0 ? cfg.box_factor : gs.M / 16.0;
    const Grid g(pr.N, gs.M, factor);
    State st{SpectralOps(g, pr.s, pr.mu, gs.kernel), gaussian_on(g, 1.0, pr.c)};
    return to_fiber_root(std::move(st), pr, kind);
  }
  const Grid g(pr.N, gs.M, gs.L);
  const double w = cfg.init_width > 0.0 ? cfg.init_width : gs.L / 8.0;
  return State{SpectralOps(g, pr.s, pr.mu, gs.kernel), gaussian_on(g, w, pr.c)};
}

// Tangent direction (P^{-1} G projected so that <D, u> = 0) for
// P = scale (-Delta)^s + sigma.
Field preconditioned_direction(const SpectralOps& ops, const Field& u, const Field& G, double scale, double sigma) {
  std::vector<double> inv(ops.lap_multiplier().size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / (scale * ops.lap_multiplier()[i] + sigma);
  const Field Dp = ops.apply_multiplier(G, inv);
  const Field up = ops.apply_multiplier(u, inv);
  return axpy(Dp, -inner(Dp, u) / inner(up, u), up);
}

Field tangential(const Field& G, const Field& u, double c2) { return axpy(G, -inner(G, u) / c2, u); }

double coercivity_bound(double a, const ProblemParams& pr, double C_q, double C_p) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  return 0.5 * a - C_p / (2.0 * pr.p) * std::pow(a, pr.p * gp) * std::pow(pr.c, 2.0 * pr.p * (1.0 - gp)) -
         pr.alpha * C_q / (2.0 * pr.q) * std::pow(a, pr.q * gq) * std::pow(pr.c, 2.0 * pr.q * (1.0 - gq));
}

double default_grad_tol(const SolveConfig& cfg, double level) {
  return cfg.grad_tol > 0.0 ? cfg.grad_tol : 1e-8 * std::max(1.0, std::abs(level));
}

struct DescentOutcome {
  int iterations = 0;
  bool left_ball = false;
  bool coercivity_failed = false;
};

// Projected gradient descent on S_c with Armijo backtracking.
DescentOutcome descend_minimum(const SpectralOps& ops, Field& u, const ProblemParams& pr, const SolveConfig& cfg,
                               bool check_coercivity) {
  DescentOutcome out;
  const double c2 = pr.c * pr.c;
  double dt = cfg.dt;
  MomentTriple m = moments(ops, u, pr);
  double J = energy(m, pr);
  for (; out.iterations < cfg.max_iter; ++out.iterations) {
    const Field G = gradient(ops, u, pr);
    const double lam = inner(G, u) / c2;
    const Field R = tangential(G, u, c2);
    const double res = l2_norm(R);
    const double scale = std::max(std::abs(lam) * pr.c, m.a / pr.c);
    if (cfg.newton && res <= cfg.newton_switch * scale) break;
    if (!cfg.newton && res <= default_grad_tol(cfg, J) && std::abs(pohozaev(m, pr)) <= cfg.pohozaev_tol_rel * m.a) {
      break;
    }
    const Field D = cfg.precondition ? preconditioned_direction(ops, u, G, 1.0, m.a / c2) : R;
    const double slope = inner(G, D);
    bool accepted = false;
    while (dt > 1e-16) {
      Field v = normalize_mass(axpy(u, -dt, D), pr.c);
      const MomentTriple mv = moments(ops, v, pr);
      const double Jv = energy(mv, pr);
      const bool armijo = Jv <= J - 1e-4 * dt * slope;
      const bool roundoff = dt * slope <= 1e-13 * std::abs(J) && Jv <= J;
      if (armijo || roundoff) {
        if (cfg.ball_radius > 0.0 && std::sqrt(mv.a) >= cfg.ball_radius) {
          out.left_ball = true;
          return out;
        }
        if (check_coercivity && cfg.C_q && cfg.C_p &&
            Jv < coercivity_bound(mv.a, pr, *cfg.C_q, *cfg.C_p) - 1e-10 * std::max(1.0, std::abs(Jv))) {
          out.coercivity_failed = true;
        }
        u = std::move(v);
        m = mv;
        J = Jv;
        accepted = true;
        dt = std::min(dt * 1.5, 1e6);
        break;
      }
      dt *= cfg.backtrack;
    }
    if (!accepted) break;
  }
  return out;
}

// Fibered min-max: descend F(u) = max_t E_u(t). Each iterate is moved to its
// fiber maximum (with the grid), where the envelope gradient is the plain one.
int descend_fibered(State& st, const ProblemParams& pr, const SolveConfig& cfg) {
  const double c2 = pr.c * pr.c;
  // +inf when the fiber of v has no maximum, so such trial steps are rejected.
  auto evaluate = [&](const SpectralOps& ops, const Field& v, double& t3) {
    const MomentTriple m = moments(ops, v, pr);
    const auto r = fiber_analyze(m, pr).maximum_root();
    if (!r) return std::numeric_limits<double>::infinity();
    t3 = *r;
    return fiber_value(m, t3, pr);
  };
  double t3 = 0.0;
  double F = evaluate(st.ops, st.u, t3);
  if (!std::isfinite(F)) throw DomainError("no maximum root: the fiber map has no Pminus critical point");
  // On a periodic box F keeps decreasing slowly as the profile spreads, so the
  // residual can stall above the switch level; the best iterate is kept.
  std::optional<State> best;
  double best_rel = std::numeric_limits<double>::infinity();
  int since_best = 0;
  double dt = cfg.dt;
  int it = 0;
  for (; it < cfg.max_iter; ++it) {
    st = State{st.ops.rescaled(std::exp(-t3)), dilate_exact(st.u, t3)};
    const double a = st.ops.hs_seminorm_sq(st.u);
    const Field G = gradient(st.ops, st.u, pr);
    const double lam = inner(G, st.u) / c2;
    const Field R = tangential(G, st.u, c2);
    const double rel = l2_norm(R) / std::max(std::abs(lam) * pr.c, a / pr.c);
    if (rel < best_rel) {
      best_rel = rel;
      best = st;
      since_best = 0;
    } else if (++since_best >= 50) {
      break;
    }
    if (rel <= cfg.newton_switch) break;
    const Field D = cfg.precondition ? preconditioned_direction(st.ops, st.u, G, 1.0, a / c2) : R;
    const double slope = inner(G, D);
    bool accepted = false;
    while (dt > 1e-16) {
      Field v = normalize_mass(axpy(st.u, -dt, D), pr.c);
      double tv = 0.0;
      const double Fv = evaluate(st.ops, v, tv);
      if (Fv <= F - 1e-4 * dt * slope || (dt * slope <= 1e-13 * std::abs(F) && Fv <= F)) {
        st.u = std::move(v);
        t3 = tv;
        F = Fv;
        accepted = true;
        dt = std::min(dt * 1.5, 1e6);
        break;
      }
      dt *= cfg.backtrack;
    }
    if (!accepted) break;
  }
  if (best) st = std::move(*best);
  return it;
}

// Newton-Krylov on the bordered system (H - lambda) du - dlambda u = -R, <u, du> = 0,
// restricted to fields even in every coordinate.
int newton_polish(const SpectralOps& ops, Field& u, const ProblemParams& pr) {
  const double c2 = pr.c * pr.c;
  const std::size_t n = u.size();
  u = normalize_mass(symmetrize_even(u), pr.c);
  auto residual = [&](const Field& v, double& lam) {
    const Field G = gradient(ops, v, pr);
    lam = inner(G, v) / c2;
    return symmetrize_even(tangential(G, v, c2));
  };
  double lam = 0.0;
  Field R = residual(u, lam);
  double res = l2_norm(R);
  int steps = 0;
  for (; steps < 30; ++steps) {
    const double a = ops.hs_seminorm_sq(u);
    const double scale = std::max(std::abs(lam) * pr.c, a / pr.c);
    if (res <= 1e-13 * scale) break;
    const Linearization lin(ops, u, pr);
    const double cell = ops.grid().cell_volume();
    auto A = [&](const detail::Vec& x) {
      Field v(ops.grid(), detail::Vec(x.begin(), x.begin() + n));
      Field Hv = lin.apply(v);
      for (std::size_t i = 0; i < n; ++i) Hv.values[i] -= lam * v.values[i] + x[n] * u.values[i];
      Hv = symmetrize_even(Hv);
      detail::Vec out(std::move(Hv.values));
      out.push_back(inner(u, v) / cell);
      return out;
    };
    std::vector<double> inv(ops.lap_multiplier().size());
    const double sigma = std::max(std::abs(lam), a / c2);
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / (ops.lap_multiplier()[i] + sigma);
    auto P = [&](const detail::Vec& x) {
      Field v(ops.grid(), detail::Vec(x.begin(), x.begin() + n));
      detail::Vec out(std::move(ops.apply_multiplier(v, inv).values));
      out.push_back(x[n]);
      return out;
    };
    detail::Vec rhs(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -R.values[i];
    const auto sol = detail::gmres(A, P, rhs, 1e-10, 80, 800);
    Field du(ops.grid(), detail::Vec(sol.x.begin(), sol.x.begin() + n));
    bool improved = false;
    for (double damp = 1.0; damp >= 1.0 / 64.0; damp *= 0.5) {
      Field v = normalize_mass(axpy(u, damp, du), pr.c);
      double lv = 0.0;
      Field Rv = residual(v, lv);
      const double rv = l2_norm(Rv);
      if (rv < res) {
        u = std::move(v);
        lam = lv;
        R = std::move(Rv);
        improved = res > 2.0 * rv || damp == 1.0;
        res = rv;
        break;
      }
    }
    if (!improved) break;
  }
  return steps;
}

SolveResult finalize(const SpectralOps& ops, const Field& u, const ProblemParams& pr, SolveKind kind,
                     const SolveConfig& cfg) {
  SolveResult r(u);
  r.kind = kind;
  r.regime = classify_regime(pr);
  const MomentTriple m = moments(ops, u, pr);
  r.level = energy(m, pr);
  r.seminorm = std::sqrt(m.a);
  r.pohozaev_residual = pohozaev(m, pr);
  r.lambda = multiplier_estimate(m, inner(u, u), pr);
  const Field G = gradient(ops, u, pr);
  r.grad_residual = l2_norm(axpy(G, -r.lambda, u));
  r.grad_tol = default_grad_tol(cfg, r.level);
  r.pohozaev_tol = cfg.pohozaev_tol_rel * m.a;
  const FiberReport rep = fiber_analyze(m, pr, fiber_options(cfg));
  const auto root = kind == SolveKind::MountainPass ? rep.maximum_root() : rep.minimum_root();
  r.fiber_root = root ? *root : std::numeric_limits<double>::quiet_NaN();
  if (outer_mass(u) > 1e-6 * pr.c * pr.c) r.flags.push_back(flag::kBoxTooSmall);
  if (rep.structure_violation) r.flags.push_back(flag::kStructureViolation);
  if (ops.kernel_fallback()) r.flags.push_back(flag::kKernelFallback);
  if (!(r.grad_residual <= r.grad_tol && std::abs(r.pohozaev_residual) <= r.pohozaev_tol)) {
    r.flags.push_back(flag::kNotConverged);
  }
  return r;
}

void add_flag(SolveResult& r, const char* f) {
  if (!r.has_flag(f)) r.flags.push_back(f);
}

}  // namespace

std::string to_string(SolveKind k) {
  switch (k) {
    case SolveKind::LocalMin: return "LocalMin";
    case SolveKind::MountainPass: return "MountainPass";
    case SolveKind::GlobalMin: return "GlobalMin";
  }
  return "unknown";
}

GridSettings default_grid(int N) {
  GridSettings g;
  switch (N) {
    case 1: g.M = 1024; g.L = 40.0; break;
    case 2: g.M = 256; g.L = 20.0; break;
    case 3: g.M = 64; g.L = 12.0; break;
    default: throw DomainError("N must be 1, 2 or 3");
  }
  return g;
}

Grid make_grid(int N, const GridSettings& settings) {
  const GridSettings def = default_grid(N);
  return Grid(N, settings.M > 0 ? settings.M : def.M, settings.L > 0.0 ? settings.L : def.L);
}

bool SolveResult::converged() const { return !has_flag(flag::kNotConverged); }

bool SolveResult::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

SolveResult local_minimize(const ProblemParams& params, const SolveConfig& config, const Field* warm) {
  if (classify_regime(params) != Regime::CaseI) throw DomainError("the local branch needs CaseI");
  if (!(params.alpha > 0.0)) throw DomainError("alpha must be > 0 for the local branch");
  State st = initial_state(params, config, warm, RootKind::Minimum);
  int restarts = 0;
  int iterations = 0;
  bool left = false;
  while (true) {
    Field u = st.u;
    const DescentOutcome d = descend_minimum(st.ops, u, params, config, false);
    iterations += d.iterations;
    if (!d.left_ball) {
      st.u = std::move(u);
      left = false;
      break;
    }
    left = true;
    if (restarts == config.max_restarts) {
      st.u = std::move(u);
      break;
    }
    ++restarts;
    // Restart from a wider profile (smaller seminorm) on a correspondingly wider box.
    st = State{st.ops.rescaled(2.0), dilate_exact(st.u, -std::log(2.0))};
  }
  int newton_steps = 0;
  if (config.newton && !left) newton_steps = newton_polish(st.ops, st.u, params);
  SolveResult r = finalize(st.ops, st.u, params, SolveKind::LocalMin, config);
  r.iterations = iterations;
  r.newton_steps = newton_steps;
  r.restarts = restarts;
  if (left) {
    add_flag(r, flag::kLeftBall);
    add_flag(r, flag::kNotConverged);
  }
  return r;
}

SolveResult mountain_pass(const ProblemParams& params, const SolveConfig& config, const Field* warm) {
  const Regime regime = classify_regime(params);
  if (regime == Regime::CaseIV) throw DomainError("the mountain pass branch needs CaseI, CaseII or CaseIII");
  State st = initial_state(params, config, warm, RootKind::Maximum);
  const int iterations = descend_fibered(st, params, config);
  st = to_fiber_root(std::move(st), params, RootKind::Maximum);
  int newton_steps = 0;
  if (config.newton) newton_steps = newton_polish(st.ops, st.u, params);
  SolveResult r = finalize(st.ops, st.u, params, SolveKind::MountainPass, config);
  r.iterations = iterations;
  r.newton_steps = newton_steps;
  if (!(std::abs(r.fiber_root) <= 1e-6)) add_flag(r, flag::kNotConverged);
  return r;
}

SolveResult global_minimize(const ProblemParams& params, const SolveConfig& config, const Field* warm) {
  if (classify_regime(params) != Regime::CaseIV) throw DomainError("the global branch needs CaseIV");
  const State base = initial_state(params, config, warm, RootKind::Minimum);
  std::vector<Field> starts;
  if (warm) {
    starts.push_back(base.u);
  } else {
    // Width of the root Gaussian: unit width times the box scale relative to the reference.
    const GridSettings def = default_grid(params.N);
    const int M = config.grid.M > 0 ? config.grid.M : def.M;
    const double factor = config.box_factor > 0.0 ? config.box_factor : M / 16.0;
    const double w = config.auto_box ? base.ops.grid().half_length() / factor
                                     : (config.init_width > 0.0 ? config.init_width : base.ops.grid().half_length() / 8.0);
    for (double sc : config.start_scales) starts.push_back(gaussian_on(base.ops.grid(), w * sc, params.c));
  }
  auto solve_start = [&](const Field& s) {
    Field u = s;
    const DescentOutcome d = descend_minimum(base.ops, u, params, config, true);
    int newton_steps = 0;
    if (config.newton) newton_steps = newton_polish(base.ops, u, params);
    SolveResult r = finalize(base.ops, u, params, SolveKind::GlobalMin, config);
    r.iterations = d.iterations;
    r.newton_steps = newton_steps;
    if (d.coercivity_failed) add_flag(r, flag::kCoercivity);
    return r;
  };
  std::vector<SolveResult> results;
  const std::size_t batch = static_cast<std::size_t>(std::max(1, config.threads));
  for (std::size_t i = 0; i < starts.size(); i += batch) {
    std::vector<std::future<SolveResult>> jobs;
    for (std::size_t j = i; j < std::min(starts.size(), i + batch); ++j) {
      jobs.push_back(std::async(batch > 1 ? std::launch::async : std::launch::deferred, solve_start,
                                std::cref(starts[j])));
    }
    for (auto& f : jobs) results.push_back(f.get());
  }
  // Merged in start order, so the choice does not depend on scheduling.
  std::optional<SolveResult> best;
  for (SolveResult& r : results) {
    const auto tol = std::max(r.grad_tol, best ? best->grad_tol : 0.0);
    if (!best || r.level < best->level - tol ||
        (std::abs(r.level - best->level) <= tol && r.seminorm < best->seminorm)) {
      best = std::move(r);
    }
  }
  return *best;
}

SweepTable alpha_sweep(const ProblemParams& base, const std::vector<double>& alphas, SolveKind kind,
                       const SolveConfig& config) {
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] < alphas[i - 1])) throw DomainError("sweep alphas must be strictly descending");
  }
  SweepTable table;
  table.kind = kind;
  std::optional<Field> prev;
  for (double a : alphas) {
    ProblemParams p = base;
    p.alpha = a;
    SolveConfig cfg = config;
    if (kind == SolveKind::LocalMin && cfg.C_q && cfg.C_p) {
      const GFunctionReport g = g_analyze(p, *cfg.C_q, *cfg.C_p);
      if (!g.no_positive_region) cfg.ball_radius = g.t0;
    }
    const Field* warm = prev ? &*prev : nullptr;
    SolveResult r = kind == SolveKind::LocalMin       ? local_minimize(p, cfg, warm)
                    : kind == SolveKind::MountainPass ? mountain_pass(p, cfg, warm)
                                                      : global_minimize(p, cfg, warm);
    SweepRow row;
    row.alpha = a;
    row.level = r.level;
    row.seminorm = r.seminorm;
    row.lambda = r.lambda;
    row.pohozaev_residual = r.pohozaev_residual;
    row.grad_residual = r.grad_residual;
    row.iterations = r.iterations;
    row.flags = r.flags;
    table.rows.push_back(row);
    prev = std::move(r.u);
  }
  return table;
}

std::string sweep_csv_header() {
  return "alpha,level,seminorm,lambda,pohozaev_residual,grad_residual,iterations,flags";
}

std::string sweep_csv(const SweepTable& table) {
  using detail::num17;
  std::string out = sweep_csv_header() + "\r\n";
  for (const SweepRow& r : table.rows) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    out += num17(r.alpha) + "," + num17(r.level) + "," + num17(r.seminorm) + "," + num17(r.lambda) + "," +
           num17(r.pohozaev_residual) + "," + num17(r.grad_residual) + "," + std::to_string(r.iterations) + "," +
           flags + "\r\n";
  }
  return out;
}

SubadditivityReport subadditivity_check(const ProblemParams& params, double c1, double c2, const SolveConfig& config) {
  if (!(c1 > 0.0 && c2 > 0.0)) throw DomainError("subadditivity needs c1 > 0 and c2 > 0");
  const double c = params.c;
  if (std::abs(c1 * c1 + c2 * c2 - c * c) > 1e-12 * c * c) throw DomainError("subadditivity needs c1^2 + c2^2 = c^2");
  if (config.C_p) {
    const CbarResult cb = cbar(params, *config.C_p);
    if (!(c < cb.value)) throw DomainError("subadditivity needs all masses below cbar");
  }
  // Order the split so swapping c1 and c2 gives the identical report.
  const double lo = std::min(c1, c2), hi = std::max(c1, c2);
  ProblemParams p1 = params, p2 = params;
  p1.c = lo;
  p2.c = hi;
  const SolveResult r = global_minimize(params, config);
  const SolveResult r1 = global_minimize(p1, config);
  const SolveResult r2 = global_minimize(p2, config);
  SubadditivityReport rep;
  rep.c = c;
  rep.c1 = c1;
  rep.c2 = c2;
  rep.m_c = r.level;
  rep.m_c1 = c1 <= c2 ? r1.level : r2.level;
  rep.m_c2 = c1 <= c2 ? r2.level : r1.level;
  rep.gap = r.level - (r1.level + r2.level);
  rep.tolerance = r.grad_tol + r1.grad_tol + r2.grad_tol;
  rep.all_converged = r.converged() && r1.converged() && r2.converged();
  return rep;
}

std::string to_json(const SolveResult& r) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(r.kind);
  j["regime"] = to_string(r.regime);
  j["converged"] = r.converged();
  j["level"] = r.level;
  j["seminorm"] = r.seminorm;
  j["lambda"] = r.lambda;
  j["pohozaev_residual"] = r.pohozaev_residual;
  j["pohozaev_tol"] = r.pohozaev_tol;
  j["grad_residual"] = r.grad_residual;
  j["grad_tol"] = r.grad_tol;
  j["fiber_root"] = std::isfinite(r.fiber_root) ? nlohmann::ordered_json(r.fiber_root) : nlohmann::ordered_json(nullptr);
  j["iterations"] = r.iterations;
  j["newton_steps"] = r.newton_steps;
  j["restarts"] = r.restarts;
  j["flags"] = r.flags;
  j["grid"] = {{"N", r.u.grid.dim()}, {"M", r.u.grid.points_per_axis()}, {"L", r.u.grid.half_length()}};
  return j.dump(2);
}

std::string to_json(const SubadditivityReport& r) {
  nlohmann::ordered_json j;
  j["c"] = r.c;
  j["c1"] = r.c1;
  j["c2"] = r.c2;
  j["m_c"] = r.m_c;
  j["m_c1"] = r.m_c1;
  j["m_c2"] = r.m_c2;
  j["gap"] = r.gap;
  j["tolerance"] = r.tolerance;
  j["strict"] = r.gap < -3.0 * r.tolerance;
  j["all_converged"] = r.all_converged;
  return j.dump(2);
}

}  // namespace choquard
