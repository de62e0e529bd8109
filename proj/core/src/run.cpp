#include "choquard/run.hpp"

#include <fftw3.h>

#include <boost/version.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>

#include "choquard/field_io.hpp"
#include "format.hpp"
#include "json.hpp"

#ifndef CHOQUARD_VERSION
#define CHOQUARD_VERSION "unknown"
#endif

namespace choquard {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct ConstantRecord {
  double t = 0.0;
  double value = 0.0;
  bool from_config = false;
  std::optional<GNEstimate> estimate;
};

class Output {
 public:
  explicit Output(const std::string& dir) : dir_(dir) {}

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << content;
    files_.push_back(name);
  }

  void write_field(const std::string& name, const Field& u) {
    fs::create_directories(dir_);
    write_field_file((dir_ / name).string(), u);
    files_.push_back(name);
  }

  const fs::path& dir() const { return dir_; }
  const std::vector<std::string>& files() const { return files_; }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

std::string cache_key(const ProblemParams& pr, double t, const Grid& g, std::uint64_t seed) {
  using detail::num17;
  return "N=" + std::to_string(pr.N) + "|s=" + num17(pr.s) + "|mu=" + num17(pr.mu) + "|t=" + num17(t) +
         "|M=" + std::to_string(g.points_per_axis()) + "|L=" + num17(g.half_length()) +
         "|seed=" + std::to_string(seed);
}

json load_cache(const fs::path& path, std::ostream& log) {
  std::ifstream in(path);
  if (!in) return json::object();
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    log << "ignoring unreadable constant cache " << path.string() << ": " << e.what() << "\n";
    return json::object();
  }
}

GNEstimate estimate_cached(double t, const RunConfig& c, std::ostream& log) {
  const ProblemParams& pr = c.params;
  const Grid g = make_grid(pr.N, c.constants.grid);
  const std::string key = cache_key(pr, t, g, c.constants.gn.seed);
  const fs::path path = fs::path(c.output_dir) / "gn_cache.json";
  json cache = load_cache(path, log);
  if (cache.contains(key)) {
    const json& e = cache[key];
    GNEstimate est;
    est.t = t;
    est.C_t = e.at("C_t").get<double>();
    est.a = e.at("maximizer").at("a").get<double>();
    est.b = e.at("maximizer").at("b").get<double>();
    est.l2 = e.at("maximizer").at("l2").get<double>();
    est.iterations = e.at("iterations").get<int>();
    est.residual = e.at("residual").get<double>();
    est.converged = e.at("converged").get<bool>();
    est.best_start = e.at("best_start").get<int>();
    log << "constant cache hit: " << key << "\n";
    return est;
  }
  log << "estimating C_t for " << key << "\n";
  const SpectralOps ops(g, pr.s, pr.mu, c.constants.grid.kernel);
  const GNEstimate est = estimate_best_constant(t, pr, ops, c.constants.gn);
  cache[key] = json::parse(to_json(est));
  fs::create_directories(c.output_dir);
  std::ofstream(path) << cache.dump(2) << "\n";
  return est;
}

// Both constants of the run, estimated unless fixed in the config.
std::vector<ConstantRecord> resolve_constants(const RunConfig& c, std::ostream& log) {
  std::vector<ConstantRecord> out;
  const bool force = c.mode == Mode::EstimateConstants;
  const std::pair<double, std::optional<double>> wanted[] = {{c.params.q, c.constants.C_q},
                                                             {c.params.p, c.constants.C_p}};
  for (const auto& [t, fixed] : wanted) {
    ConstantRecord r;
    r.t = t;
    if (fixed && !force) {
      r.value = *fixed;
      r.from_config = true;
    } else {
      r.estimate = estimate_cached(t, c, log);
      r.value = r.estimate->C_t;
    }
    out.push_back(r);
  }
  return out;
}

json thresholds(const ProblemParams& pr, Regime regime, double C_q, double C_p) {
  json j;
  j["C_q"] = C_q;
  j["C_p"] = C_p;
  const double gq = gamma(pr.q, pr), gp = gamma(pr.p, pr);
  if (pr.q * gq < 1.0 && pr.p * gp > 1.0) {
    const double a1 = alpha1(pr, C_q, C_p), a2 = alpha2(pr, C_q, C_p);
    j["alpha1"] = a1;
    j["alpha2"] = a2;
    j["alpha_min"] = std::min(a1, a2);
  }
  if (regime == Regime::CaseII) {
    j["mass_condition_lhs"] = l2_critical_mass_lhs(pr, C_q);
    j["mass_condition_holds"] = l2_critical_mass_condition(pr, C_q);
  }
  if (regime == Regime::CaseIV && gp < 1.0) {
    const CbarResult cb = cbar(pr, C_p);
    j["cbar"] = cb.value;
    j["cbar_overflow"] = cb.overflow;
  }
  return j;
}

json manifest_base(const RunConfig& c) {
  json m;
  m["program"] = "choquard";
  m["version"] = CHOQUARD_VERSION;
  m["libraries"] = {{"fftw", std::string(fftw_version)}, {"boost", std::string(BOOST_LIB_VERSION)}};
  m["config"] = json::parse(to_json(c));
  m["seeds"] = {{"solver", c.solver.seed}, {"constants", c.constants.gn.seed}};
  return m;
}

json derived_json(const ProblemParams& pr) {
  const DerivedExponents d = derive(pr);
  return {{"gamma_q", d.gamma_q},          {"gamma_p", d.gamma_p},       {"two_mu_lower", d.two_mu_lower},
          {"two_mu_upper", d.two_mu_upper}, {"l2_critical", d.l2_critical}, {"A_N_mu", d.A_N_mu}};
}

Field gaussian_field(const ProblemParams& pr, const SolveConfig& s) {
  const Grid g = make_grid(pr.N, s.grid);
  const double w = s.init_width > 0.0 ? s.init_width : g.half_length() / 8.0;
  const Field u = sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += x[a] * x[a];
    return std::exp(-r2 / (2.0 * w * w));
  });
  return normalize_mass(u, pr.c);
}

SweepRow row_of(double alpha, const SolveResult& r) {
  SweepRow row;
  row.alpha = alpha;
  row.level = r.level;
  row.seminorm = r.seminorm;
  row.lambda = r.lambda;
  row.pohozaev_residual = r.pohozaev_residual;
  row.grad_residual = r.grad_residual;
  row.iterations = r.iterations;
  row.flags = r.flags;
  return row;
}

json result_json(const SolveResult& r) {
  json j = json::parse(to_json(r));
  const RadialDiagnostic d = radial_monotonicity_check(r.u);
  j["radial"] = {{"max_violation", d.max_violation}, {"min_value", d.min_value}, {"max_abs", d.max_abs}};
  return j;
}

int solve_mode(const RunConfig& c, const SolveConfig& cfg, Output& out, json& manifest) {
  const ProblemParams& pr = c.params;
  SolveResult r = c.mode == Mode::SolveLocal ? local_minimize(pr, cfg)
                  : c.mode == Mode::SolveMp  ? mountain_pass(pr, cfg)
                                             : global_minimize(pr, cfg);
  if (c.json) out.write("result.json", result_json(r).dump(2) + "\n");
  if (c.csv) {
    SweepTable t;
    t.kind = r.kind;
    t.rows.push_back(row_of(pr.alpha, r));
    out.write("result.csv", sweep_csv(t));
  }
  if (c.field_bin) out.write_field("solution.chqf", r.u);
  manifest["converged"] = r.converged();
  return r.converged() ? kExitConverged : kExitNotConverged;
}

std::vector<double> sweep_alphas(const RunConfig& c, const ResolvedConstants& k) {
  if (!c.sweep.alphas.empty()) return c.sweep.alphas;
  const double amin = std::min(alpha1(c.params, *k.C_q, *k.C_p), alpha2(c.params, *k.C_q, *k.C_p));
  std::vector<double> out;
  double a = c.sweep.alpha_fraction * amin;
  for (int i = 0; i <= c.sweep.halvings; ++i, a *= 0.5) out.push_back(a);
  return out;
}

bool all_converged(const SweepTable& t) {
  for (const auto& r : t.rows) {
    for (const auto& f : r.flags) {
      if (f == flag::kNotConverged) return false;
    }
  }
  return true;
}

json sweep_json(const SweepTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    rows.push_back({{"alpha", r.alpha},
                    {"level", r.level},
                    {"seminorm", r.seminorm},
                    {"lambda", r.lambda},
                    {"pohozaev_residual", r.pohozaev_residual},
                    {"grad_residual", r.grad_residual},
                    {"iterations", r.iterations},
                    {"flags", r.flags}});
  }
  return {{"kind", to_string(t.kind)}, {"rows", rows}};
}

int sweep_mode(const RunConfig& c, const SolveConfig& cfg, const ResolvedConstants& k, Output& out,
               json& manifest) {
  const std::vector<double> alphas = sweep_alphas(c, k);
  std::vector<double> mp_alphas = alphas;
  if (c.sweep.include_zero) mp_alphas.push_back(0.0);
  const bool local = c.sweep.branch != SweepBranch::MountainPass;
  const bool mp = c.sweep.branch != SweepBranch::Local;
  const auto policy = c.threads > 1 ? std::launch::async : std::launch::deferred;
  std::future<SweepTable> local_job, mp_job;
  if (local) local_job = std::async(policy, [&] { return alpha_sweep(c.params, alphas, SolveKind::LocalMin, cfg); });
  if (mp) mp_job = std::async(policy, [&] { return alpha_sweep(c.params, mp_alphas, SolveKind::MountainPass, cfg); });
  bool ok = true;
  json summary;
  if (local) {
    const SweepTable t = local_job.get();
    ok = ok && all_converged(t);
    if (c.csv) out.write("sweep_local.csv", sweep_csv(t));
    summary["local"] = sweep_json(t);
  }
  if (mp) {
    const SweepTable t = mp_job.get();
    ok = ok && all_converged(t);
    if (c.csv) out.write("sweep_mp.csv", sweep_csv(t));
    summary["mountain_pass"] = sweep_json(t);
  }
  if (c.json) out.write("sweep.json", summary.dump(2) + "\n");
  manifest["converged"] = ok;
  return ok ? kExitConverged : kExitNotConverged;
}

int subadditivity_mode(const RunConfig& c, const SolveConfig& cfg, Output& out, json& manifest) {
  const double c1 = c.sub_c1.value_or(c.params.c / std::sqrt(2.0));
  const double c2 = c.sub_c2.value_or(c.params.c / std::sqrt(2.0));
  const SubadditivityReport rep = subadditivity_check(c.params, c1, c2, cfg);
  if (c.json) out.write("subadditivity.json", to_json(rep) + "\n");
  if (c.csv) {
    using detail::num17;
    out.write("subadditivity.csv", "c,c1,c2,m_c,m_c1,m_c2,gap,tolerance,strict\r\n" + num17(rep.c) + "," +
                                       num17(rep.c1) + "," + num17(rep.c2) + "," + num17(rep.m_c) + "," +
                                       num17(rep.m_c1) + "," + num17(rep.m_c2) + "," + num17(rep.gap) + "," +
                                       num17(rep.tolerance) + "," +
                                       (rep.gap < -3.0 * rep.tolerance ? "true" : "false") + "\r\n");
  }
  manifest["converged"] = rep.all_converged;
  return rep.all_converged ? kExitConverged : kExitNotConverged;
}

int fiber_mode(const RunConfig& c, const ResolvedConstants& k, Output& out) {
  const ProblemParams& pr = c.params;
  const Field u = c.fiber_field.empty() ? gaussian_field(pr, c.solver) : read_field_file(c.fiber_field);
  if (u.grid.dim() != pr.N) throw DomainError("fiber.field dimension does not match params.N");
  const SpectralOps ops(u.grid, pr.s, pr.mu, c.solver.grid.kernel);
  const MomentTriple m = moments(ops, u, pr);
  FiberOptions fo;
  fo.C_q = k.C_q;
  fo.C_p = k.C_p;
  json j;
  j["moments"] = {{"a", m.a}, {"b", m.b}, {"d", m.d}};
  j["energy"] = energy(m, pr);
  j["pohozaev"] = pohozaev(m, pr);
  j["fiber"] = json::parse(to_json(fiber_analyze(m, pr, fo)));
  if (classify_regime(pr) == Regime::CaseI && pr.alpha > 0.0 && k.C_q && k.C_p) {
    j["g_function"] = json::parse(to_json(g_analyze(pr, *k.C_q, *k.C_p)));
  }
  if (c.json) out.write("fiber_report.json", j.dump(2) + "\n");
  return kExitConverged;
}

int constants_mode(const RunConfig& c, const std::vector<ConstantRecord>& recs, Output& out) {
  bool ok = true;
  std::string csv = gn_csv_header() + "\r\n";
  json arr = json::array();
  for (const auto& r : recs) {
    ok = ok && r.estimate->converged;
    csv += gn_csv_row(c.params, *r.estimate) + "\r\n";
    arr.push_back(json::parse(to_json(*r.estimate)));
  }
  if (c.csv) out.write("constants.csv", csv);
  if (c.json) out.write("constants.json", arr.dump(2) + "\n");
  return ok ? kExitConverged : kExitNotConverged;
}

int selftest_mode(const RunConfig& c, Output& out, std::ostream& log) {
  const auto cases = run_selftest();
  int failed = 0;
  for (const auto& t : cases) {
    if (!t.passed) {
      ++failed;
      log << "FAIL " << t.module << "/" << t.name << ": " << t.detail << "\n";
    }
  }
  log << "selftest: " << cases.size() - failed << " passed, " << failed << " failed\n";
  if (c.json) out.write("selftest.json", to_json(cases) + "\n");
  return failed == 0 ? kExitConverged : kExitNotConverged;
}

}  // namespace

int run(const RunConfig& c, std::ostream& log) {
  Output out(c.output_dir);
  json manifest = manifest_base(c);
  auto finish = [&](int code) {
    manifest["exit_status"] = code;
    manifest["outputs"] = out.files();
    fs::create_directories(out.dir());
    std::ofstream(out.dir() / "manifest.json") << manifest.dump(2) << "\n";
    return code;
  };

  if (c.mode == Mode::Selftest) return finish(selftest_mode(c, out, log));

  std::vector<ConstantRecord> recs;
  ResolvedConstants k;
  try {
    c.params.validate();
    const Regime regime = classify_regime(c.params);
    manifest["regime"] = to_string(regime);
    manifest["derived"] = derived_json(c.params);
    recs = resolve_constants(c, log);
    if (!recs.empty()) {
      k.C_q = c.constants.factor * recs[0].value;
      k.C_p = c.constants.factor * recs[1].value;
      json cj = json::array();
      for (const auto& r : recs) {
        json e = {{"t", r.t}, {"C_t", r.value}, {"source", r.from_config ? "config" : "estimated"}};
        if (r.estimate) {
          e["residual"] = r.estimate->residual;
          e["converged"] = r.estimate->converged;
        }
        cj.push_back(e);
      }
      manifest["constants"] = cj;
      manifest["thresholds"] = {{"C", thresholds(c.params, regime, recs[0].value, recs[1].value)},
                                {"2C", thresholds(c.params, regime, 2.0 * recs[0].value, 2.0 * recs[1].value)},
                                {"enforced_factor", c.constants.factor}};
    }
  } catch (const DomainError& e) {
    manifest["violations"] = {std::string("params: ") + e.what()};
    log << "config error: " << e.what() << "\n";
    return finish(kExitConfigError);
  }

  const std::vector<std::string> violations = validate(c, k);
  if (!violations.empty()) {
    manifest["violations"] = violations;
    for (const auto& v : violations) log << "config error: " << v << "\n";
    return finish(kExitConfigError);
  }

  SolveConfig cfg = c.solver;
  cfg.C_q = k.C_q;
  cfg.C_p = k.C_p;
  cfg.threads = c.threads;
  if (c.mode == Mode::SolveLocal && !(cfg.ball_radius > 0.0)) {
    const GFunctionReport g = g_analyze(c.params, *k.C_q, *k.C_p);
    if (!g.no_positive_region) cfg.ball_radius = g.t0;
    manifest["ball_radius"] = cfg.ball_radius;
  }

  try {
    switch (c.mode) {
      case Mode::EstimateConstants: return finish(constants_mode(c, recs, out));
      case Mode::FiberReport: return finish(fiber_mode(c, k, out));
      case Mode::SolveLocal:
      case Mode::SolveMp:
      case Mode::SolveGlobal: return finish(solve_mode(c, cfg, out, manifest));
      case Mode::AlphaSweep: return finish(sweep_mode(c, cfg, k, out, manifest));
      case Mode::Subadditivity: return finish(subadditivity_mode(c, cfg, out, manifest));
      case Mode::Selftest: return finish(selftest_mode(c, out, log));
    }
  } catch (const DomainError& e) {
    manifest["violations"] = {e.what()};
    log << "error: " << e.what() << "\n";
    return finish(kExitConfigError);
  }
  return finish(kExitConfigError);
}

}  // namespace choquard
