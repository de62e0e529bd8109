#include "choquard/run_config.hpp"

#include <algorithm>
#include <boost/program_options.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "json.hpp"

namespace choquard {

namespace po = boost::program_options;

namespace {

const char* const kKeys[] = {
    "mode", "threads", "output.dir", "output.formats",
    "params.N", "params.s", "params.mu", "params.q", "params.p", "params.alpha", "params.c",
    "grid.M", "grid.L", "grid.kernel",
    "solver.max_iter", "solver.dt", "solver.backtrack", "solver.grad_tol", "solver.pohozaev_tol",
    "solver.ball_radius", "solver.seed", "solver.init_width", "solver.init_file", "solver.auto_box",
    "solver.box_factor", "solver.newton", "solver.newton_switch", "solver.precondition",
    "solver.max_restarts", "solver.start_scales",
    "constants.C_q", "constants.C_p", "constants.factor", "constants.M", "constants.L",
    "constants.max_iter", "constants.starts", "constants.seed", "constants.tol", "constants.a0",
    "sweep.alphas", "sweep.halvings", "sweep.alpha_fraction", "sweep.branch", "sweep.include_zero",
    "subadditivity.c1", "subadditivity.c2",
    "fiber.field",
};

std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

class Reader {
 public:
  explicit Reader(const po::variables_map& vm) : vm_(vm) {}

  std::optional<std::string> raw(const char* key) const {
    if (!vm_.count(key)) return std::nullopt;
    return vm_[key].as<std::string>();
  }

  void str(const char* key, std::string& out) const {
    if (auto v = raw(key)) out = *v;
  }

  double to_double(const char* key, const std::string& text) const {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
      throw ConfigError(std::string(key) + ": expected a finite number, got '" + text + "'");
    }
    return v;
  }

  void num(const char* key, double& out) const {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  void num(const char* key, std::optional<double>& out) const {
    if (auto v = raw(key)) out = to_double(key, *v);
  }

  template <class Int>
  void integer(const char* key, Int& out) const {
    if (auto v = raw(key)) {
      const double d = to_double(key, *v);
      if (d != std::floor(d) || std::abs(d) > 9.0e15) {
        throw ConfigError(std::string(key) + ": expected an integer, got '" + *v + "'");
      }
      if (std::is_unsigned_v<Int> && d < 0.0) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + *v + "'");
      }
      out = static_cast<Int>(d);
    }
  }

  void boolean(const char* key, bool& out) const {
    if (auto v = raw(key)) {
      if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") {
        out = true;
      } else if (*v == "false" || *v == "0" || *v == "no" || *v == "off") {
        out = false;
      } else {
        throw ConfigError(std::string(key) + ": expected true or false, got '" + *v + "'");
      }
    }
  }

  std::optional<std::vector<std::string>> list(const char* key) const {
    auto v = raw(key);
    if (!v) return std::nullopt;
    std::vector<std::string> items;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b == std::string::npos) throw ConfigError(std::string(key) + ": empty list entry");
      items.push_back(item.substr(b, e - b + 1));
    }
    return items;
  }

  void numbers(const char* key, std::vector<double>& out) const {
    if (auto items = list(key)) {
      out.clear();
      for (const auto& it : *items) out.push_back(to_double(key, it));
    }
  }

 private:
  const po::variables_map& vm_;
};

SweepBranch branch_from_string(const std::string& s) {
  if (s == "local") return SweepBranch::Local;
  if (s == "mp") return SweepBranch::MountainPass;
  if (s == "both") return SweepBranch::Both;
  throw ConfigError("sweep.branch: expected local, mp or both, got '" + s + "'");
}

std::string to_string(SweepBranch b) {
  switch (b) {
    case SweepBranch::Local: return "local";
    case SweepBranch::MountainPass: return "mp";
    case SweepBranch::Both: return "both";
  }
  return "unknown";
}

bool power_of_two(int M) { return M >= 16 && (M & (M - 1)) == 0; }

}  // namespace

std::string to_string(Mode m) {
  switch (m) {
    case Mode::EstimateConstants: return "estimate-constants";
    case Mode::FiberReport: return "fiber-report";
    case Mode::SolveLocal: return "solve-local";
    case Mode::SolveMp: return "solve-mp";
    case Mode::SolveGlobal: return "solve-global";
    case Mode::AlphaSweep: return "alpha-sweep";
    case Mode::Subadditivity: return "subadditivity";
    case Mode::Selftest: return "selftest";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& name) {
  for (Mode m : {Mode::EstimateConstants, Mode::FiberReport, Mode::SolveLocal, Mode::SolveMp, Mode::SolveGlobal,
                 Mode::AlphaSweep, Mode::Subadditivity, Mode::Selftest}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("mode: unknown mode '" + name + "'");
}

RunConfig parse_run_config(std::istream& in) {
  po::options_description desc;
  for (const char* k : kKeys) desc.add_options()(k, po::value<std::string>());
  po::variables_map vm;
  try {
    po::store(po::parse_config_file(in, desc, false), vm);
  } catch (const po::error& e) {
    throw ConfigError(e.what());
  }
  const Reader r(vm);
  RunConfig c;
  if (auto m = r.raw("mode")) c.mode = mode_from_string(*m);
  r.integer("threads", c.threads);
  r.str("output.dir", c.output_dir);
  if (auto f = r.list("output.formats")) {
    c.csv = c.json = c.field_bin = false;
    for (const auto& x : *f) {
      if (x == "csv") {
        c.csv = true;
      } else if (x == "json") {
        c.json = true;
      } else if (x == "field-bin") {
        c.field_bin = true;
      } else {
        throw ConfigError("output.formats: unknown format '" + x + "' (expected csv, json, field-bin)");
      }
    }
  }

  r.integer("params.N", c.params.N);
  r.num("params.s", c.params.s);
  r.num("params.mu", c.params.mu);
  r.num("params.q", c.params.q);
  r.num("params.p", c.params.p);
  r.num("params.alpha", c.params.alpha);
  r.num("params.c", c.params.c);

  SolveConfig& s = c.solver;
  r.integer("grid.M", s.grid.M);
  r.num("grid.L", s.grid.L);
  if (auto k = r.raw("grid.kernel")) {
    try {
      s.grid.kernel = kernel_scheme_from_string(*k);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("grid.kernel: ") + e.what());
    }
  }
  r.integer("solver.max_iter", s.max_iter);
  r.num("solver.dt", s.dt);
  r.num("solver.backtrack", s.backtrack);
  r.num("solver.grad_tol", s.grad_tol);
  if (vm.count("solver.grad_tol") && !(s.grad_tol > 0.0)) throw ConfigError("solver.grad_tol: must be > 0");
  r.num("solver.pohozaev_tol", s.pohozaev_tol_rel);
  r.num("solver.ball_radius", s.ball_radius);
  r.integer("solver.seed", s.seed);
  r.num("solver.init_width", s.init_width);
  r.str("solver.init_file", s.init_file);
  r.boolean("solver.auto_box", s.auto_box);
  r.num("solver.box_factor", s.box_factor);
  r.boolean("solver.newton", s.newton);
  r.num("solver.newton_switch", s.newton_switch);
  r.boolean("solver.precondition", s.precondition);
  r.integer("solver.max_restarts", s.max_restarts);
  r.numbers("solver.start_scales", s.start_scales);

  ConstantSettings& k = c.constants;
  r.num("constants.C_q", k.C_q);
  r.num("constants.C_p", k.C_p);
  r.num("constants.factor", k.factor);
  r.integer("constants.M", k.grid.M);
  r.num("constants.L", k.grid.L);
  k.grid.kernel = s.grid.kernel;
  r.integer("constants.max_iter", k.gn.max_iter);
  r.integer("constants.starts", k.gn.starts);
  r.integer("constants.seed", k.gn.seed);
  r.num("constants.tol", k.gn.tol);
  r.num("constants.a0", k.gn.a0);

  r.numbers("sweep.alphas", c.sweep.alphas);
  r.integer("sweep.halvings", c.sweep.halvings);
  r.num("sweep.alpha_fraction", c.sweep.alpha_fraction);
  if (auto b = r.raw("sweep.branch")) c.sweep.branch = branch_from_string(*b);
  r.boolean("sweep.include_zero", c.sweep.include_zero);

  r.num("subadditivity.c1", c.sub_c1);
  r.num("subadditivity.c2", c.sub_c2);
  r.str("fiber.field", c.fiber_field);

  s.threads = c.threads;
  k.gn.threads = c.threads;
  return c;
}

RunConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_run_config(in);
}

std::string to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  const SolveConfig& s = c.solver;
  auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr); };
  j["mode"] = to_string(c.mode);
  j["threads"] = c.threads;
  j["output.dir"] = c.output_dir;
  std::vector<std::string> formats;
  if (c.csv) formats.push_back("csv");
  if (c.json) formats.push_back("json");
  if (c.field_bin) formats.push_back("field-bin");
  j["output.formats"] = formats;
  j["params.N"] = c.params.N;
  j["params.s"] = c.params.s;
  j["params.mu"] = c.params.mu;
  j["params.q"] = c.params.q;
  j["params.p"] = c.params.p;
  j["params.alpha"] = c.params.alpha;
  j["params.c"] = c.params.c;
  j["grid.M"] = s.grid.M;
  j["grid.L"] = s.grid.L;
  j["grid.kernel"] = to_string(s.grid.kernel);
  j["solver.max_iter"] = s.max_iter;
  j["solver.dt"] = s.dt;
  j["solver.backtrack"] = s.backtrack;
  j["solver.grad_tol"] = s.grad_tol;
  j["solver.pohozaev_tol"] = s.pohozaev_tol_rel;
  j["solver.ball_radius"] = s.ball_radius;
  j["solver.seed"] = s.seed;
  j["solver.init_width"] = s.init_width;
  j["solver.init_file"] = s.init_file;
  j["solver.auto_box"] = s.auto_box;
  j["solver.box_factor"] = s.box_factor;
  j["solver.newton"] = s.newton;
  j["solver.newton_switch"] = s.newton_switch;
  j["solver.precondition"] = s.precondition;
  j["solver.max_restarts"] = s.max_restarts;
  j["solver.start_scales"] = s.start_scales;
  j["constants.C_q"] = opt(c.constants.C_q);
  j["constants.C_p"] = opt(c.constants.C_p);
  j["constants.factor"] = c.constants.factor;
  j["constants.M"] = c.constants.grid.M;
  j["constants.L"] = c.constants.grid.L;
  j["constants.max_iter"] = c.constants.gn.max_iter;
  j["constants.starts"] = c.constants.gn.starts;
  j["constants.seed"] = c.constants.gn.seed;
  j["constants.tol"] = c.constants.gn.tol;
  j["constants.a0"] = c.constants.gn.a0;
  j["sweep.alphas"] = c.sweep.alphas;
  j["sweep.halvings"] = c.sweep.halvings;
  j["sweep.alpha_fraction"] = c.sweep.alpha_fraction;
  j["sweep.branch"] = to_string(c.sweep.branch);
  j["sweep.include_zero"] = c.sweep.include_zero;
  j["subadditivity.c1"] = opt(c.sub_c1);
  j["subadditivity.c2"] = opt(c.sub_c2);
  j["fiber.field"] = c.fiber_field;
  return j.dump(2);
}

std::vector<std::string> validate(const RunConfig& c, const ResolvedConstants& k) {
  std::vector<std::string> v;
  const ProblemParams& pr = c.params;
  try {
    pr.validate();
  } catch (const DomainError& e) {
    v.push_back(std::string("params: ") + e.what());
    return v;
  }
  Regime regime;
  try {
    regime = classify_regime(pr);
  } catch (const DomainError& e) {
    v.push_back(std::string("params: ") + e.what());
    return v;
  }

  const SolveConfig& s = c.solver;
  if (c.threads < 1) v.push_back("threads must be >= 1");
  if (s.grid.M != 0 && !power_of_two(s.grid.M)) {
    v.push_back("grid.M = " + std::to_string(s.grid.M) + " must be a power of two >= 16");
  }
  if (s.grid.L < 0.0) v.push_back("grid.L must be > 0");
  if (s.max_iter < 1) v.push_back("solver.max_iter must be >= 1");
  if (!(s.dt > 0.0)) v.push_back("solver.dt must be > 0");
  if (!(s.backtrack > 0.0 && s.backtrack < 1.0)) v.push_back("solver.backtrack must lie in (0,1)");
  if (!(s.pohozaev_tol_rel > 0.0)) v.push_back("solver.pohozaev_tol must be > 0");
  if (!(s.newton_switch > 0.0)) v.push_back("solver.newton_switch must be > 0");
  if (s.max_restarts < 0) v.push_back("solver.max_restarts must be >= 0");
  if (s.start_scales.empty()) v.push_back("solver.start_scales must not be empty");
  for (double x : s.start_scales) {
    if (!(x > 0.0)) v.push_back("solver.start_scales entries must be > 0");
  }
  if (s.box_factor < 0.0) v.push_back("solver.box_factor must be >= 0");
  if (s.init_width < 0.0) v.push_back("solver.init_width must be >= 0");
  if (!(c.constants.factor > 0.0)) v.push_back("constants.factor must be > 0");
  if (c.constants.grid.M != 0 && !power_of_two(c.constants.grid.M)) {
    v.push_back("constants.M = " + std::to_string(c.constants.grid.M) + " must be a power of two >= 16");
  }
  if (!(c.constants.gn.tol > 0.0)) v.push_back("constants.tol must be > 0");
  if (c.constants.gn.starts < 1) v.push_back("constants.starts must be >= 1");

  const std::string rname = to_string(regime);
  auto thresholds_case1 = [&](bool allow_zero, const std::string& what) {
    if (!allow_zero && !(pr.alpha > 0.0)) v.push_back("alpha must be > 0 for the " + what);
    if (!k.C_q || !k.C_p) {
      v.push_back("the " + what + " needs C_q and C_p");
      return;
    }
    const double a1 = alpha1(pr, *k.C_q, *k.C_p);
    const double a2 = alpha2(pr, *k.C_q, *k.C_p);
    const double amin = std::min(a1, a2);
    if (!(pr.alpha < amin)) {
      v.push_back("alpha = " + show(pr.alpha) + " must be below min(alpha1, alpha2) = " + show(amin) +
                  " (alpha1 = " + show(a1) + ", alpha2 = " + show(a2) + ")");
    }
  };
  auto mass_condition = [&]() {
    if (!k.C_q) {
      v.push_back("CaseII needs C_q");
      return;
    }
    const double lhs = l2_critical_mass_lhs(pr, *k.C_q);
    if (!(lhs < 0.5)) {
      v.push_back("mass condition fails: (alpha/2q) C_q c^{2q(1-gamma_q)} = " + show(lhs) + " >= 1/2");
    }
  };
  auto below_cbar = [&](double mass, const std::string& name) {
    if (!k.C_p) {
      v.push_back("CaseIV needs C_p");
      return;
    }
    const CbarResult cb = cbar(pr, *k.C_p);
    if (!(mass < cb.value)) {
      v.push_back(name + " = " + show(mass) + " must be below cbar = " + show(cb.value));
    }
  };

  switch (c.mode) {
    case Mode::SolveLocal:
      if (regime != Regime::CaseI) {
        v.push_back("solve-local needs CaseI, got " + rname);
      } else {
        thresholds_case1(false, "local branch");
      }
      break;
    case Mode::SolveMp:
      if (regime == Regime::CaseI) {
        thresholds_case1(true, "mountain pass branch");
      } else if (regime == Regime::CaseII) {
        mass_condition();
      } else if (regime == Regime::CaseIII) {
        if (!(pr.alpha > 0.0)) v.push_back("alpha must be > 0 in CaseIII");
      } else {
        v.push_back("solve-mp needs CaseI, CaseII or CaseIII, got CaseIV");
      }
      break;
    case Mode::SolveGlobal:
      if (regime != Regime::CaseIV) {
        v.push_back("solve-global needs CaseIV, got " + rname);
      } else {
        below_cbar(pr.c, "c");
      }
      break;
    case Mode::Subadditivity: {
      if (regime != Regime::CaseIV) {
        v.push_back("subadditivity needs CaseIV, got " + rname);
        break;
      }
      below_cbar(pr.c, "c");
      const double c1 = c.sub_c1.value_or(pr.c / std::sqrt(2.0));
      const double c2 = c.sub_c2.value_or(pr.c / std::sqrt(2.0));
      if (!(c1 > 0.0)) v.push_back("subadditivity.c1 = " + show(c1) + " must be > 0");
      if (!(c2 > 0.0)) v.push_back("subadditivity.c2 = " + show(c2) + " must be > 0");
      if (std::abs(c1 * c1 + c2 * c2 - pr.c * pr.c) > 1e-12 * pr.c * pr.c) {
        v.push_back("c1^2 + c2^2 = " + show(c1 * c1 + c2 * c2) + " must equal c^2 = " + show(pr.c * pr.c));
      }
      break;
    }
    case Mode::AlphaSweep: {
      const bool local = c.sweep.branch != SweepBranch::MountainPass;
      if (local && regime != Regime::CaseI) v.push_back("the local sweep needs CaseI, got " + rname);
      if (!local && regime == Regime::CaseIV) v.push_back("the mountain pass sweep needs CaseI, CaseII or CaseIII");
      for (std::size_t i = 0; i < c.sweep.alphas.size(); ++i) {
        if (!(c.sweep.alphas[i] > 0.0)) v.push_back("sweep.alphas entries must be > 0");
        if (i > 0 && !(c.sweep.alphas[i] < c.sweep.alphas[i - 1])) {
          v.push_back("sweep.alphas must be strictly descending");
        }
      }
      if (regime != Regime::CaseI && c.sweep.alphas.empty()) v.push_back("sweep.alphas is required outside CaseI");
      if (c.sweep.halvings < 0) v.push_back("sweep.halvings must be >= 0");
      if (!(c.sweep.alpha_fraction > 0.0 && c.sweep.alpha_fraction < 1.0)) {
        v.push_back("sweep.alpha_fraction must lie in (0,1)");
      }
      if (regime == Regime::CaseI && (!k.C_q || !k.C_p)) v.push_back("the CaseI sweep needs C_q and C_p");
      if (regime == Regime::CaseI && k.C_q && k.C_p && !c.sweep.alphas.empty()) {
        const double amin = std::min(alpha1(pr, *k.C_q, *k.C_p), alpha2(pr, *k.C_q, *k.C_p));
        if (!(c.sweep.alphas.front() < amin)) {
          v.push_back("sweep alpha = " + show(c.sweep.alphas.front()) + " must be below min(alpha1, alpha2) = " +
                      show(amin));
        }
      }
      break;
    }
    case Mode::EstimateConstants:
    case Mode::FiberReport:
    case Mode::Selftest:
      break;
  }
  return v;
}

}  // namespace choquard
