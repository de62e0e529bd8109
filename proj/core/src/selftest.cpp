#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "choquard/run.hpp"
#include "json.hpp"

namespace choquard {

namespace {

struct Check {
  const char* module;
  const char* name;
  std::function<std::string()> body;  // empty string on success
};

std::string expect_close(double got, double want, double tol) {
  if (std::abs(got - want) <= tol * std::max(1.0, std::abs(want))) return {};
  std::ostringstream os;
  os.precision(17);
  os << "got " << got << ", expected " << want;
  return os.str();
}

std::string expect(bool ok, const std::string& what) { return ok ? std::string() : what; }

ProblemParams params(int N, double s, double mu, double q, double p, double alpha = 0.0, double c = 1.0) {
  ProblemParams pr;
  pr.N = N;
  pr.s = s;
  pr.mu = mu;
  pr.q = q;
  pr.p = p;
  pr.alpha = alpha;
  pr.c = c;
  return pr;
}

const ProblemParams kCaseI = params(1, 0.4, 0.5, 2.0, 3.0, 0.1);

Field wave(const Grid& g, int k0) {
  return sample(g, [&](const std::array<double, 3>& x) { return std::cos(k0 * std::numbers::pi * x[0] / g.half_length()); });
}

Field gaussian(const Grid& g, double w, double shift = 0.0) {
  return sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int a = 0; a < g.dim(); ++a) r2 += (x[a] - shift) * (x[a] - shift);
    return std::exp(-r2 / (2.0 * w * w));
  });
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

template <class F>
bool throws_domain(F&& f) {
  try {
    f();
  } catch (const DomainError&) {
    return true;
  }
  return false;
}

bool has_violation(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

std::vector<Check> checks() {
  const double pi = std::numbers::pi;
  std::vector<Check> c;

  c.push_back({"params", "gamma_vanishing_numerator", [] {
                 return expect_close(gamma(2.0, params(3, 0.5, 1.0, 2.0, 3.0)), 0.5, 1e-15);
               }});
  c.push_back({"params", "gamma_at_lower_hls_bound", [] {
                 const ProblemParams pr = params(2, 0.6, 0.7, 2.0, 3.0);
                 return expect_close(gamma((4.0 - 0.7) / 2.0, pr), 0.0, 1e-15);
               }});
  c.push_back({"params", "classify_cases", [] {
                 const bool ok = classify_regime(params(3, 0.75, 1.0, 2.0, 3.0)) == Regime::CaseI &&
                                 classify_regime(params(3, 0.75, 1.0, 13.0 / 6.0, 3.0)) == Regime::CaseII &&
                                 classify_regime(params(3, 0.75, 1.0, 1.8, 2.1)) == Regime::CaseIV;
                 return expect(ok, "regime classification mismatch");
               }});
  c.push_back({"params", "alpha1_halves_with_double_C_q", [] {
                 return expect_close(alpha1(kCaseI, 2.0, 1.0), 0.5 * alpha1(kCaseI, 1.0, 1.0), 1e-14);
               }});
  c.push_back({"params", "alpha1_decreases_in_c", [] {
                 double prev = INFINITY;
                 for (double cc : {1.0, 2.0, 4.0, 8.0}) {
                   ProblemParams pr = kCaseI;
                   pr.c = cc;
                   const double a = alpha1(pr, 1.0, 1.0);
                   if (!(a < prev)) return std::string("alpha1 not decreasing in c");
                   prev = a;
                 }
                 return std::string();
               }});
  c.push_back({"params", "mass_condition_limits", [] {
                 ProblemParams pr = params(2, 0.5, 0.5, 2.25, 3.0, 0.0);
                 const bool zero = l2_critical_mass_condition(pr, 1.0);
                 pr.alpha = 1e6;
                 const bool huge = l2_critical_mass_condition(pr, 1.0);
                 pr.alpha = 0.5 / l2_critical_mass_lhs(params(2, 0.5, 0.5, 2.25, 3.0, 1.0), 1.0);
                 const bool boundary = l2_critical_mass_condition(pr, 1.0);
                 return expect(zero && !huge && !boundary, "mass condition limits wrong");
               }});
  c.push_back({"params", "cbar_unit_base", [] {
                 const ProblemParams pr = params(1, 0.4, 0.5, 2.0, 2.2);
                 return expect_close(cbar(pr, pr.p).value, 1.0, 1e-15);
               }});
  c.push_back({"params", "cbar_square_root", [] {
                 return expect_close(cbar(params(1, 0.4, 0.8, 1.5, 2.0), 1.0).value, std::sqrt(2.0), 1e-14);
               }});

  c.push_back({"spectral", "laplacian_eigenfunction", [pi] {
                 const Grid g(1, 64, pi);
                 const SpectralOps ops(g, 0.4, 0.5);
                 Field want = wave(g, 3);
                 for (double& v : want.values) v *= std::pow(3.0, 0.8);
                 return expect(max_diff(ops.fractional_laplacian(wave(g, 3)), want) < 1e-12, "cos is not an eigenfunction");
               }});
  c.push_back({"spectral", "laplacian_of_constant", [] {
                 const Grid g(1, 64, 5.0);
                 const SpectralOps ops(g, 0.4, 0.5);
                 const Field one = sample(g, [](const std::array<double, 3>&) { return 1.0; });
                 return expect(max_diff(ops.fractional_laplacian(one), Field(g)) < 1e-13, "constant not annihilated");
               }});
  c.push_back({"spectral", "riesz_multiplier_action", [pi] {
                 const Grid g(1, 64, pi);
                 const SpectralOps ops(g, 0.4, 0.5);
                 Field want = wave(g, 3);
                 for (double& v : want.values) v *= ops.riesz_multiplier_table()[3];
                 return expect(max_diff(ops.riesz_convolve(wave(g, 3)), want) < 1e-12, "multiplier action mismatch");
               }});
  c.push_back({"spectral", "choquard_integral_nonnegative_and_zero", [] {
                 const Grid g(1, 64, 8.0);
                 const SpectralOps ops(g, 0.4, 0.5);
                 const Field u = sample(g, [](const std::array<double, 3>& x) { return std::sin(3.0 * x[0]) + 0.2; });
                 return expect(ops.choquard_integral(u, 2.5) >= 0.0 && ops.choquard_integral(Field(g), 2.5) == 0.0,
                               "Choquard integral sign");
               }});
  c.push_back({"spectral", "cosine_l2_norm", [pi] {
                 const Grid g(1, 64, pi);
                 return expect_close(std::pow(l2_norm(wave(g, 2)), 2.0), pi, 1e-13);
               }});
  c.push_back({"spectral", "seminorm_of_constant", [] {
                 const Grid g(2, 16, 3.0);
                 const SpectralOps ops(g, 0.3, 1.0);
                 const Field one = sample(g, [](const std::array<double, 3>&) { return 2.0; });
                 return expect_close(ops.hs_seminorm_sq(one), 0.0, 1e-13);
               }});
  c.push_back({"spectral", "normalize_halves_and_is_idempotent", [] {
                 const Grid g(1, 64, 6.0);
                 Field u = normalize_mass(gaussian(g, 1.0), 2.0);
                 const Field h = normalize_mass(u, 1.0);
                 for (double& v : u.values) v *= 0.5;
                 return expect(max_diff(h, u) < 1e-15 && max_diff(normalize_mass(h, 1.0), h) < 1e-15,
                               "normalization mismatch");
               }});

  c.push_back({"functionals", "energy_ignores_b_at_alpha_zero", [] {
                 ProblemParams pr = kCaseI;
                 pr.alpha = 0.0;
                 return expect(energy(MomentTriple{1.0, 5.0, 2.0}, pr) == energy(MomentTriple{1.0, 9.0, 2.0}, pr),
                               "energy depends on b");
               }});
  c.push_back({"functionals", "pohozaev_cancellation", [] {
                 ProblemParams pr = kCaseI;
                 pr.alpha = 0.0;
                 const double d = 3.0;
                 return expect_close(pohozaev(MomentTriple{gamma(pr.p, pr) * d, 1.0, d}, pr), 0.0, 1e-15);
               }});
  c.push_back({"functionals", "pohozaev_rearrangement", [] {
                 const MomentTriple m{1.3, 0.7, 2.1};
                 const ProblemParams& pr = kCaseI;
                 const double lhs = pohozaev(m, pr) / pr.s + pr.alpha * gamma(pr.q, pr) * m.b + gamma(pr.p, pr) * m.d;
                 return expect_close(lhs, m.a, 1e-12);
               }});
  c.push_back({"functionals", "gradient_is_odd", [] {
                 const Grid g(1, 128, 10.0);
                 const SpectralOps ops(g, kCaseI.s, kCaseI.mu);
                 const Field u = gaussian(g, 1.0, 0.7);
                 Field neg = u;
                 for (double& v : neg.values) v = -v;
                 Field gn = gradient(ops, neg, kCaseI);
                 for (double& v : gn.values) v = -v;
                 return expect(max_diff(gradient(ops, u, kCaseI), gn) < 1e-13, "gradient not odd");
               }});
  c.push_back({"functionals", "pohozaev_equals_fiber_slope", [] {
                 const Grid g(1, 128, 10.0);
                 const SpectralOps ops(g, kCaseI.s, kCaseI.mu);
                 const MomentTriple m = moments(ops, gaussian(g, 1.3), kCaseI);
                 return expect_close(pohozaev(m, kCaseI), fiber_d1(m, 0.0, kCaseI), 1e-14);
               }});
  c.push_back({"functionals", "radial_check", [] {
                 const Grid g(2, 64, 8.0);
                 const bool centered = radial_monotonicity_check(gaussian(g, 1.5)).max_violation <= 1e-12;
                 const bool shifted = radial_monotonicity_check(gaussian(g, 1.0, 3.0)).max_violation > 0.0;
                 return expect(centered && shifted, "radial diagnostic mismatch");
               }});

  c.push_back({"gn_constants", "quotient_scale_invariance", [] {
                 const Grid g(1, 128, 10.0);
                 const SpectralOps ops(g, kCaseI.s, kCaseI.mu);
                 Field u = gaussian(g, 1.1);
                 const double q0 = weinstein_quotient(ops, u, 2.5, kCaseI);
                 for (double& v : u.values) v *= 3.7;
                 return expect_close(weinstein_quotient(ops, u, 2.5, kCaseI), q0, 1e-12);
               }});
  c.push_back({"gn_constants", "quotient_dilation_invariance", [] {
                 const ProblemParams& pr = kCaseI;
                 const double t = 2.5, tau = 0.8;
                 const double g = gamma(t, pr);
                 const double q0 = weinstein_quotient(1.4, 0.6, 1.0, t, pr);
                 const double q1 = weinstein_quotient(std::exp(2.0 * pr.s * tau) * 1.4,
                                                      std::exp(2.0 * t * g * pr.s * tau) * 0.6, 1.0, t, pr);
                 return expect_close(q1, q0, 1e-12);
               }});

  c.push_back({"solvers", "subadditivity_rejects_zero_mass", [] {
                 const ProblemParams pr = params(1, 0.4, 0.5, 2.0, 2.2, 1.0, 0.5);
                 return expect(throws_domain([&] { subadditivity_check(pr, 0.0, 0.5, SolveConfig{}); }),
                               "c1 = 0 accepted");
               }});
  c.push_back({"solvers", "default_grid", [] {
                 const GridSettings g = default_grid(1);
                 return expect(g.M == 1024 && g.L == 40.0, "default N=1 grid");
               }});

  c.push_back({"cli", "local_branch_needs_positive_alpha", [] {
                 RunConfig rc;
                 rc.mode = Mode::SolveLocal;
                 rc.params = kCaseI;
                 rc.params.alpha = 0.0;
                 return expect(has_violation(validate(rc, {1.0, 1.0}), "alpha must be > 0 for the local branch"),
                               "missing violation");
               }});
  c.push_back({"cli", "global_branch_strict_cbar", [] {
                 RunConfig rc;
                 rc.mode = Mode::SolveGlobal;
                 rc.params = params(1, 0.4, 0.5, 2.0, 2.2, 1.0);
                 rc.params.c = cbar(rc.params, 1.0).value;
                 return expect(has_violation(validate(rc, {1.0, 1.0}), "below cbar"), "c = cbar accepted");
               }});
  c.push_back({"cli", "case3_has_no_alpha_bound", [] {
                 RunConfig rc;
                 rc.mode = Mode::SolveMp;
                 rc.params = params(1, 0.4, 0.5, 2.6, 3.5, 1e3);
                 return expect(validate(rc, {1.0, 1.0}).empty(), "CaseIII rejected");
               }});
  c.push_back({"cli", "unknown_key_rejected", [] {
                 std::istringstream in("params.N = 1\nparams.bogus = 3\n");
                 try {
                   parse_run_config(in);
                 } catch (const ConfigError&) {
                   return std::string();
                 }
                 return std::string("unknown key accepted");
               }});
  return c;
}

}  // namespace

std::vector<SelftestCase> run_selftest() {
  std::vector<SelftestCase> out;
  for (const Check& ch : checks()) {
    SelftestCase t{ch.module, ch.name, false, {}};
    try {
      t.detail = ch.body();
      t.passed = t.detail.empty();
    } catch (const std::exception& e) {
      t.detail = std::string("threw: ") + e.what();
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::string to_json(const std::vector<SelftestCase>& cases) {
  nlohmann::ordered_json j;
  int passed = 0;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& t : cases) {
    passed += t.passed ? 1 : 0;
    arr.push_back({{"module", t.module}, {"name", t.name}, {"passed", t.passed}, {"detail", t.detail}});
  }
  j["passed"] = passed;
  j["failed"] = static_cast<int>(cases.size()) - passed;
  j["cases"] = arr;
  return j.dump(2);
}

}  // namespace choquard
