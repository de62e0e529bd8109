#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <functional>

#include "json.hpp"

#include "choquard/functionals.hpp"

namespace choquard {

namespace {

// f(t) = c0 - sum_i c_i exp(k_i t) with c_i >= 0; concave, so at most two roots.
struct ExpSum {
  double c0 = 0.0;
  std::vector<std::pair<double, double>> terms;  // (c_i, k_i)

  void add(double c, double k) {
    if (c > 0.0) terms.emplace_back(c, k);
  }
  double value(double t) const {
    double v = c0;
    for (const auto& [c, k] : terms) v -= c * std::exp(k * t);
    return v;
  }
  double slope(double t) const {
    double v = 0.0;
    for (const auto& [c, k] : terms) v -= c * k * std::exp(k * t);
    return v;
  }
  // Sign of the limit as t -> -inf (dir = -1) or +inf (dir = +1).
  double limit(int dir) const {
    double v = c0;
    for (const auto& [c, k] : terms) {
      if (k * dir > 0.0) return -std::numeric_limits<double>::infinity();
      if (k == 0.0) v -= c;
    }
    return v;
  }
};

double bisect_root(const std::function<double(double)>& f, double lo, double hi) {
  auto tol = boost::math::tools::eps_tolerance<double>(std::numeric_limits<double>::digits);
  const auto r = boost::math::tools::bisect(f, lo, hi, tol);
  return 0.5 * (r.first + r.second);
}

struct ConcaveRoots {
  std::vector<double> roots;
  bool window_exhausted = false;
  double argmax = 0.0;
  double max_value = 0.0;
};

ConcaveRoots concave_roots(const ExpSum& f, double lo, double hi) {
  ConcaveRoots out;
  auto slope = [&](double t) { return f.slope(t); };
  double tm;
  if (slope(lo) <= 0.0) {
    tm = lo;
  } else if (slope(hi) >= 0.0) {
    tm = hi;
  } else {
    tm = bisect_root(slope, lo, hi);
  }
  out.argmax = tm;
  out.max_value = f.value(tm);
  if (out.max_value < 0.0) return out;
  if (out.max_value == 0.0) {
    out.roots.push_back(tm);
    return out;
  }
  auto val = [&](double t) { return f.value(t); };
  if (tm > lo) {
    if (val(lo) < 0.0) {
      out.roots.push_back(bisect_root(val, lo, tm));
    } else if (f.limit(-1) < 0.0) {
      out.window_exhausted = true;
    }
  } else if (f.limit(-1) < 0.0) {
    out.window_exhausted = true;
  }
  if (tm < hi) {
    if (val(hi) < 0.0) {
      out.roots.push_back(bisect_root(val, tm, hi));
    } else if (f.limit(+1) < 0.0) {
      out.window_exhausted = true;
    }
  } else if (f.limit(+1) < 0.0) {
    out.window_exhausted = true;
  }
  return out;
}

}  // namespace

FiberReport fiber_analyze(const MomentTriple& m, const ProblemParams& pr, const FiberOptions& opts) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  const double s = pr.s;
  const double kq = 2.0 * (pr.q * gq - 1.0) * s;
  const double kp = 2.0 * (pr.p * gp - 1.0) * s;
  const double T = opts.window > 0.0 ? opts.window : 60.0 / s;

  // E'(t) / (s e^{2st})
  ExpSum d1;
  d1.c0 = m.a;
  d1.add(pr.alpha * gq * m.b, kq);
  d1.add(gp * m.d, kp);
  // E(t) / e^{2st}
  ExpSum e0;
  e0.c0 = 0.5 * m.a;
  e0.add(pr.alpha / (2.0 * pr.q) * m.b, kq);
  e0.add(m.d / (2.0 * pr.p), kp);

  FiberReport rep;
  const ConcaveRoots cr = concave_roots(d1, -T, T);
  rep.roots = cr.roots;
  for (double t : rep.roots) {
    const double tq = pr.alpha * pr.q * gq * gq * m.b * std::exp(kq * t);
    const double tp = pr.p * gp * gp * m.d * std::exp(kp * t);
    const double bracket = m.a - tq - tp;
    const double scale = std::max({m.a, tq, tp});
    if (std::abs(bracket) <= 1e-10 * scale) {
      rep.classes.push_back(FiberClass::Pzero);
    } else {
      rep.classes.push_back(bracket > 0.0 ? FiberClass::Pplus : FiberClass::Pminus);
    }
    rep.values.push_back(fiber_value(m, t, pr));
  }
  const ConcaveRoots cz = concave_roots(e0, -T, T);
  rep.zeros = cz.roots;
  rep.window_exhausted = cr.window_exhausted || cz.window_exhausted;

  const Regime regime = classify_regime(pr);
  auto expect = [&](std::size_t count, std::vector<FiberClass> classes, const std::string& why) {
    if (rep.roots.size() != count || rep.classes != classes) {
      rep.structure_violation = true;
      rep.note = why + ": found " + std::to_string(rep.roots.size()) + " critical points";
    }
  };
  if (m.d > 0.0 && regime != Regime::CaseIV) {
    if (pr.alpha == 0.0) {
      expect(1, {FiberClass::Pminus}, "alpha = 0 expects a unique maximum");
    } else if (regime == Regime::CaseIII) {
      expect(1, {FiberClass::Pminus}, "CaseIII expects a unique maximum");
    } else if (regime == Regime::CaseII && opts.C_q && l2_critical_mass_condition(pr, *opts.C_q)) {
      expect(1, {FiberClass::Pminus}, "CaseII under the mass condition expects a unique maximum");
    } else if (regime == Regime::CaseI && opts.C_q && opts.C_p) {
      const double amin = std::min(alpha1(pr, *opts.C_q, *opts.C_p), alpha2(pr, *opts.C_q, *opts.C_p));
      if (pr.alpha < amin) {
        expect(2, {FiberClass::Pplus, FiberClass::Pminus}, "CaseI below the thresholds expects two critical points");
        if (!rep.structure_violation) {
          const bool interleaved = rep.zeros.size() == 2 && rep.roots[0] < rep.zeros[0] &&
                                   rep.zeros[0] < rep.roots[1] && rep.roots[1] < rep.zeros[1];
          if (!interleaved) {
            rep.structure_violation = true;
            rep.note = "CaseI below the thresholds expects two zeros interleaved with the critical points";
          }
        }
      }
    }
  }
  return rep;
}

double g_function(double t, const ProblemParams& pr, double C_q, double C_p) {
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  return 0.5 * t * t -
         pr.alpha / (2.0 * pr.q) * C_q * std::pow(t, 2.0 * pr.q * gq) * std::pow(pr.c, 2.0 * pr.q * (1.0 - gq)) -
         C_p / (2.0 * pr.p) * std::pow(t, 2.0 * pr.p * gp) * std::pow(pr.c, 2.0 * pr.p * (1.0 - gp));
}

GFunctionReport g_analyze(const ProblemParams& pr, double C_q, double C_p) {
  if (classify_regime(pr) != Regime::CaseI) throw DomainError("g analysis applies to CaseI only");
  if (!(pr.alpha > 0.0)) throw DomainError("g analysis needs alpha > 0");
  if (!(C_q > 0.0 && C_p > 0.0)) throw DomainError("g analysis needs positive constants");
  const double gq = gamma(pr.q, pr);
  const double gp = gamma(pr.p, pr);
  const double A1 = pr.alpha / (2.0 * pr.q) * C_q * std::pow(pr.c, 2.0 * pr.q * (1.0 - gq));
  const double A2 = C_p / (2.0 * pr.p) * std::pow(pr.c, 2.0 * pr.p * (1.0 - gp));
  const double k1 = 2.0 * pr.q * gq - 2.0;
  const double k2 = 2.0 * pr.p * gp - 2.0;
  const double W = 700.0 / std::max(std::abs(k1), std::abs(k2));

  // g(t)/t^2 and g'(t)/t as functions of log t.
  ExpSum h;
  h.c0 = 0.5;
  h.add(A1, k1);
  h.add(A2, k2);
  ExpSum hp;
  hp.c0 = 1.0;
  hp.add(2.0 * pr.q * gq * A1, k1);
  hp.add(2.0 * pr.p * gp * A2, k2);

  GFunctionReport rep;
  const ConcaveRoots ext = concave_roots(hp, -W, W);
  if (ext.roots.size() == 2) {
    rep.tmin = std::exp(ext.roots[0]);
    rep.tmax = std::exp(ext.roots[1]);
    rep.gmin = g_function(rep.tmin, pr, C_q, C_p);
    rep.gmax = g_function(rep.tmax, pr, C_q, C_p);
  }
  const ConcaveRoots z = concave_roots(h, -W, W);
  if (z.roots.size() == 2 && z.max_value > 0.0) {
    rep.t0 = std::exp(z.roots[0]);
    rep.t1 = std::exp(z.roots[1]);
  } else {
    rep.no_positive_region = true;
    rep.t0 = rep.t1 = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

RadialDiagnostic radial_monotonicity_check(const Field& u) {
  const Grid& g = u.grid;
  const double h = g.spacing();
  std::map<long, std::pair<double, long>> bins;
  RadialDiagnostic out;
  out.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = u.values[i];
    out.min_value = std::min(out.min_value, v);
    out.max_abs = std::max(out.max_abs, std::abs(v));
    const double r = g.radius(i);
    if (r >= g.half_length()) continue;
    auto& bin = bins[std::lround(r / h)];
    bin.first += std::abs(v);
    bin.second += 1;
  }
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& [key, bin] : bins) {
    const double avg = bin.first / static_cast<double>(bin.second);
    out.max_violation = std::max(out.max_violation, avg - prev);
    prev = avg;
  }
  return out;
}

std::string to_json(const FiberReport& r) {
  nlohmann::ordered_json j;
  j["roots"] = r.roots;
  std::vector<std::string> cls;
  for (auto c : r.classes) cls.push_back(to_string(c));
  j["classes"] = cls;
  j["zeros"] = r.zeros;
  j["values"] = r.values;
  j["structure_violation"] = r.structure_violation;
  j["window_exhausted"] = r.window_exhausted;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2);
}

std::string to_json(const GFunctionReport& r) {
  nlohmann::ordered_json j;
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr); };
  j["t0"] = num(r.t0);
  j["t1"] = num(r.t1);
  j["tmax"] = num(r.tmax);
  j["tmin"] = num(r.tmin);
  j["gmax"] = num(r.gmax);
  j["gmin"] = num(r.gmin);
  j["no_positive_region"] = r.no_positive_region;
  return j.dump(2);
}

}  // namespace choquard
