// Desk-scale acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "sl2lab/campaigns.hpp"
#include "sl2lab/dichotomy.hpp"
#include "sl2lab/flow3d.hpp"

using namespace sl2lab;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[4096];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const PropertyStat* prop(const SuiteResult& r, const std::string& name) {
  for (const auto& p : r.properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string describe(const SuiteResult& r) {
  std::string s = fmt("%ld samples in %.2f s", r.samples, r.seconds);
  for (const auto& p : r.properties) {
    s += fmt("; %s max %.3g (tol %.3g, %ld failed)", p.name.c_str(), p.max_value, p.tol, p.failed);
  }
  return s;
}

SuiteResult suite(const std::string& name) {
  CampaignOptions o;
  o.seed = 20240601;
  return *run_suite(name, o);
}

PeriodicCocycle corpus(const std::string& name) {
  for (const auto& e : bundled_corpus()) {
    if (e.name == name) return generate(e.spec);
  }
  throw std::runtime_error("missing corpus entry " + name);
}

void criterion_rot() {
  const auto r = suite("rot-lemma");
  const bool ok = r.pass() && r.samples >= 100000 && r.seconds < 10;
  report(1, "rotation makes hyperbolic matrices elliptic", ok, describe(r));
}

void criterion_insertion() {
  const auto r = suite("factor-insertion");
  const bool ok = r.pass() && r.samples >= 1000 && r.seconds < 60;
  report(2, "factor insertion matches the oracle", ok, describe(r));
}

void criterion_det() {
  const auto r = suite("det-conservation");
  report(3, "determinant conservation on the corpus", r.pass(), describe(r));
}

void criterion_max() {
  const auto r = suite("max-lemma");
  report(4, "frame norm inequalities", r.pass() && r.samples >= 10000, describe(r));
}

void criterion_theta_root() {
  const auto r = suite("theta-root");
  const auto* c = prop(r, "constant_rate_root");
  const auto* q = prop(r, "profile_root_vs_quadrature");
  const bool ok = r.pass() && c && q && q->checked >= 100;
  report(5, "balance root against closed form and quadrature", ok, describe(r));
}

void criterion_tame() {
  int applicable = 0, good = 0;
  double worst = 0;
  std::string failed;
  for (const auto& e : bundled_corpus()) {
    const auto p = generate(e.spec);
    const auto mono = monodromy(p);
    const int m = 4;
    if (classify(mono).kind != Spectrum::Hyperbolic || !(p.period() > m + 2)) continue;
    const auto frame = hyperbolic_splitting(p);
    // the norm bound is stated for orbits that are not m-dominated
    if (domination_report(p, frame, m).dominated) continue;
    const double theta = std::min(1.5, 0.99 * min_angle(frame));
    const auto budget = PerturbationBudget::for_path(p.path, 12, theta, m).scaled(1.0 / 3);
    ++applicable;
    try {
      const auto res = tame_norm(p, frame, budget);
      const double norm = op_norm(transport(res.cocycle.path.rebased(res.q), 0, p.period()));
      worst = std::max(worst, norm / budget.K);
      if (norm < budget.K && res.cert.pass() && reverify(res.cert).pass()) {
        ++good;
        continue;
      }
      failed += " " + e.name;
    } catch (const Error& err) {
      failed += " " + e.name + "(" + err.what() + ")";
    }
  }
  report(6, "tamed monodromy stays below K", applicable > 0 && good == applicable,
         fmt("%d/%d scenarios, max norm/K %.3g%s", good, applicable, worst,
             failed.empty() ? "" : ("; failed:" + failed).c_str()));
}

struct Engineered {
  std::string name;
  PeriodicCocycle p;
};

// Rates a(t) = l (1 + 1.2 cos(2 pi k t / tau + phase)) dip below zero, so no
// orbit is m-dominated for the m used below. The total stretch l tau stays at
// or below 20 so the stable direction survives in double precision.
CoefficientPath breathing(double l, double tau, int k, double phase, const TracelessMatrix& shape,
                          double wobble) {
  const double w = 2 * pi * k / tau;
  std::vector<TrigTerm> trig;
  if (shape.a != 0) trig.push_back({Entry::A, 1.2 * l * shape.a, w, phase});
  if (shape.b != 0) trig.push_back({Entry::B, 1.2 * l * shape.b, w, phase});
  if (shape.c != 0) trig.push_back({Entry::C, 1.2 * l * shape.c, w, phase});
  if (wobble != 0) {
    trig.push_back({Entry::B, wobble * l, 2 * w, 0.5});
    trig.push_back({Entry::C, wobble * l, w, 0});
  }
  return CoefficientPath(tau, {Segment{0, tau, shape * l}}, trig);
}

std::vector<Engineered> engineered_scenarios() {
  std::vector<Engineered> out;
  const TracelessMatrix diag{1, 0, 0};
  const TracelessMatrix skew = skewed_hyperbolic(1, 1.2);
  for (double l : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const double tau = std::min(400.0, std::floor(20 / l));
    const double tau2 = std::max(40.0, std::floor(0.6 * tau));
    auto add = [&](const char* kind, double t, CoefficientPath path) {
      PeriodicCocycle p;
      p.path = std::move(path);
      out.push_back({fmt("%s l=%.2f tau=%.0f", kind, l, t), p});
    };
    add("breathing", tau, breathing(l, tau, 1, 0, diag, 0));
    add("double-breathing", tau2, breathing(l, tau2, 2, 0.7, diag, 0));
    // skew and wobble raise the coefficient bound; at l = 0.5 that pushes T past tau = 40
    if (l < 0.45) {
      add("skewed-breathing", tau, breathing(l, tau, 1, 0, skew, 0));
      add("wobbly-breathing", tau2, breathing(l, tau2, 1, 1.3, diag, 0.3));
    }
    // constant rate with sigma below the taming threshold: the hyperbolic factors do the work
    if (l <= 0.2) add("flat", 40, CoefficientPath::constant(40, diag * l));
  }
  return out;
}

void criterion_long_orbit() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto scenarios = engineered_scenarios();
  // smallest epsilon on this ladder for which the pipeline certifies
  const double ladder[] = {3, 6, 12, 24, 48, 96};
  int good = 0, hyperbolic_stage = 0;
  double worst_trace = 0, worst_identity = 0, worst_sup = 0, worst_eps = 0;
  std::string failed;
  for (const auto& sc : scenarios) {
    const auto frame = hyperbolic_splitting(sc.p);
    const double theta = std::min(1.5, 0.99 * min_angle(frame));
    std::string last;
    bool done = false;
    for (int attempt = 0; attempt < 12 && !done; ++attempt) {
      const double epsilon = ladder[attempt % 6];
      const int m = attempt < 6 ? 4 : 8;
      try {
        const auto budget = PerturbationBudget::for_path(sc.p.path, epsilon, theta, m);
        const auto res = ellipticize_long_orbit(sc.p, budget);
        const double trace = std::abs(transport(res.cocycle.path, 0, sc.p.period()).trace());
        const auto* id = res.cert.find("identity");
        const double identity = id ? id->value : 0;
        const double sup = measure_sup_norm(sc.p.path.rebased(res.q), res.cocycle.path);
        if (trace < 2 && identity <= 1e-5 && sup <= epsilon && reverify(res.cert).pass()) {
          worst_trace = std::max(worst_trace, trace);
          worst_identity = std::max(worst_identity, identity);
          worst_sup = std::max(worst_sup, sup / epsilon);
          worst_eps = std::max(worst_eps, epsilon);
          if (id) ++hyperbolic_stage;
          done = true;
        }
        last = fmt("trace %.4f identity %.2g sup %.3g", trace, identity, sup);
      } catch (const Error& err) {
        last = err.what();
      }
    }
    if (done) {
      ++good;
    } else {
      failed += "; " + sc.name + " (" + last + ")";
    }
  }
  const double secs = seconds_since(t0);
  const int n = static_cast<int>(scenarios.size());
  report(7, "long-orbit ellipticization end to end", n >= 20 && good == n && secs < 300,
         fmt("%d/%d scenarios in %.1f s (%d through the hyperbolic factors), largest epsilon used %g, "
             "max |tr| %.4f, max identity residual %.2g, max sup/eps %.3g%s",
             good, n, secs, hyperbolic_stage, worst_eps, worst_trace, worst_identity, worst_sup,
             failed.empty() ? "" : ("; failed" + failed).c_str()));
}

void criterion_dichotomy() {
  struct Case {
    const char* scenario;
    double epsilon;
    int m_max;
    DichotomyCase expected;
  };
  const Case cases[] = {{"pure-rotation", 0.1, 16, DichotomyCase::AlreadyElliptic},
                        {"near-parabolic", 0.5, 16, DichotomyCase::SmallAngle},
                        {"weak-constant", 4, 5, DichotomyCase::DominationBreak},
                        {"strong-constant", 0.1, 16, DichotomyCase::Dominated}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto v = analyze(corpus(c.scenario), c.epsilon, c.m_max);
    bool verified = true;
    if (v.cert) verified = v.cert->pass() && reverify(*v.cert).pass() && v.sup_norm <= c.epsilon;
    const bool hit = v.kind == c.expected && verified;
    ok = ok && hit;
    detail += fmt("%s%s -> %s%s", detail.empty() ? "" : "; ", c.scenario, to_string(v.kind),
                  v.cert ? (verified ? " (certificate re-verified)" : " (certificate FAILED)") : "");
  }
  report(8, "four archetypes give four verdicts", ok, detail);
}

void criterion_flow3d() {
  const auto r = suite("flow3d");
  report(9, "3D conservativeness and extraction", r.pass(), describe(r));
}

void criterion_rho() {
  const auto r = suite("rho");
  report(10, "rho calculus round trip and monotonicity", r.pass(), describe(r));
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<void (*)()> criteria = {
      criterion_rot,   criterion_insertion, criterion_det,       criterion_max,
      criterion_theta_root, criterion_tame, criterion_long_orbit, criterion_dichotomy,
      criterion_flow3d, criterion_rho};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "criterion aborted", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed (%.1f s)\n", failures, criteria.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
