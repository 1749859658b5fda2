#include "sl2lab/scenario.hpp"

#include <cmath>
#include <numbers>

#include "sl2lab/flow3d.hpp"

namespace sl2lab {

const char* to_string(Generator g) {
  switch (g) {
    case Generator::ConstantHyperbolic: return "ConstantHyperbolic";
    case Generator::RotatedConjugation: return "RotatedConjugation";
    case Generator::TrigRandom: return "TrigRandom";
    case Generator::NearParabolic: return "NearParabolic";
    case Generator::SuspensionExtract: return "SuspensionExtract";
  }
  return "?";
}

std::optional<Generator> generator_from_string(const std::string& s) {
  for (auto g : {Generator::ConstantHyperbolic, Generator::RotatedConjugation, Generator::TrigRandom,
                 Generator::NearParabolic, Generator::SuspensionExtract}) {
    if (s == to_string(g)) return g;
  }
  return std::nullopt;
}

TracelessMatrix skewed_hyperbolic(double lambda, double beta) {
  Mat2 v;
  v << 1, std::cos(beta), 0, std::sin(beta);
  Mat2 d = Mat2::Zero();
  d(0, 0) = lambda;
  d(1, 1) = -lambda;
  return TracelessMatrix::project((v * d * v.inverse()).eval());
}

namespace {

PeriodicCocycle wrap(CoefficientPath path, const IntegratorOptions& integ) {
  PeriodicCocycle p;
  p.path = std::move(path);
  p.integ = integ;
  return p;
}

// a = lambda cos 2wt, b = lambda sin 2wt - w, c = lambda sin 2wt + w,
// whose fundamental solution is R_{wt} exp(diag(lambda, -lambda) t).
CoefficientPath rotated_conjugation(double lambda, double omega, double tau) {
  const double half_pi = std::numbers::pi / 2;
  std::vector<TrigTerm> trig{
      {Entry::A, lambda, 2 * omega, 0},
      {Entry::B, lambda, 2 * omega, -half_pi},
      {Entry::C, lambda, 2 * omega, -half_pi},
  };
  return CoefficientPath(tau, {Segment{0, tau, {0, -omega, omega}}}, std::move(trig));
}

CoefficientPath trig_random(std::uint64_t seed, double tau, double c_bound, int terms) {
  Rng rng(seed);
  const int n = std::max(terms, 0);
  // Frobenius norm dominates the operator norm. Half of the bound goes to the
  // constant part, the rest is shared by the terms.
  const double share = c_bound / 4;
  TracelessMatrix base{rng.uniform(-share, share), rng.uniform(-share, share),
                       rng.uniform(-share, share)};
  std::vector<TrigTerm> trig;
  const double amp_cap = n > 0 ? c_bound / (2 * std::sqrt(2.0) * n) : 0;
  for (int i = 0; i < n; ++i) {
    TrigTerm t;
    const auto which = rng.next() % 3;
    t.entry = which == 0 ? Entry::A : (which == 1 ? Entry::B : Entry::C);
    t.amp = rng.uniform(-amp_cap, amp_cap);
    const auto harmonic = 1 + static_cast<int>(rng.next() % 4);
    t.freq = 2 * std::numbers::pi * harmonic / tau;
    t.phase = rng.uniform(0, 2 * std::numbers::pi);
    trig.push_back(t);
  }
  return CoefficientPath(tau, {Segment{0, tau, base}}, std::move(trig));
}

// Calibrates lambda by bisection on the integrated monodromy trace.
CoefficientPath near_parabolic(double target, double beta, double tau,
                               const IntegratorOptions& integ) {
  auto trace_for = [&](double lambda) {
    return transport(CoefficientPath::constant(tau, skewed_hyperbolic(lambda, beta)), 0, tau, integ)
        .trace();
  };
  double lo = 0, hi = 1.0 / tau;
  while (trace_for(hi) < target) {
    lo = hi;
    hi *= 2;
    if (hi > 1e3) fail(ErrorCode::InvalidSpec, "trace target out of reach");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = (lo + hi) / 2;
    (trace_for(mid) < target ? lo : hi) = mid;
  }
  return CoefficientPath::constant(tau, skewed_hyperbolic((lo + hi) / 2, beta));
}

}  // namespace

PeriodicCocycle generate(const ScenarioSpec& s, const IntegratorOptions& integ) {
  if (s.generator != Generator::SuspensionExtract && !(s.tau > 0)) {
    fail(ErrorCode::InvalidSpec, "tau must be positive");
  }
  switch (s.generator) {
    case Generator::ConstantHyperbolic:
      return wrap(CoefficientPath::constant(s.tau, {s.lambda, 0, 0}), integ);
    case Generator::RotatedConjugation:
      return wrap(rotated_conjugation(s.lambda, s.omega, s.tau), integ);
    case Generator::TrigRandom:
      if (!(s.c_bound > 0)) fail(ErrorCode::InvalidSpec, "c_bound must be positive");
      return wrap(trig_random(s.seed, s.tau, s.c_bound, s.terms), integ);
    case Generator::NearParabolic:
      if (!(s.trace_target > 2)) fail(ErrorCode::InvalidSpec, "trace target must exceed 2");
      if (!(s.beta > 0 && s.beta < std::numbers::pi)) fail(ErrorCode::InvalidSpec, "beta out of range");
      return wrap(near_parabolic(s.trace_target, s.beta, s.tau, integ), integ);
    case Generator::SuspensionExtract: {
      const SuspensionCatMap field(s.mod_a, s.mod_b);
      auto ex = extract_cocycle(field, Vec3(0, 0, 0), field.orbit_period());
      return ex.cocycle;
    }
  }
  fail(ErrorCode::InvalidSpec, "unknown generator");
}

std::vector<CorpusEntry> bundled_corpus() {
  std::vector<CorpusEntry> c;
  auto add = [&](std::string name, ScenarioSpec s) { c.push_back({std::move(name), s}); };
  ScenarioSpec s;

  s = {};
  s.generator = Generator::ConstantHyperbolic;
  s.lambda = 0.05;
  s.tau = 400;
  s.hint = "DominationBreak";
  add("weak-constant", s);

  s.lambda = 1;
  s.tau = 50;
  s.hint = "Dominated";
  add("strong-constant", s);

  s = {};
  s.generator = Generator::RotatedConjugation;
  s.lambda = 0;
  s.omega = 0.7;
  s.tau = 10;
  s.hint = "AlreadyElliptic";
  add("pure-rotation", s);

  s.lambda = 0.2;
  s.omega = 0.3;
  s.tau = 30;
  s.hint = "";
  add("rotated-conjugation", s);

  s = {};
  s.generator = Generator::NearParabolic;
  s.trace_target = 2.0001;
  s.beta = 0.01;
  s.tau = 20;
  s.hint = "SmallAngle";
  add("near-parabolic", s);

  for (std::uint64_t seed : {1, 2, 3, 7}) {
    s = {};
    s.generator = Generator::TrigRandom;
    s.seed = seed;
    s.tau = 20;
    s.c_bound = 0.8;
    add("trig-random-" + std::to_string(seed), s);
  }

  s = {};
  s.generator = Generator::SuspensionExtract;
  s.hint = "Dominated";
  add("suspension", s);
  s.mod_a = 0.3;
  s.mod_b = 0.4;
  add("suspension-modulated", s);
  return c;
}

}  // namespace sl2lab
