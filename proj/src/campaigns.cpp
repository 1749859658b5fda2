#include "sl2lab/campaigns.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <numbers>
#include <thread>

#include "sl2lab/flow3d.hpp"
#include "sl2lab/perturbation.hpp"

namespace sl2lab {

long SuiteResult::failures() const {
  long n = 0;
  for (const auto& p : properties) n += p.failed;
  return n;
}

std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t i) {
  // splitmix64 finalizer
  std::uint64_t z = seed * 0x9E3779B97F4A7C15ULL + i + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

UnimodularMatrix random_hyperbolic(Rng& rng, double min_gap, double max_trace, double min_angle) {
  const double gap = std::exp(rng.uniform(std::log(min_gap), std::log(max_trace - 2)));
  const double t = 2 + gap;
  const double sigma = (t + std::sqrt(gap * (t + 2))) / 2;
  const double sign = rng.uniform() < 0.5 ? -1 : 1;
  const double phi = rng.uniform(0, std::numbers::pi);
  const double beta = rng.uniform(min_angle, std::numbers::pi - min_angle);
  Mat2 v;
  v << std::cos(phi), std::cos(phi + beta), std::sin(phi), std::sin(phi + beta);
  Mat2 d = Mat2::Zero();
  d(0, 0) = sign * sigma;
  d(1, 1) = sign / sigma;
  return UnimodularMatrix::trusted(v * d * v.inverse());
}

TracelessMatrix random_unit_traceless(Rng& rng) {
  TracelessMatrix q{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
  const double n = op_norm(q.matrix());
  if (!(n > 1e-6)) return {1, 0, 0};
  return q * (1 / n);
}

namespace {

// Per-sample observations, merged in sample order.
using Observation = std::vector<double>;

struct PropertySpec {
  std::string name;
  double tol;
  bool lower_is_better = true;  // value <= tol passes; otherwise value >= tol
};

std::vector<Observation> parallel_samples(long n, unsigned threads,
                                          const std::function<Observation(long)>& f) {
  std::vector<Observation> out(static_cast<std::size_t>(n));
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(1L, n)));
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w; i < n; i += threads) out[static_cast<std::size_t>(i)] = f(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SuiteResult summarize(const std::string& name, const std::vector<PropertySpec>& props,
                      const std::vector<Observation>& obs) {
  SuiteResult r;
  r.suite = name;
  r.samples = static_cast<long>(obs.size());
  for (std::size_t k = 0; k < props.size(); ++k) {
    PropertyStat st{props[k].name, 0, 0, props[k].lower_is_better ? 0.0 : INFINITY,
                    props[k].tol};
    for (const auto& o : obs) {
      if (k >= o.size() || std::isnan(o[k])) continue;
      ++st.checked;
      const double v = o[k];
      const bool ok = props[k].lower_is_better ? v <= props[k].tol : v >= props[k].tol;
      if (!ok) ++st.failed;
      st.max_value = props[k].lower_is_better ? std::max(st.max_value, v) : std::min(st.max_value, v);
    }
    r.properties.push_back(st);
  }
  return r;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

SuiteResult rot_lemma(const CampaignOptions& o) {
  const long n = o.samples > 0 ? o.samples : 100000;
  auto obs = parallel_samples(n, o.threads, [&](long i) -> Observation {
    Rng rng(sample_seed(o.seed, static_cast<std::uint64_t>(i)));
    const auto a = random_hyperbolic(rng);
    try {
      const auto chk = ellipticize_check(a);
      const double tr = std::abs(chk.product.trace());
      return {chk.cls.kind == Spectrum::Elliptic ? 0.0 : 1.0, tr};
    } catch (const Error&) {
      return {1.0, INFINITY};
    }
  });
  return summarize("rot-lemma", {{"elliptic_after_rotation", 0}, {"abs_trace_after", 2}}, obs);
}

SuiteResult det_conservation(const CampaignOptions& o) {
  const auto corpus = bundled_corpus();
  const long pairs = o.samples > 0 ? o.samples : 16;
  auto obs = parallel_samples(static_cast<long>(corpus.size()), o.threads, [&](long i) {
    const auto p = generate(corpus[static_cast<std::size_t>(i)].spec, o.integ);
    Rng rng(sample_seed(o.seed, static_cast<std::uint64_t>(i)));
    const double tau = p.period();
    double det = std::abs(fundamental_solution(p.path, 0, tau, p.integ).det() - 1);
    double coc = 0;
    for (long k = 0; k < pairs; ++k) {
      double s = rng.uniform(0, tau), t = rng.uniform(0, tau);
      if (s > t) std::swap(s, t);
      const double r = rng.uniform(s, t);
      const Mat2 ts = fundamental_solution(p.path, s, t, p.integ).matrix();
      const Mat2 tr = fundamental_solution(p.path, r, t, p.integ).matrix();
      const Mat2 rs = fundamental_solution(p.path, s, r, p.integ).matrix();
      det = std::max({det, std::abs(ts.determinant() - 1), std::abs(tr.determinant() - 1),
                      std::abs(rs.determinant() - 1)});
      coc = std::max(coc, op_norm((ts - tr * rs).eval()) / (op_norm(tr) * op_norm(rs)));
    }
    return Observation{det, coc};
  });
  return summarize("det-conservation",
                   {{"det_minus_one", o.integ.tol_det}, {"cocycle_identity", o.integ.tol_coc}}, obs);
}

double random_direction(Rng& rng) { return rng.uniform(0, std::numbers::pi); }

SuiteResult max_lemma(const CampaignOptions& o) {
  const long n = o.samples > 0 ? o.samples : 10000;
  auto obs = parallel_samples(n, o.threads, [&](long i) -> Observation {
    Rng rng(sample_seed(o.seed, static_cast<std::uint64_t>(i)));
    const double theta = rng.uniform(0.05, std::numbers::pi / 2);
    auto frame = [&] {
      const double phi = random_direction(rng);
      return FrameT<double>{Direction(phi), Direction(phi + rng.uniform(theta, std::numbers::pi - theta))};
    };
    const auto src = frame(), dst = frame();
    Mat2 m;
    m << rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5);
    const double op = op_norm(m);
    const double mx = max_norm_in_frame(m, src, dst);
    const double s = std::sin(theta);
    const double slack = 1 + 1e-12;
    // Ratios against the stated bounds, at most one when they hold.
    return {op / (4 / s * mx * slack), mx / (op / s * slack)};
  });
  return summarize("max-lemma", {{"op_over_4_max_div_sin", 1}, {"max_over_op_div_sin", 1}}, obs);
}

SuiteResult factor_insertion(const CampaignOptions& o) {
  const long n = o.samples > 0 ? o.samples : 1000;
  auto obs = parallel_samples(n, o.threads, [&](long i) -> Observation {
    Rng rng(sample_seed(o.seed, static_cast<std::uint64_t>(i)));
    ScenarioSpec spec;
    spec.generator = Generator::TrigRandom;
    spec.tau = 3;
    spec.c_bound = rng.uniform(0.05, 2);
    spec.seed = rng.next();
    const auto p = generate(spec, o.integ);
    const auto budget = PerturbationBudget::make(0.1, std::numbers::pi / 2, p.path.bound(), 1);
    const double r = rng.uniform(0, 1) * budget.delta;
    const auto q = random_unit_traceless(rng) * std::log1p(r);
    const auto s = exp_traceless(q);
    const bool left = i % 2 == 1;
    try {
      const auto res = left ? insert_factor_left(p, 1, s, budget) : insert_factor_right(p, 1, s, budget);
      const double bound = 2 * std::exp(2 * budget.C) * op_norm(q.matrix());
      return {res.cert.find("factor_equation")->value, res.cert.sup_norm / bound, p.path.bound()};
    } catch (const Error&) {
      return {INFINITY, INFINITY, p.path.bound()};
    }
  });
  return summarize("factor-insertion",
                   {{"factor_equation", 1e-7}, {"sup_over_bound", 1}, {"coefficient_bound", 2}}, obs);
}

SuiteResult rho_suite(const CampaignOptions& o) {
  const int nt = 40, na = 60;
  std::vector<double> thetas, alphas;
  for (int i = 0; i < nt; ++i) thetas.push_back(0.02 + (std::numbers::pi / 2 - 0.02) * i / (nt - 1));
  for (int k = 0; k < na; ++k) alphas.push_back(1e-4 * std::pow(3e4, static_cast<double>(k) / (na - 1)));
  auto obs = parallel_samples(nt, o.threads, [&](long i) {
    const double th = thetas[static_cast<std::size_t>(i)];
    double round = 0, mono_alpha = 0, mono_theta = 0;
    double prev = -1;
    for (double a : alphas) {
      const double r = rho(th, a);
      round = std::max(round, std::abs(rho_inverse(th, r, 1e-13, 400) - a) / std::max(1.0, a));
      if (r <= prev) mono_alpha += 1;
      prev = r;
      if (i + 1 < nt && rho(thetas[static_cast<std::size_t>(i + 1)], a) >= r) mono_theta += 1;
    }
    return Observation{round, mono_alpha, mono_theta};
  });
  return summarize("rho", {{"round_trip", 1e-9}, {"alpha_violations", 0}, {"theta_violations", 0}}, obs);
}

// Diagonal cocycle with rate r(t) = base + sum amp cos(2 pi k t / tau + phase).
struct RateProfile {
  double base;
  std::vector<TrigTerm> terms;

  double at(double t) const {
    double r = base;
    for (const auto& x : terms) r += x.value(t);
    return r;
  }
};

RateProfile random_rate(Rng& rng, double tau) {
  RateProfile rp;
  rp.base = rng.uniform(0.3, 1.0);
  const int n = 1 + static_cast<int>(rng.next() % 3);
  for (int k = 0; k < n; ++k) {
    TrigTerm t;
    t.entry = Entry::A;
    t.amp = rng.uniform(-1, 1) * rp.base / (2 * n);
    t.freq = 2 * std::numbers::pi * (1 + static_cast<int>(rng.next() % 5)) / tau;
    t.phase = rng.uniform(0, 2 * std::numbers::pi);
    rp.terms.push_back(t);
  }
  return rp;
}

// Cumulative integral of the rate by composite Simpson on a fine grid.
double rate_integral(const RateProfile& rp, double t, int per_unit = 2000) {
  if (t == 0) return 0;
  const int n = 2 * std::max(1, static_cast<int>(std::ceil(std::abs(t) * per_unit / 2)));
  const double h = t / n;
  double s = rp.at(0) + rp.at(t);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * rp.at(k * h);
  return s * h / 3;
}

SuiteResult theta_root_suite(const CampaignOptions& o) {
  const long n = o.samples > 0 ? o.samples : 100;
  auto obs = parallel_samples(n, o.threads, [&](long i) -> Observation {
    Rng rng(sample_seed(o.seed, static_cast<std::uint64_t>(i)));
    const double tau = std::round(rng.uniform(10, 30));
    const int m = 1 + static_cast<int>(rng.next() % 4);
    const double p0 = rng.uniform(0, tau);
    // Constant rate: the root is (tau - m) / 2.
    const double lam = rng.uniform(0.1, 1);
    PeriodicCocycle c;
    c.path = CoefficientPath::constant(tau, {lam, 0, 0});
    c.integ = o.integ;
    double err_const = INFINITY, err_profile = INFINITY;
    try {
      const auto f = hyperbolic_splitting(c);
      err_const = std::abs(theta_root(c, f, p0, m) - (tau - m) / 2);
    } catch (const Error&) {
    }
    const auto rp = random_rate(rng, tau);
    PeriodicCocycle v;
    v.path = CoefficientPath(tau, {Segment{0, tau, {rp.base, 0, 0}}}, rp.terms);
    v.integ = o.integ;
    const double total = rate_integral(rp, tau);
    auto psi = [&](double t) {
      const double w = std::floor(t / tau);
      return w * total + rate_integral(rp, t - w * tau);
    };
    auto balance = [&](double s) { return psi(p0) + psi(p0 + m) - 2 * psi(p0 - s) - total; };
    double lo = 0, hi = tau - m;
    for (int k = 0; k < 200 && hi - lo > 1e-12; ++k) {
      const double mid = (lo + hi) / 2;
      (balance(mid) < 0 ? lo : hi) = mid;
    }
    try {
      const auto f = hyperbolic_splitting(v);
      err_profile = std::abs(theta_root(v, f, p0, m) - (lo + hi) / 2);
    } catch (const Error&) {
    }
    return {err_const, err_profile};
  });
  return summarize("theta-root", {{"constant_rate_root", 1e-8}, {"profile_root_vs_quadrature", 1e-6}},
                   obs);
}

SuiteResult flow3d_suite(const CampaignOptions& o) {
  struct Case {
    std::shared_ptr<VectorField3> field;
    Vec3 x0;
    double duration;
    bool extract;
  };
  const double s3 = std::sqrt(1.0 / 3), s23 = std::sqrt(2.0 / 3);
  std::vector<Case> cases{
      {std::make_shared<SuspensionCatMap>(0, 0), Vec3(0, 0, 0), 1, true},
      {std::make_shared<SuspensionCatMap>(0.3, 0.4), Vec3(0, 0, 0), SuspensionCatMap(0.3, 0.4).orbit_period(), true},
      {std::make_shared<SuspensionCatMap>(0.2, -0.5), Vec3(0, 0, 0), SuspensionCatMap(0.2, -0.5).orbit_period(), true},
      {std::make_shared<AbcFlow>(1, s23, s3), Vec3(0.3, 0.2, 0.1), 5, false},
      {std::make_shared<AbcFlow>(1, 1, 1), Vec3(1.0, 0.5, 2.0), 5, false},
  };
  const double golden = (3 + std::sqrt(5.0)) / 2;
  auto obs = parallel_samples(static_cast<long>(cases.size()), o.threads, [&](long i) {
    const auto& c = cases[static_cast<std::size_t>(i)];
    double volume = 0, det3 = 0, det2 = 0, eig = kNaN, div = max_divergence(*c.field, 8, 1);
    for (double t : {0.5, 1.0, 2.5, std::min(10.0, 4 * c.duration)}) {
      const auto pm = linear_poincare(*c.field, c.x0, t);
      volume = std::max(volume, pm.volume_residual);
      det3 = std::max(det3, std::abs(tangent_flow(*c.field, c.x0, t).determinant() - 1));
    }
    const auto orbit = integrate_orbit(*c.field, c.x0, c.duration, 1e-3);
    const auto frame = trivialize(*c.field, orbit);
    for (std::size_t k = 0; k < orbit.points.size(); k += 50) {
      det2 = std::max(det2, std::abs(trivialized_poincare(*c.field, orbit, frame, 0, k).determinant() - 1));
    }
    if (c.extract) {
      const auto ex = extract_cocycle(*c.field, c.x0, c.duration);
      const auto mono = monodromy(ex.cocycle);
      const auto split = eigen_splitting(mono);
      eig = std::abs(std::abs(split.sigma) - golden);
    }
    return Observation{div, volume, det3, det2, eig};
  });
  return summarize("flow3d",
                   {{"divergence", 1e-12},
                    {"volume_relation", 1e-6},
                    {"tangent_det", 1e-7},
                    {"trivialized_det", 1e-6},
                    {"extracted_eigenvalue", 1e-6}},
                   obs);
}

const std::map<std::string, std::function<SuiteResult(const CampaignOptions&)>>& registry() {
  static const std::map<std::string, std::function<SuiteResult(const CampaignOptions&)>> r{
      {"rot-lemma", rot_lemma},
      {"det-conservation", det_conservation},
      {"max-lemma", max_lemma},
      {"factor-insertion", factor_insertion},
      {"rho", rho_suite},
      {"theta-root", theta_root_suite},
      {"flow3d", flow3d_suite},
  };
  return r;
}

}  // namespace

std::vector<std::string> suite_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

std::optional<SuiteResult> run_suite(const std::string& name, const CampaignOptions& opts) {
  const auto it = registry().find(name);
  if (it == registry().end()) return std::nullopt;
  const auto t0 = std::chrono::steady_clock::now();
  auto r = it->second(opts);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace sl2lab
