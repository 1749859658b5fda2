#include "sl2lab/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace sl2lab {

namespace {

constexpr double kGridEps = 1e-9;

Mat2 adjugate(const Mat2& m) {
  Mat2 a;
  a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return a;
}

std::vector<double> sample_times(double tau, int per_unit) {
  if (per_unit < 1) fail(ErrorCode::InvalidSpec, "samples_per_unit must be positive");
  std::vector<double> ts;
  const auto n = static_cast<long>(std::floor(tau * per_unit + kGridEps));
  for (long k = 0; k <= n; ++k) ts.push_back(std::min(tau, static_cast<double>(k) / per_unit));
  if (ts.back() < tau - kGridEps) ts.push_back(tau);
  return ts;
}

// Local value on [0, tau] from the node below plus a short transport.
double psi_local(const PeriodicCocycle& p, const SplittingFrame& f, bool unstable, double t) {
  const std::size_t k = f.index_below(t);
  const auto& psi = unstable ? f.psi_u : f.psi_s;
  if (std::abs(t - f.times[k]) < kGridEps) return psi[k];
  const Vec2 v = (unstable ? f.unstable[k] : f.stable[k]).vector();
  return psi[k] + std::log((transport(p.path, f.times[k], t, p.integ) * v).norm());
}

Direction line_local(const PeriodicCocycle& p, const SplittingFrame& f, bool unstable, double t) {
  const std::size_t k = f.index_below(t);
  const Direction d = unstable ? f.unstable[k] : f.stable[k];
  if (std::abs(t - f.times[k]) < kGridEps) return d;
  return propagate_direction(p.path, d, f.times[k], t, p.integ);
}

// Splits t into n * tau + r with r in [0, tau).
std::pair<double, double> wrap(double t, double tau) {
  const double n = std::floor(t / tau);
  return {n, std::clamp(t - n * tau, 0.0, tau)};
}

}  // namespace

std::size_t SplittingFrame::index_below(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t + kGridEps);
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

UnimodularMatrix monodromy(const PeriodicCocycle& p) {
  return fundamental_solution(p.path, 0, p.period(), p.integ);
}

UnimodularMatrix monodromy_at(const PeriodicCocycle& p, double q) {
  const double tau = p.period();
  q = std::fmod(q, tau);
  if (q < 0) q += tau;
  const Mat2 head = transport(p.path, 0, q, p.integ);
  const Mat2 tail = transport(p.path, q, tau, p.integ);
  return UnimodularMatrix::trusted(head * tail);
}

SplittingFrame hyperbolic_splitting(const PeriodicCocycle& p, int checkpoints,
                                    double tol_consistency) {
  SplittingFrame f;
  const double tau = p.period();
  f.times = sample_times(tau, p.samples_per_unit);
  const std::size_t n = f.times.size() - 1;
  f.steps.reserve(n);
  Mat2 mono = Mat2::Identity();
  for (std::size_t k = 0; k < n; ++k) {
    f.steps.push_back(transport(p.path, f.times[k], f.times[k + 1], p.integ));
    mono = f.steps.back() * mono;
  }
  const auto m = UnimodularMatrix::trusted(mono);
  const auto split = eigen_splitting(m);
  f.sigma = split.sigma;
  f.trace = m.trace();
  const double log_sigma = std::log(split.sigma);

  f.unstable.resize(n + 1);
  f.stable.resize(n + 1);
  f.psi_u.assign(n + 1, 0.0);
  f.psi_s.assign(n + 1, 0.0);

  // Nu forward from 0; Ns backward from tau, where it returns to Ns(0).
  Vec2 u = split.unstable.vector();
  f.unstable[0] = split.unstable;
  for (std::size_t k = 0; k < n; ++k) {
    const Vec2 w = f.steps[k] * u;
    const double len = w.norm();
    f.psi_u[k + 1] = f.psi_u[k] + std::log(len);
    u = w / len;
    f.unstable[k + 1] = Direction::from_vector(u);
  }
  Vec2 s = split.stable.vector();
  f.stable[n] = split.stable;
  f.psi_s[n] = -log_sigma;
  for (std::size_t k = n; k-- > 0;) {
    const Vec2 w = adjugate(f.steps[k]) * s;
    const double len = w.norm();
    f.psi_s[k] = f.psi_s[k + 1] + std::log(len);
    s = w / len;
    f.stable[k] = Direction::from_vector(s);
  }
  f.closure_residual = std::max(std::abs(f.psi_u[n] - log_sigma), std::abs(f.psi_s[0]));

  f.angle.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    f.angle[k] = acute_angle(f.unstable[k], f.stable[k]);
    if (!(f.angle[k] > 0)) fail(ErrorCode::DegenerateSplitting, "invariant lines collapse");
  }

  // Compare against the eigenlines of Phi(t_k + tau, t_k) = Phi(t_k, 0) Phi(tau, t_k).
  std::vector<Mat2> prefix(n + 1, Mat2::Identity());
  for (std::size_t k = 0; k < n; ++k) prefix[k + 1] = f.steps[k] * prefix[k];
  double worst = 0;
  for (int j = 0; j < checkpoints && n > 0; ++j) {
    const std::size_t k = (static_cast<std::size_t>(j) + 1) * n / (checkpoints + 1);
    Mat2 suffix = Mat2::Identity();
    for (std::size_t i = k; i < n; ++i) suffix = f.steps[i] * suffix;
    const auto local = eigen_splitting(UnimodularMatrix::trusted(prefix[k] * suffix));
    worst = std::max({worst, acute_angle(local.unstable, f.unstable[k]),
                      acute_angle(local.stable, f.stable[k])});
  }
  f.consistency_residual = worst;
  if (!(worst <= tol_consistency)) {
    fail(ErrorCode::ConsistencyFailure, "propagated lines are not invariant");
  }
  return f;
}

Direction unstable_at(const PeriodicCocycle& p, const SplittingFrame& f, double t) {
  return line_local(p, f, true, wrap(t, f.period()).second);
}

Direction stable_at(const PeriodicCocycle& p, const SplittingFrame& f, double t) {
  return line_local(p, f, false, wrap(t, f.period()).second);
}

double psi_u_at(const PeriodicCocycle& p, const SplittingFrame& f, double t) {
  const auto [n, r] = wrap(t, f.period());
  return n * f.psi_u.back() + psi_local(p, f, true, r);
}

double psi_s_at(const PeriodicCocycle& p, const SplittingFrame& f, double t) {
  const auto [n, r] = wrap(t, f.period());
  return n * f.psi_s.back() + psi_local(p, f, false, r);
}

double domination_ratio(const PeriodicCocycle& p, const SplittingFrame& f, int m, double t) {
  const double ds = psi_s_at(p, f, t + m) - psi_s_at(p, f, t);
  const double du = psi_u_at(p, f, t + m) - psi_u_at(p, f, t);
  return std::exp(ds - du);
}

DominationReport domination_report(const PeriodicCocycle& p, const SplittingFrame& f, int m) {
  if (m < 1) fail(ErrorCode::InvalidSpec, "domination time must be positive");
  DominationReport r;
  r.m = m;
  r.times = f.times;
  r.ratio.reserve(f.times.size());
  for (double t : f.times) {
    const double v = domination_ratio(p, f, m, t);
    r.ratio.push_back(v);
    r.max_ratio = std::max(r.max_ratio, v);
    if (v >= 0.5) r.witnesses.push_back(t);
  }
  r.dominated = r.max_ratio <= 0.5;
  return r;
}

std::optional<int> min_domination_time(const PeriodicCocycle& p, const SplittingFrame& f,
                                       int m_max) {
  for (int m = 1; m <= m_max; ++m) {
    if (domination_report(p, f, m).dominated) return m;
  }
  return std::nullopt;
}

double upper_lyapunov(const PeriodicCocycle& p) {
  const auto m = monodromy(p);
  if (classify(m).kind != Spectrum::Hyperbolic) return 0;
  return std::log(eigen_splitting(m).sigma) / p.period();
}

double min_angle(const SplittingFrame& f) { return f.angle[min_angle_index(f)]; }

std::size_t min_angle_index(const SplittingFrame& f) {
  return static_cast<std::size_t>(std::min_element(f.angle.begin(), f.angle.end()) -
                                  f.angle.begin());
}

void write_profile_csv(std::ostream& os, const SplittingFrame& f, const DominationReport& r) {
  os << "t,angle,r_m\n" << std::setprecision(12);
  for (std::size_t k = 0; k < f.times.size(); ++k) {
    os << f.times[k] << ',' << f.angle[k] << ',' << r.ratio[k] << '\n';
  }
}

}  // namespace sl2lab
