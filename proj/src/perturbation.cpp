#include "sl2lab/perturbation.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <memory>
#include <numbers>

namespace sl2lab {

namespace {

constexpr double kEps = 1e-12;
constexpr double kScan = 1.0 / 16;

Mat2 inv(const Mat2& m) {
  Mat2 a;
  a << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return a / m.determinant();
}

std::shared_ptr<const CoefficientPath> share(const CoefficientPath& p) {
  return std::make_shared<const CoefficientPath>(p);
}

PeriodicCocycle with_path(const PeriodicCocycle& p, CoefficientPath path) {
  PeriodicCocycle out = p;
  out.path = std::move(path);
  return out;
}

// Phi(w', b) along the cycle, w' = w or w + tau.
Mat2 forward_from(const CoefficientPath& path, double b, double w, const IntegratorOptions& o) {
  if (w >= b - kEps) return transport(path, b, w, o);
  return transport(path, 0, w, o) * transport(path, b, path.duration(), o);
}

// Phi(b + tau, x') along the cycle, x' = x or x + tau.
Mat2 remaining_to(const CoefficientPath& path, double b, double x, const IntegratorOptions& o) {
  if (x <= b + kEps) return transport(path, x, b, o);
  return transport(path, 0, b, o) * transport(path, x, path.duration(), o);
}

Mat2 based_monodromy(const CoefficientPath& path, double b, const IntegratorOptions& o) {
  return transport(path, 0, b, o) * transport(path, b, path.duration(), o);
}

double proof_bound(const PerturbationBudget& budget, double q_norm) {
  return 2 * std::exp(2 * budget.C) * q_norm;
}

}  // namespace

double factor_bound(double C, double epsilon) {
  if (!(epsilon > 0)) return 0;
  return std::min(0.5, 1 - std::exp(-epsilon * std::exp(-2 * C) / 2));
}

PerturbationBudget PerturbationBudget::make(double epsilon, double theta, double C, int m) {
  if (!(theta > 0 && theta <= std::numbers::pi / 2 + kEps)) {
    fail(ErrorCode::InvalidSpec, "theta must lie in (0, pi/2]");
  }
  if (m < 1) fail(ErrorCode::InvalidSpec, "m must be positive");
  PerturbationBudget b;
  b.epsilon = epsilon;
  b.theta = std::min(theta, std::numbers::pi / 2);
  b.C = C;
  b.m = m;
  b.delta = factor_bound(C, epsilon);
  b.j = C + 1;
  const double sin_t = std::sin(b.theta);
  b.K = 4 * std::exp(b.j * m) / (sin_t * sin_t);
  if (b.delta > 0) {
    b.alpha = rho_inverse(b.theta, b.delta);
    const double count = std::floor(std::log(b.K) / b.alpha) + 2;
    b.T = count > INT_MAX / 2 ? INT_MAX / 2 : static_cast<int>(count);
  } else {
    b.alpha = 0;
    b.T = INT_MAX / 2;
  }
  return b;
}

PerturbationBudget PerturbationBudget::for_path(const CoefficientPath& path, double epsilon,
                                                double theta, int m) {
  return make(epsilon, theta, path.bound(), m);
}

PerturbationBudget PerturbationBudget::scaled(double fraction) const {
  return make(epsilon * fraction, theta, C, m);
}

double rho(double theta, double alpha, double tol_ang) {
  if (!(std::sin(theta) > tol_ang)) fail(ErrorCode::DegenerateSplitting, "theta too small");
  Mat2 v;
  v << 1, std::cos(theta), 0, std::sin(theta);
  Mat2 d = Mat2::Zero();
  d(0, 0) = alpha;
  d(1, 1) = -alpha;
  const auto q = TracelessMatrix::project((v * d * inv(v)).eval());
  return op_norm((exp_traceless(q).matrix() - Mat2::Identity()).eval());
}

double rho_inverse(double theta, double delta, double tol, int max_iter) {
  if (!(delta > 0)) return 0;
  double lo = 0, hi = 1;
  while (rho(theta, hi) < delta && hi < 1e3) {
    lo = hi;
    hi *= 2;
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = (lo + hi) / 2;
    const double r = rho(theta, mid);
    if (std::abs(r - delta) <= tol) return mid;
    (r < delta ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

namespace {

PerturbationResult insert_factor(const PeriodicCocycle& p, double s0, const UnimodularMatrix& s,
                                 const PerturbationBudget& budget,
                                 const PerturbationTolerances& tol, ModifierKind kind,
                                 const char* lemma) {
  const double dist = op_norm((s.matrix() - Mat2::Identity()).eval());
  if (dist > budget.delta) fail(ErrorCode::FactorTooLarge, "||S - I|| exceeds delta");
  if (s0 < -kEps || s0 + 1 > p.period() + kEps) {
    fail(ErrorCode::OutOfDomain, "window does not fit in the period");
  }
  if (!p.path.window_free(s0)) fail(ErrorCode::WindowOverlap, "window already in use");
  const TracelessMatrix q = log_unimodular(s);

  Certificate cert;
  cert.lemma = lemma;
  cert.before = share(p.path);
  if (q == TracelessMatrix{}) {
    cert.after = cert.before;
    cert.add("factor_equation", 0, tol.factor);
    cert.sup_bound = 0;
    return {p, cert};
  }
  const CoefficientPath after = p.path.with_modifier({s0, kind, q, 1}, p.integ);
  cert.after = share(after);
  cert.windows = new_windows(p.path, after);
  cert.add("factor_equation", factor_residual(p.path, after, {s0, kind, q, 1}, p.integ),
           tol.factor);
  cert.sup_norm = measure_sup_norm(p.path, after);
  cert.sup_bound = proof_bound(budget, op_norm(q.matrix()));
  cert.add("sup_norm", cert.sup_norm, cert.sup_bound);
  return {with_path(p, after), cert};
}

}  // namespace

PerturbationResult insert_factor_right(const PeriodicCocycle& p, double s0,
                                       const UnimodularMatrix& s,
                                       const PerturbationBudget& budget,
                                       const PerturbationTolerances& tol) {
  return insert_factor(p, s0, s, budget, tol, ModifierKind::RightFactor, "insert_factor_right");
}

PerturbationResult insert_factor_left(const PeriodicCocycle& p, double s0,
                                      const UnimodularMatrix& s,
                                      const PerturbationBudget& budget,
                                      const PerturbationTolerances& tol) {
  return insert_factor(p, s0, s, budget, tol, ModifierKind::LeftFactor, "insert_factor_left");
}

PerturbationResult compose_rotation(const PeriodicCocycle& p, double xi, bool at_end,
                                    const PerturbationBudget& budget, double base,
                                    const PerturbationTolerances& tol) {
  const double tau = p.period();
  base = std::fmod(base, tau);
  if (base < 0) base += tau;
  CoefficientPath path = p.path;
  const auto& o = p.integ;
  double max_q = 0;
  int used = 0;

  double remaining = xi;
  double offset = 0;  // distance travelled along the cycle from the base point
  while (std::abs(remaining) > kEps * std::max(1.0, std::abs(xi))) {
    if (!(budget.delta > 0)) fail(ErrorCode::FactorTooLarge, "empty perturbation budget");
    if (offset + 1 > tau + kEps) fail(ErrorCode::NotEnoughWindows, "rotation chain ran out of windows");
    double start;
    if (!at_end) {
      start = base + offset;
      if (start >= tau - kEps) start -= tau;
    } else {
      double e = base - offset;
      if (e <= kEps) e += tau;
      start = e - 1;
    }
    if (start < -kEps || start + 1 > tau + kEps || !path.window_free(start)) {
      offset += kScan;
      continue;
    }
    start = std::clamp(start, 0.0, tau - 1);
    const Mat2 e = at_end ? remaining_to(path, base, start + 1, o) : forward_from(path, base, start, o);
    const double kappa = std::pow(op_norm(e), 2);
    const double step = std::copysign(std::min(std::abs(remaining), budget.delta / kappa), remaining);
    if (std::abs(step) < 1e-9 * std::abs(xi)) {
      offset += 1;
      continue;
    }
    const Mat2 r = rotation(step).matrix();
    const Mat2 s = at_end ? Mat2(inv(e) * r * e) : Mat2(e * r * inv(e));
    const auto su = UnimodularMatrix::trusted(s / std::sqrt(s.determinant()));
    if (op_norm((su.matrix() - Mat2::Identity()).eval()) > budget.delta * (1 + 1e-9)) {
      fail(ErrorCode::FactorTooLarge, "conjugated rotation exceeds delta");
    }
    const TracelessMatrix q = log_unimodular(su);
    const auto kind = at_end ? ModifierKind::LeftFactor : ModifierKind::RightFactor;
    path = path.with_modifier({start, kind, q, 1}, o);
    max_q = std::max(max_q, op_norm(q.matrix()));
    remaining -= step;
    offset += 1;
    ++used;
  }

  Certificate cert;
  cert.lemma = "compose_rotation";
  cert.before = share(p.path);
  cert.after = share(path);
  cert.windows = new_windows(p.path, path);
  const Mat2 m0 = based_monodromy(p.path, base, o);
  const Mat2 m1 = based_monodromy(path, base, o);
  const Mat2 r = rotation(xi).matrix();
  const Mat2 target = at_end ? Mat2(r * m0) : Mat2(m0 * r);
  cert.add("monodromy_relation", op_norm((m1 - target).eval()) / op_norm(m0),
           tol.factor * std::max(1, used));
  cert.sup_norm = used > 0 ? measure_sup_norm(p.path, path) : 0;
  cert.sup_bound = proof_bound(budget, max_q);
  cert.add("sup_norm", cert.sup_norm, cert.sup_bound);
  return {with_path(p, path), cert};
}

PerturbationResult small_angle_ellipticize(const PeriodicCocycle& p,
                                           const PerturbationBudget& budget,
                                           const PerturbationTolerances& tol) {
  const auto frame = hyperbolic_splitting(p);
  const std::size_t k = min_angle_index(frame);
  if (!(frame.angle[k] < budget.theta)) {
    fail(ErrorCode::AngleNotSmall, "invariant lines are not close enough");
  }
  const double q = frame.times[k];
  const double xi = signed_rotation_between(frame.unstable[k], frame.stable[k]);
  const bool at_end = q + 1 > p.period() + kEps;
  auto res = compose_rotation(p, xi, at_end, budget, q, tol);
  res.cert.lemma = "small_angle_ellipticize";
  res.cert.expect_elliptic = true;
  const Mat2 m = transport(res.cocycle.path, 0, p.period(), p.integ);
  res.cert.add("final_trace", std::abs(m.trace()), 2 - tol.cls);
  res.cert.add("angle", frame.angle[k], budget.theta);
  return res;
}

PerturbationResult exchange_directions(const PeriodicCocycle& p, const SplittingFrame& frame,
                                       double q, const PerturbationBudget& budget,
                                       const PerturbationTolerances& tol) {
  const int m = budget.m;
  const double tau = p.period();
  const auto& o = p.integ;
  if (q < -kEps || q + m > tau + kEps) fail(ErrorCode::OutOfDomain, "[q, q+m] leaves the period");
  if (!(min_angle(frame) >= budget.theta - kEps)) fail(ErrorCode::AngleTooSmall, "min angle below theta");
  if (!(budget.delta > 0)) fail(ErrorCode::FactorTooLarge, "empty perturbation budget");

  std::vector<Mat2> steps;
  std::vector<Direction> targets;
  for (int i = 0; i < m; ++i) {
    steps.push_back(transport(p.path, q + i, q + i + 1, o));
    targets.push_back(stable_at(p, frame, q + i));
  }
  const Direction start = unstable_at(p, frame, q);
  const double pi = std::numbers::pi;

  // Greedy: rotate by as much as delta allows toward Ns along one orientation.
  auto schedule = [&](double orient, std::vector<double>& xis) {
    Direction d = start;
    bool reached = false;
    xis.assign(static_cast<std::size_t>(m), 0.0);
    for (int i = 0; i < m; ++i) {
      double xi = 0;
      if (!reached) {
        const double gap = Direction::reduce(orient * (targets[i].angle() - d.angle()));
        if (gap > kEps && gap < pi - kEps) {
          xi = orient * std::min(budget.delta, gap);
          reached = gap <= budget.delta;
        } else {
          reached = true;
        }
      }
      xis[static_cast<std::size_t>(i)] = xi;
      d = Direction::from_vector((steps[i] * rotation(xi).matrix() * d.vector()).eval());
    }
    return reached;
  };
  const double first = signed_rotation_between(start, targets[0]) >= 0 ? 1.0 : -1.0;
  std::vector<double> xis;
  if (!schedule(first, xis) && !schedule(-first, xis)) {
    fail(ErrorCode::RotationBudgetExceeded, "exchange needs rotations larger than delta");
  }

  CoefficientPath path = p.path;
  double max_q = 0, max_xi = 0, worst_factor = 0;
  for (int i = 0; i < m; ++i) {
    const double xi = xis[static_cast<std::size_t>(i)];
    if (xi == 0) continue;
    const TracelessMatrix gen = log_unimodular(rotation(xi));
    const WindowModifier w{q + i, ModifierKind::RightFactor, gen, 1};
    if (!path.window_free(w.start)) fail(ErrorCode::WindowOverlap, "exchange window in use");
    path = path.with_modifier(w, o);
    max_q = std::max(max_q, op_norm(gen.matrix()));
    max_xi = std::max(max_xi, std::abs(xi));
  }
  for (const auto& w : path.modifiers()) {
    if (p.path.window_free(w.start)) {
      worst_factor = std::max(worst_factor, factor_residual(p.path, path, w, o));
    }
  }

  Certificate cert;
  cert.lemma = "exchange_directions";
  cert.before = share(p.path);
  cert.after = share(path);
  cert.windows = new_windows(p.path, path);
  const Direction landed = propagate_direction(path, start, q, q + m, o);
  cert.add("direction", acute_angle(landed, stable_at(p, frame, q + m)), tol.direction);
  cert.add("factor_equation", worst_factor, tol.factor);
  cert.add("max_rotation", max_xi, budget.delta);
  cert.sup_norm = measure_sup_norm(p.path, path);
  cert.sup_bound = proof_bound(budget, max_q);
  cert.add("sup_norm", cert.sup_norm, cert.sup_bound);
  return {with_path(p, path), cert};
}

double theta_balance(const PeriodicCocycle& p, const SplittingFrame& frame, double witness,
                     int m, double s) {
  return psi_u_at(p, frame, witness) + psi_u_at(p, frame, witness + m) -
         2 * psi_u_at(p, frame, witness - s) - std::log(frame.sigma);
}

double theta_root(const PeriodicCocycle& p, const SplittingFrame& frame, double witness,
                  int m, double tol, int max_iter) {
  double lo = 0, hi = p.period() - m;
  const double f_lo = theta_balance(p, frame, witness, m, lo);
  const double f_hi = theta_balance(p, frame, witness, m, hi);
  if (!(f_lo < 0 && f_hi > 0)) fail(ErrorCode::NoRootBracket, "balance has no sign change");
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = (lo + hi) / 2;
    (theta_balance(p, frame, witness, m, mid) < 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

TameResult tame_norm(const PeriodicCocycle& p, const SplittingFrame& frame,
                     const PerturbationBudget& budget, const PerturbationTolerances& tol) {
  const int m = budget.m;
  const double tau = p.period();
  if (!(tau > m)) fail(ErrorCode::PeriodTooShort, "period must exceed m");
  if (!(min_angle(frame) > budget.theta)) fail(ErrorCode::AngleTooSmall, "min angle below theta");

  TameResult out;
  out.cert.lemma = "tame_norm";
  out.cert.before = share(p.path);
  out.cert.norm_cap = budget.K;
  const double threshold = std::exp(budget.j * m) / std::sin(budget.theta);
  if (frame.sigma <= threshold) {
    out.cocycle = p;
    out.unchanged = true;
    out.cert.after = out.cert.before;
    out.cert.sup_bound = 0;
    out.cert.add("monodromy_norm", op_norm(monodromy(p).matrix()), budget.K);
    return out;
  }

  // Witness times, largest ratio first.
  const auto report = domination_report(p, frame, m);
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < report.times.size(); ++k) {
    if (report.times[k] + m <= tau + kEps) order.push_back(k);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return report.ratio[a] > report.ratio[b];
  });
  if (order.size() > 16) order.resize(16);

  std::optional<Error> last;
  bool have = false;
  double best = 0;
  for (std::size_t k : order) {
    const double w = report.times[k];
    PerturbationResult ex;
    double s;
    try {
      ex = exchange_directions(p, frame, w, budget, tol);
      s = theta_root(p, frame, w, m, tol.root, tol.max_iter);
    } catch (const Error& e) {
      last = e;
      continue;
    }
    double q = std::fmod(w - s, tau);
    if (q < 0) q += tau;
    const double norm = op_norm(based_monodromy(ex.cocycle.path, q, p.integ));
    if (!have || norm < best) {
      have = true;
      best = norm;
      out.cocycle = ex.cocycle;
      out.q = q;
      out.witness = w;
      out.s = s;
      out.cert.children = {ex.cert};
    }
    if (norm < budget.K) break;
  }
  if (!have) {
    if (last) throw *last;
    fail(ErrorCode::RotationBudgetExceeded, "no witness time admits an exchange");
  }

  out.cert.after = share(out.cocycle.path);
  out.cert.cap_base = out.q;
  out.cert.windows = new_windows(p.path, out.cocycle.path);
  out.cert.add("balance", std::abs(theta_balance(p, frame, out.witness, m, out.s)), 1e-6);
  out.cert.add("monodromy_norm", best, budget.K);
  out.cert.sup_norm = out.cert.children.front().sup_norm;
  out.cert.sup_bound = out.cert.children.front().sup_bound;
  out.cert.add("sup_norm", out.cert.sup_norm, out.cert.sup_bound);
  return out;
}

namespace {

bool near_identity(const Mat2& m, double tol, double& sign, double& residual) {
  const double rp = op_norm((m - Mat2::Identity()).eval());
  const double rm = op_norm((m + Mat2::Identity()).eval());
  sign = rp <= rm ? 1 : -1;
  residual = std::min(rp, rm);
  return residual <= tol;
}

}  // namespace

EllipticizeResult ellipticize_long_orbit(const PeriodicCocycle& p,
                                         const PerturbationBudget& budget,
                                         const PerturbationTolerances& tol) {
  const double tau = p.period();
  const auto& o = p.integ;
  const PerturbationBudget third = budget.scaled(1.0 / 3);
  if (!(third.delta > 0)) fail(ErrorCode::FactorTooLarge, "empty perturbation budget");

  EllipticizeResult out;
  Certificate cert;
  cert.lemma = "ellipticize_long_orbit";
  cert.expect_elliptic = true;
  cert.sup_bound = budget.epsilon;

  PeriodicCocycle current = p;
  double sign = 1, residual = 0;
  const Mat2 m0 = monodromy(p).matrix();
  if (!near_identity(m0, tol.identity, sign, residual)) {
    if (classify(UnimodularMatrix::trusted(m0), tol.cls).kind != Spectrum::Hyperbolic) {
      fail(ErrorCode::NotHyperbolic, "monodromy is not hyperbolic");
    }
    if (!(tau > third.T)) fail(ErrorCode::PeriodTooShort, "period does not exceed T");
    const auto frame = hyperbolic_splitting(p);
    auto tame = tame_norm(p, frame, third, tol);
    out.q = tame.q;
    cert.children.push_back(tame.cert);
    current = with_path(p, tame.cocycle.path.rebased(tame.q, o));

    const Mat2 m2 = monodromy(current).matrix();
    const auto cls = classify(UnimodularMatrix::trusted(m2), tol.cls).kind;
    if (cls == Spectrum::Hyperbolic && !near_identity(m2, tol.identity, sign, residual)) {
      const auto frame2 = hyperbolic_splitting(current);
      const double theta = std::min(budget.theta, min_angle(frame2));
      const double alpha = rho_inverse(theta, third.delta, tol.root, tol.max_iter);
      const int count = static_cast<int>(std::floor(std::log(third.K) / alpha)) + 2;

      std::vector<double> starts;
      for (double w = 1; w + 1 <= tau + kEps && static_cast<int>(starts.size()) < count;) {
        if (current.path.window_free(w)) {
          starts.push_back(std::min(w, tau - 1));
          w += 1;
        } else {
          w += kScan;
        }
      }
      if (static_cast<int>(starts.size()) < count) {
        fail(ErrorCode::PeriodTooShort, "not enough free windows for the hyperbolic factors");
      }

      // Generators contracting Nu and expanding Ns at each window start.
      std::vector<TracelessMatrix> gens;
      std::vector<Mat2> fixed, inside;
      double prev = 0;
      for (double w : starts) {
        Mat2 v;
        v << unstable_at(current, frame2, w).vector(), stable_at(current, frame2, w).vector();
        Mat2 d = Mat2::Zero();
        d(0, 0) = -alpha;
        d(1, 1) = alpha;
        gens.push_back(TracelessMatrix::project((v * d * inv(v)).eval()));
        fixed.push_back(transport(current.path, prev, w, o));
        inside.push_back(transport(current.path, w, w + 1, o));
        prev = w + 1;
      }
      fixed.push_back(transport(current.path, prev, tau, o));
      const Vec2 u0 = frame2.unstable.front().vector();
      auto log_stretch = [&](double t) {
        Vec2 v = u0;
        for (std::size_t i = 0; i < starts.size(); ++i) {
          v = inside[i] * (exp_traceless(gens[i] * t).matrix() * (fixed[i] * v));
        }
        return std::log((fixed.back() * v).norm());
      };
      double lo = 0, hi = 1;
      if (!(log_stretch(lo) > 0 && log_stretch(hi) < 0)) {
        fail(ErrorCode::NoRootBracket, "hyperbolic factors cannot cancel the stretch");
      }
      for (int i = 0; i < tol.max_iter && hi - lo > tol.root; ++i) {
        const double mid = (lo + hi) / 2;
        (log_stretch(mid) > 0 ? lo : hi) = mid;
      }
      const double t0 = (lo + hi) / 2;
      out.t0 = t0;
      out.windows = count;

      CoefficientPath path = current.path;
      double max_factor = 0, max_q = 0;
      for (std::size_t i = 0; i < starts.size(); ++i) {
        const WindowModifier w{starts[i], ModifierKind::HyperbolicFactor, gens[i], t0};
        max_factor = std::max(
            max_factor,
            op_norm((exp_traceless(w.effective_generator()).matrix() - Mat2::Identity()).eval()));
        max_q = std::max(max_q, op_norm(w.effective_generator().matrix()));
        path = path.with_modifier(w, o);
      }
      Certificate hyp;
      hyp.lemma = "hyperbolic_factors";
      hyp.before = share(current.path);
      hyp.after = share(path);
      hyp.windows = new_windows(current.path, path);
      double worst = 0;
      for (const auto& w : hyp.windows) {
        worst = std::max(worst, factor_residual(current.path, path, {w.start, w.kind, w.q, 1}, o));
      }
      hyp.add("factor_equation", worst, tol.factor);
      hyp.add("factor_size", max_factor, third.delta);
      const Mat2 m3 = transport(path, 0, tau, o);
      near_identity(m3, tol.identity, sign, residual);
      hyp.add("identity", residual, tol.identity);
      hyp.sup_norm = measure_sup_norm(current.path, path);
      hyp.sup_bound = proof_bound(third, max_q);
      hyp.add("sup_norm", hyp.sup_norm, hyp.sup_bound);
      cert.children.push_back(hyp);
      cert.add("identity", residual, tol.identity);
      if (residual > tol.identity) {
        fail(ErrorCode::IdentityResidualTooLarge, "monodromy did not reach +-I");
      }
      current = with_path(current, path);
    } else if (cls != Spectrum::Hyperbolic) {
      residual = 0;
    }
  } else {
    cert.add("identity", residual, tol.identity);
  }

  const Mat2 mc = monodromy(current).matrix();
  if (std::abs(mc.trace()) >= 2 - tol.cls) {
    auto rot = compose_rotation(current, third.delta, false, third, 0, tol);
    cert.children.push_back(rot.cert);
    current = rot.cocycle;
  }

  const CoefficientPath reference = p.path.rebased(out.q, o);
  cert.before = share(reference);
  cert.after = share(current.path);
  cert.windows = new_windows(reference, current.path);
  const Mat2 mf = monodromy(current).matrix();
  cert.add("final_trace", std::abs(mf.trace()), 2 - tol.cls);
  cert.sup_norm = measure_sup_norm(reference, current.path);
  cert.add("sup_norm", cert.sup_norm, budget.epsilon);
  out.cocycle = current;
  out.cert = cert;
  return out;
}

}  // namespace sl2lab
