#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "sl2lab/perturbation.hpp"
#include "sl2lab/scenario.hpp"

using namespace sl2lab;
using std::numbers::pi;

namespace {

PeriodicCocycle constant(double tau, TracelessMatrix a) {
  PeriodicCocycle p;
  p.path = CoefficientPath::constant(tau, a);
  return p;
}

PerturbationBudget with_delta(double delta, double C = 0) {
  auto b = PerturbationBudget::make(1, pi / 2, C, 1);
  b.delta = delta;
  return b;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidSpec;
}

double dist(const Mat2& a, const Mat2& b) { return op_norm((a - b).eval()); }

Mat2 diag(double x, double y) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = x;
  m(1, 1) = y;
  return m;
}

}  // namespace

TEST_CASE("inserting the identity changes nothing") {
  const auto p = constant(3, {0.4, 0, 0});
  const auto res = insert_factor_right(p, 1, UnimodularMatrix::identity(), with_delta(0.1));
  CHECK(res.cocycle.path.modifiers().empty());
  CHECK(res.cert.pass());
  CHECK(res.cert.sup_norm == 0);
}

TEST_CASE("right factor on the zero cocycle gives the rotation") {
  const auto p = constant(1, {});
  const auto res = insert_factor_right(p, 0, rotation(0.1), with_delta(0.2));
  CHECK(dist(monodromy(res.cocycle).matrix(), rotation(0.1).matrix()) < 1e-8);
  CHECK(res.cert.pass());
}

TEST_CASE("left and right factors on a diagonal cocycle") {
  const auto p = constant(2, {1, 0, 0});
  const Mat2 s = rotation(0.05).matrix();
  const Mat2 phi = diag(std::exp(1.0), std::exp(-1.0));
  const auto right = insert_factor_right(p, 0.5, rotation(0.05), with_delta(0.1, 1));
  const auto left = insert_factor_left(p, 0.5, rotation(0.05), with_delta(0.1, 1));
  const Mat2 pr = transport(right.cocycle.path, 0.5, 1.5);
  const Mat2 pl = transport(left.cocycle.path, 0.5, 1.5);
  CHECK(dist(pr, phi * s) / op_norm(phi) <= 1e-7);
  CHECK(dist(pl, s * phi) / op_norm(phi) <= 1e-7);
  // the two products differ because S does not commute with the diagonal flow
  CHECK(dist(pr, pl) > 1e-2);
  CHECK(right.cert.pass());
  CHECK(left.cert.pass());
  CHECK(right.cert.find("factor_equation")->value <= 1e-7);
  CHECK(right.cert.sup_norm <= right.cert.sup_bound);
}

TEST_CASE("insertion preconditions") {
  const auto p = constant(3, {0.2, 0, 0});
  CHECK(code_of([&] { insert_factor_right(p, 0, rotation(0.5), with_delta(0.1)); }) ==
        ErrorCode::FactorTooLarge);
  CHECK(code_of([&] { insert_factor_right(p, 2.5, rotation(0.05), with_delta(0.1)); }) ==
        ErrorCode::OutOfDomain);
  const auto once = insert_factor_right(p, 1, rotation(0.05), with_delta(0.1));
  CHECK(code_of([&] { insert_factor_left(once.cocycle, 1.5, rotation(0.05), with_delta(0.1)); }) ==
        ErrorCode::WindowOverlap);
}

TEST_CASE("factors on disjoint windows combine by max") {
  const auto p = constant(4, {0.3, 0.1, -0.1});
  const auto a = insert_factor_right(p, 0, rotation(0.08), with_delta(0.2));
  const auto b = insert_factor_left(p, 2.5, rotation(-0.05), with_delta(0.2));
  const auto ab = insert_factor_left(a.cocycle, 2.5, rotation(-0.05), with_delta(0.2));
  const double combined = measure_sup_norm(p.path, ab.cocycle.path);
  CHECK(combined == doctest::Approx(std::max(a.cert.sup_norm, b.cert.sup_norm)).epsilon(1e-12));
}

TEST_CASE("compose_rotation") {
  const auto zero = constant(1, {});
  const auto none = compose_rotation(zero, 0, false, with_delta(0.3));
  CHECK(none.cocycle.path.modifiers().empty());
  CHECK(none.cert.pass());

  const auto one = compose_rotation(zero, 0.1, false, with_delta(0.3));
  CHECK(dist(monodromy(one.cocycle).matrix(), rotation(0.1).matrix()) < 1e-8);
  CHECK(one.cocycle.path.modifiers().size() == 1);

  const auto chain = compose_rotation(constant(6, {}), 0.5, false, with_delta(0.1));
  CHECK(chain.cocycle.path.modifiers().size() == 5);
  CHECK(dist(monodromy(chain.cocycle).matrix(), rotation(0.5).matrix()) < 1e-7);
  CHECK(chain.cert.pass());
  for (const auto& w : chain.cert.windows) {
    CHECK(dist(exp_traceless(w.q).matrix(), Mat2::Identity()) <= 0.1 * (1 + 1e-9));
  }

  CHECK(code_of([&] { compose_rotation(constant(4, {}), 0.5, false, with_delta(0.1)); }) ==
        ErrorCode::NotEnoughWindows);

  // on a hyperbolic cocycle the monodromy becomes M R_xi, or R_xi M at the end
  const auto h = constant(5, {0.2, 0.05, 0});
  const Mat2 m = monodromy(h).matrix();
  const auto r = compose_rotation(h, 0.04, false, with_delta(0.1));
  CHECK(dist(monodromy(r.cocycle).matrix(), m * rotation(0.04).matrix()) / op_norm(m) < 1e-7);
  const auto l = compose_rotation(h, 0.04, true, with_delta(0.1));
  CHECK(dist(monodromy(l.cocycle).matrix(), rotation(0.04).matrix() * m) / op_norm(m) < 1e-7);
}

TEST_CASE("small-angle ellipticization") {
  // invariant lines at angles 0 and 0.05
  const auto p = constant(2, skewed_hyperbolic(0.3, 0.05));
  auto budget = with_delta(0.06, p.path.bound());
  budget.theta = 0.06;
  const auto res = small_angle_ellipticize(p, budget);
  CHECK(res.cocycle.path.modifiers().size() == 1);
  const Mat2 m = monodromy(res.cocycle).matrix();
  CHECK(std::abs(m.trace()) < 2);

  // oracle: M R_0.05 with M = V diag(e^0.6, e^-0.6) V^-1
  Mat2 v;
  v << 1, std::cos(0.05), 0, std::sin(0.05);
  const Mat2 m0 = v * diag(std::exp(0.6), std::exp(-0.6)) * v.inverse();
  const Mat2 expected = m0 * rotation(0.05).matrix();
  CHECK(m.trace() == doctest::Approx(expected.trace()).epsilon(1e-7));
  CHECK(res.cert.pass());
  CHECK(res.cert.find("final_trace") != nullptr);

  CHECK(code_of([&] { small_angle_ellipticize(constant(2, {0, -0.5, 0.5}), budget); }) ==
        ErrorCode::NotHyperbolic);
  auto tight = budget;
  tight.theta = 0.01;
  CHECK(code_of([&] { small_angle_ellipticize(p, tight); }) == ErrorCode::AngleNotSmall);
}

TEST_CASE("rho closed forms and inverse") {
  for (double a : {0.0, 0.01, 0.3, 1.0}) {
    CHECK(rho(pi / 2, a) == doctest::Approx(std::exp(a) - 1).epsilon(1e-13));
  }
  CHECK(rho_inverse(pi / 2, std::exp(1.0) - 1) == doctest::Approx(1).epsilon(1e-9));

  // skewed frame: exp(Q) = cosh(a) I + sinh(a)/a Q, op norm from the eigenvalues of N^T N
  const double theta = pi / 6, a = 0.1;
  Mat2 v;
  v << 1, std::cos(theta), 0, std::sin(theta);
  const Mat2 q = v * diag(a, -a) * v.inverse();
  const Mat2 n = std::cosh(a) * Mat2::Identity() + std::sinh(a) / a * q - Mat2::Identity();
  const Mat2 g = n.transpose() * n;
  const double oracle =
      std::sqrt((g.trace() + std::sqrt(g.trace() * g.trace() - 4 * g.determinant())) / 2);
  CHECK(rho(theta, a) == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(rho(theta, a) > std::exp(a) - 1);

  for (double th : {0.05, 0.4, 1.2}) {
    double previous = 0;
    for (double x : {0.01, 0.1, 0.5, 1.5}) {
      const double r = rho(th, x);
      CHECK(r > previous);
      previous = r;
      CHECK(rho_inverse(th, r) == doctest::Approx(x).epsilon(1e-8));
    }
  }
}

TEST_CASE("exchanging the invariant directions") {
  const auto p = constant(40, {0.05, 0, 0});
  const auto frame = hyperbolic_splitting(p);
  const auto budget = PerturbationBudget::for_path(p.path, 1, 1.5, 8);
  const auto res = exchange_directions(p, frame, 2, budget);
  CHECK(res.cert.pass());
  CHECK(res.cert.find("max_rotation")->value <= budget.delta);
  // independent check: push Nu(2) through the perturbed flow
  const Direction end = propagate_direction(res.cocycle.path, frame.unstable.front(), 2, 10);
  CHECK(acute_angle(end, Direction(pi / 2)) < 1e-5);
  for (double t : {0.5, 1.9, 10.1, 25.0, 39.5}) {
    CHECK(res.cocycle.path.evaluate(t) == p.path.evaluate(t));
  }

  const auto strong = constant(10, {1, 0, 0});
  const auto fs = hyperbolic_splitting(strong);
  const auto small = PerturbationBudget::for_path(strong.path, 0.1, pi / 2, 1);
  CHECK(code_of([&] { exchange_directions(strong, fs, 2, small); }) ==
        ErrorCode::RotationBudgetExceeded);
}

TEST_CASE("theta balance roots") {
  const auto p = constant(40, {0.05, 0, 0});
  const auto f = hyperbolic_splitting(p);
  CHECK(theta_root(p, f, 20, 4) == doctest::Approx(18).epsilon(1e-8));
  CHECK(theta_root(p, f, 3, 6) == doctest::Approx(17).epsilon(1e-8));

  // a(t) = l + mu cos(2 pi t / tau): psi_u has the closed form below
  const double tau = 30, l = 0.08, mu = 0.05, w = 2 * pi / tau;
  PeriodicCocycle q;
  q.path = CoefficientPath(tau, {Segment{0, tau, {l, 0, 0}}}, {TrigTerm{Entry::A, mu, w, 0}});
  const auto fq = hyperbolic_splitting(q);
  auto psi = [&](double t) { return l * t + mu / w * std::sin(w * t); };
  const double witness = 11, log_sigma = l * tau;
  const int m = 5;
  auto balance = [&](double s) {
    return psi(witness) + psi(witness + m) - 2 * psi(witness - s) - log_sigma;
  };
  double lo = 0, hi = tau - m;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    ((balance(lo) < 0) == (balance(mid) < 0) ? lo : hi) = mid;
  }
  CHECK(theta_balance(q, fq, witness, m, 7.5) == doctest::Approx(balance(7.5)).epsilon(1e-7));
  CHECK(theta_root(q, fq, witness, m) == doctest::Approx((lo + hi) / 2).epsilon(1e-6));
}

TEST_CASE("tame_norm") {
  const auto mild = constant(40, {0.05, 0, 0});
  const auto fm = hyperbolic_splitting(mild);
  const auto unchanged = tame_norm(mild, fm, PerturbationBudget::for_path(mild.path, 1, 1.5, 4));
  CHECK(unchanged.unchanged);
  CHECK(unchanged.cert.pass());
  CHECK(unchanged.cert.find("monodromy_norm") != nullptr);

  const auto wide = constant(400, {0.05, 0, 0});
  const auto fw = hyperbolic_splitting(wide);
  const auto budget = PerturbationBudget::for_path(wide.path, 4, 1.5, 4).scaled(1.0 / 3);
  const auto res = tame_norm(wide, fw, budget);
  CHECK_FALSE(res.unchanged);
  CHECK(res.cert.pass());
  const Mat2 based = transport(res.cocycle.path.rebased(res.q), 0, 400);
  CHECK(op_norm(based) < budget.K);
  CHECK(reverify(res.cert).pass());
}

TEST_CASE("ellipticizing a long orbit") {
  const auto p = constant(40, {0.2, 0, 0});
  const auto budget = PerturbationBudget::for_path(p.path, 6, 1.5, 7);
  const auto res = ellipticize_long_orbit(p, budget);
  const auto third = budget.scaled(1.0 / 3);
  CHECK(res.windows == third.T);
  // each factor contracts Nu by exp(-alpha t0); together they cancel the stretch e^8
  CHECK(res.t0 == doctest::Approx(8 / (third.alpha * res.windows)).epsilon(1e-6));
  CHECK(std::abs(monodromy(res.cocycle).trace()) < 2);
  CHECK(res.cert.find("identity")->value <= 1e-5);
  CHECK(res.cert.sup_norm <= budget.epsilon);
  CHECK(res.cert.pass());
  CHECK(reverify(res.cert).pass());

  const auto short_period = constant(20, {0.2, 0, 0});
  CHECK(code_of([&] {
          ellipticize_long_orbit(short_period, PerturbationBudget::for_path(short_period.path, 6, pi / 2, 7));
        }) == ErrorCode::PeriodTooShort);
  CHECK(code_of([&] { ellipticize_long_orbit(p, PerturbationBudget::make(0, pi / 2, 0.2, 7)); }) ==
        ErrorCode::FactorTooLarge);
}
