#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sl2lab/dichotomy.hpp"
#include "sl2lab/scenario.hpp"

using namespace sl2lab;
using std::numbers::pi;

namespace {

PeriodicCocycle constant(double tau, TracelessMatrix a) {
  PeriodicCocycle p;
  p.path = CoefficientPath::constant(tau, a);
  return p;
}

PeriodicCocycle corpus(const std::string& name) {
  for (const auto& [n, spec] : bundled_corpus()) {
    if (n == name) return generate(spec);
  }
  FAIL("missing corpus entry " << name);
  return {};
}

void check_certificate(const DichotomyVerdict& v, double epsilon) {
  REQUIRE(v.cert.has_value());
  CHECK(v.cert->pass());
  CHECK(reverify(*v.cert).pass());
  CHECK(v.sup_norm <= epsilon);
  CHECK(std::abs(v.trace_after) < 2);
}

}  // namespace

TEST_CASE("pure rotation is already elliptic") {
  const auto v = analyze(constant(10, {0, -0.7, 0.7}), 0.1, 16);
  CHECK(v.kind == DichotomyCase::AlreadyElliptic);
  CHECK(v.sup_norm == 0);
  CHECK_FALSE(v.cert.has_value());
  CHECK(std::string(to_string(v.kind)) == "AlreadyElliptic");
}

TEST_CASE("near-parabolic monodromy takes the small-angle route") {
  const auto p = corpus("near-parabolic");
  CHECK(monodromy(p).trace() == doctest::Approx(2.0001).epsilon(1e-6));
  const auto v = analyze(p, 0.5, 16);
  CHECK(v.kind == DichotomyCase::SmallAngle);
  CHECK(v.min_angle < v.theta);
  check_certificate(v, 0.5);
}

TEST_CASE("weak constant hyperbolic cocycle breaks domination") {
  const auto p = constant(400, {0.05, 0, 0});
  const auto v = analyze(p, 4, 5);
  CHECK(v.kind == DichotomyCase::DominationBreak);
  CHECK(v.searched == std::vector<int>{1, 2, 4});
  REQUIRE(v.domination.has_value());
  CHECK_FALSE(v.domination->dominated);
  check_certificate(v, 4);
}

TEST_CASE("strong constant hyperbolic cocycle is dominated at once") {
  const auto v = analyze(constant(50, {1, 0, 0}), 0.1, 16);
  CHECK(v.kind == DichotomyCase::Dominated);
  CHECK(v.m == 1);
  REQUIRE(v.domination.has_value());
  CHECK(v.domination->max_ratio == doctest::Approx(std::exp(-2.0)).epsilon(1e-8));
}

TEST_CASE("empty budget is inconclusive") {
  const auto v = analyze(constant(50, {0.05, 0, 0}), 0, 16);
  CHECK(v.kind == DichotomyCase::Inconclusive);
  CHECK(v.message.find("FactorTooLarge") != std::string::npos);
}

TEST_CASE("undominated orbit that is too short is inconclusive") {
  const auto v = analyze(constant(30, {0.01, 0, 0}), 0.05, 4);
  CHECK(v.kind == DichotomyCase::Inconclusive);
  CHECK(v.message.find("PeriodTooShort") != std::string::npos);
}

TEST_CASE("threshold shrinks with epsilon") {
  const auto path = CoefficientPath::constant(10, {0.3, 0, 0});
  double previous = 1;
  for (double eps : {1.0, 0.1, 0.01}) {
    const double t = small_angle_threshold(path, eps);
    CHECK(t > 0);
    CHECK(t < previous);
    previous = t;
  }
  CHECK(small_angle_threshold(path, 0) == 0);
}
