#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sl2lab/bump.hpp"
#include "sl2lab/campaigns.hpp"
#include "sl2lab/sl2.hpp"

using namespace sl2lab;
using std::numbers::pi;

namespace {

Mat2 m2(double a, double b, double c, double d) {
  Mat2 m;
  m << a, b, c, d;
  return m;
}

double dist(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

UnimodularMatrix U(double a, double b, double c, double d) { return UnimodularMatrix(m2(a, b, c, d)); }

}  // namespace

TEST_CASE("exp_traceless closed forms") {
  CHECK(dist(exp_traceless(TracelessMatrix{}).matrix(), Mat2::Identity()) == 0);
  CHECK(dist(exp_traceless(TracelessMatrix{1, 0, 0}).matrix(), m2(std::exp(1), 0, 0, std::exp(-1))) <
        1e-14);
  CHECK(dist(exp_traceless(TracelessMatrix{0, -pi / 2, pi / 2}).matrix(), m2(0, -1, 1, 0)) < 1e-15);
  // nilpotent generator
  CHECK(dist(exp_traceless(TracelessMatrix{0, 1, 0}).matrix(), m2(1, 1, 0, 1)) == 0);
}

TEST_CASE("log_unimodular inverts exp near the identity") {
  const auto q = log_unimodular(U(1.2, 0, 0, 1 / 1.2));
  CHECK(q.a == doctest::Approx(std::log(1.2)).epsilon(1e-14));
  CHECK(std::abs(q.b) + std::abs(q.c) == 0);
  const auto r = log_unimodular(rotation(0.1));
  CHECK(std::abs(r.a) < 1e-16);
  CHECK(r.b == doctest::Approx(-0.1).epsilon(1e-14));
  CHECK(r.c == doctest::Approx(0.1).epsilon(1e-14));
  const auto z = log_unimodular(UnimodularMatrix::identity());
  CHECK(z.a == 0);
  CHECK(z.b == 0);
  CHECK(z.c == 0);
  CHECK_THROWS_AS(log_unimodular(U(2, 0, 0, 0.5)), Error);
}

TEST_CASE("exp has unit determinant and log round-trips") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const TracelessMatrix q{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const auto s = exp_traceless(q);
    CHECK(std::abs(s.det() - 1) <= 1e-12 * std::max(1.0, op_norm(s) * op_norm(s)));
    // Small generators land inside the log radius.
    const auto small = exp_traceless(random_unit_traceless(rng) * rng.uniform(0, 0.4));
    if (op_norm((small.matrix() - Mat2::Identity()).eval()) <= 0.5) {
      CHECK(dist(exp_traceless(log_unimodular(small)).matrix(), small.matrix()) <= 1e-10);
    }
  }
}

TEST_CASE("classify by trace band") {
  CHECK(classify(U(2, 0, 0, 0.5)).kind == Spectrum::Hyperbolic);
  CHECK(classify(rotation(pi / 4)).kind == Spectrum::Elliptic);
  CHECK(classify(U(1, 1, 0, 1)).kind == Spectrum::Parabolic);
  CHECK(classify(U(1, 1, 0, 1)).trace == 2);
}

TEST_CASE("eigen_splitting examples") {
  auto s = eigen_splitting(U(2, 0, 0, 0.5));
  CHECK(s.unstable.angle() == doctest::Approx(0));
  CHECK(s.stable.angle() == doctest::Approx(pi / 2));
  CHECK(s.sigma == doctest::Approx(2));

  // Golden-mean matrix: characteristic polynomial x^2 - 3x + 1.
  s = eigen_splitting(U(2, 1, 1, 1));
  const double g = (3 + std::sqrt(5.0)) / 2;
  CHECK(s.sigma == doctest::Approx(g).epsilon(1e-14));
  CHECK(s.unstable.angle() == doctest::Approx(std::atan(g - 2)).epsilon(1e-13));
  const Vec2 vu = s.unstable.vector();
  CHECK((U(2, 1, 1, 1).matrix() * vu - g * vu).norm() < 1e-13);

  // [[2,3],[1,2]]: sigma = 2 + sqrt 3, eigenvectors (sqrt3, +-1).
  s = eigen_splitting(U(2, 3, 1, 2));
  CHECK(s.sigma == doctest::Approx(2 + std::sqrt(3.0)).epsilon(1e-14));
  CHECK(s.unstable.angle() == doctest::Approx(std::atan(1 / std::sqrt(3.0))).epsilon(1e-13));
  CHECK(s.stable.angle() == doctest::Approx(pi - std::atan(1 / std::sqrt(3.0))).epsilon(1e-13));

  CHECK_THROWS_AS(eigen_splitting(rotation(0.3)), Error);
}

TEST_CASE("eigen_splitting lines are invariant") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_hyperbolic(rng);
    const auto s = eigen_splitting(a);
    for (const auto& d : {s.unstable, s.stable}) {
      const Direction image = Direction::from_vector((a.matrix() * d.vector()).eval());
      CHECK(acute_angle(image, d) <= 1e-9);
    }
  }
}

TEST_CASE("signed_rotation_between") {
  CHECK(signed_rotation_between(Direction(0), Direction(pi / 2)) == doctest::Approx(pi / 2));
  CHECK(signed_rotation_between(Direction(0), Direction(0.3)) == doctest::Approx(0.3));
  CHECK(signed_rotation_between(Direction(0.2), Direction(3.0)) ==
        doctest::Approx(3.0 - 0.2 - pi).epsilon(1e-14));
  CHECK_THROWS_AS(signed_rotation_between(Direction(0.4), Direction(0.4 + pi)), Error);
}

TEST_CASE("rotation") {
  CHECK(dist(rotation(0.0).matrix(), Mat2::Identity()) == 0);
  CHECK(dist(rotation(pi).matrix(), -Mat2::Identity()) < 1e-15);
  CHECK(rotation(pi / 3).trace() == doctest::Approx(1).epsilon(1e-15));
}

TEST_CASE("op_norm and max_norm_in_frame") {
  const FrameT<double> ortho{Direction(0), Direction(pi / 2)};
  const Mat2 d = m2(3, 0, 0, 1.0 / 3);
  CHECK(op_norm(d) == doctest::Approx(3));
  CHECK(max_norm_in_frame(d, ortho, ortho) == doctest::Approx(3));
  const Mat2 r = rotation(pi / 2).matrix();
  CHECK(op_norm(r) == doctest::Approx(1));
  CHECK(max_norm_in_frame(r, ortho, ortho) == doctest::Approx(1));

  // Identity between a skew frame and itself is the identity in coordinates.
  const FrameT<double> skew{Direction(0.3), Direction(0.3 + 0.2)};
  CHECK(max_norm_in_frame(Mat2::Identity().eval(), skew, skew) == doctest::Approx(1).epsilon(1e-13));
  // From the skew frame to the orthonormal one the coordinates are the basis vectors.
  CHECK(max_norm_in_frame(Mat2::Identity().eval(), skew, ortho) ==
        doctest::Approx(std::max({std::cos(0.3), std::sin(0.3), std::cos(0.5), std::sin(0.5)})));
  CHECK_THROWS_AS(max_norm_in_frame(d, FrameT<double>{Direction(1), Direction(1)}, ortho), Error);

  // Singular values oracle from the eigenvalues of M^T M.
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Mat2 m = m2(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(-4, 4));
    const Mat2 g = m.transpose() * m;
    const double tr = g.trace(), det = g.determinant();
    const double top = std::sqrt((tr + std::sqrt(std::max(0.0, tr * tr - 4 * det))) / 2);
    CHECK(op_norm(m) == doctest::Approx(top).epsilon(1e-12));
  }
}

TEST_CASE("ellipticize_check examples") {
  auto chk = ellipticize_check(U(2, 0, 0, 0.5));
  CHECK(chk.theta == doctest::Approx(pi / 2));
  CHECK(dist(chk.product.matrix(), m2(0, -2, 0.5, 0)) < 1e-15);
  CHECK(chk.cls.kind == Spectrum::Elliptic);

  chk = ellipticize_check(U(2, 1, 1, 1));
  CHECK(std::abs(chk.product.trace()) < 2);

  chk = ellipticize_check(UnimodularMatrix(m2(1e6, 0, 0, 1e-6)));
  CHECK(std::abs(chk.product.trace()) < 1e-9);
  CHECK(chk.cls.kind == Spectrum::Elliptic);

  CHECK_THROWS_AS(ellipticize_check(rotation(1.0)), Error);
}

TEST_CASE("bump function") {
  using B = Bump<double>;
  CHECK(B::value(0) == 0);
  CHECK(B::value(1) == 1);
  CHECK(B::derivative(0) == 0);
  CHECK(B::derivative(1) == 0);
  CHECK(B::derivative(0.5) == doctest::Approx(15.0 / 8));
  double peak = 0;
  for (int i = 0; i <= 10000; ++i) {
    const double t = i / 10000.0;
    peak = std::max(peak, B::derivative(t));
    // derivative against a central difference of the value
    if (i > 0 && i < 10000) {
      const double h = 1e-6;
      CHECK(std::abs(B::derivative(t) - (B::value(t + h) - B::value(t - h)) / (2 * h)) < 1e-8);
    }
  }
  CHECK(peak <= B::max_derivative());
  CHECK(B::max_derivative() < 2);
}
