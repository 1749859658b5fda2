#ifndef SL2LAB_SL2_HPP
#define SL2LAB_SL2_HPP

// Closed-form 2x2 linear algebra for sl(2,R) and SL(2,R).

#include <Eigen/Core>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "sl2lab/errors.hpp"

namespace sl2lab {

template <typename Scalar>
using Mat2T = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vec2T = Eigen::Matrix<Scalar, 2, 1>;

using Mat2 = Mat2T<double>;
using Vec2 = Vec2T<double>;

struct Sl2Tolerances {
  double det = 1e-9;       // |det - 1| accepted for a unimodular matrix
  double classify = 1e-9;  // half-width of the parabolic band around |tr| = 2
  double angle = 1e-12;    // lines closer than this are treated as equal
  double log_radius = 0.5; // ||S - I|| admissible for the logarithm
};

/// Element [[a, b], [c, -a]] of sl(2,R).
template <typename Scalar>
struct Traceless {
  Scalar a{0}, b{0}, c{0};

  static Traceless zero() { return {}; }

  /// Drops the trace part of an arbitrary 2x2 matrix.
  template <typename Derived>
  static Traceless project(const Eigen::MatrixBase<Derived>& m) {
    return {(m(0, 0) - m(1, 1)) / Scalar(2), m(0, 1), m(1, 0)};
  }

  Mat2T<Scalar> matrix() const {
    Mat2T<Scalar> m;
    m << a, b, c, -a;
    return m;
  }

  /// det Q = -(a^2 + bc); Q^2 = -det(Q) I.
  Scalar det() const { return -(a * a + b * c); }

  Traceless operator+(const Traceless& o) const { return {a + o.a, b + o.b, c + o.c}; }
  Traceless operator-(const Traceless& o) const { return {a - o.a, b - o.b, c - o.c}; }
  Traceless operator*(Scalar s) const { return {a * s, b * s, c * s}; }
  friend Traceless operator*(Scalar s, const Traceless& q) { return q * s; }
  bool operator==(const Traceless&) const = default;
};

/// Element of SL(2,R). The determinant is checked on construction unless the
/// caller vouches for it with `trusted` (integrator output, products of
/// already unimodular factors).
template <typename Scalar>
class Unimodular {
 public:
  Unimodular() : m_(Mat2T<Scalar>::Identity()) {}

  explicit Unimodular(const Mat2T<Scalar>& m, Scalar tol_det = Scalar(1e-9)) : m_(m) {
    using std::abs;
    if (!(abs(m_.determinant() - Scalar(1)) <= tol_det)) {
      fail(ErrorCode::InvalidSpec, "matrix is not unimodular");
    }
  }

  static Unimodular trusted(const Mat2T<Scalar>& m) {
    Unimodular u;
    u.m_ = m;
    return u;
  }

  static Unimodular identity() { return {}; }

  const Mat2T<Scalar>& matrix() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }
  Scalar trace() const { return m_.trace(); }
  Scalar det() const { return m_.determinant(); }

  /// Adjugate; exact inverse for det = 1.
  Unimodular inverse() const {
    Mat2T<Scalar> inv;
    inv << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return trusted(inv);
  }

  Unimodular operator*(const Unimodular& o) const { return trusted(m_ * o.m_); }

 private:
  Mat2T<Scalar> m_;
};

using TracelessMatrix = Traceless<double>;
using UnimodularMatrix = Unimodular<double>;

/// A line through the origin, stored as its angle in [0, pi).
template <typename Scalar>
class DirectionT {
 public:
  DirectionT() = default;
  explicit DirectionT(Scalar angle) : angle_(reduce(angle)) {}

  template <typename Derived>
  static DirectionT from_vector(const Eigen::MatrixBase<Derived>& v) {
    using std::atan2;
    return DirectionT(atan2(v(1), v(0)));
  }

  Scalar angle() const { return angle_; }

  Vec2T<Scalar> vector() const {
    using std::cos, std::sin;
    return Vec2T<Scalar>(cos(angle_), sin(angle_));
  }

  static Scalar reduce(Scalar angle) {
    using std::fmod;
    const Scalar pi = std::numbers::pi_v<Scalar>;
    Scalar r = fmod(angle, pi);
    if (r < Scalar(0)) r += pi;
    if (r >= pi) r -= pi;
    return r;
  }

 private:
  Scalar angle_{0};
};

using Direction = DirectionT<double>;

/// Acute angle in [0, pi/2] between two lines.
template <typename Scalar>
Scalar acute_angle(const DirectionT<Scalar>& u, const DirectionT<Scalar>& v) {
  using std::abs;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar d = abs(u.angle() - v.angle());
  return std::min(d, pi - d);
}

enum class Spectrum { Elliptic, Hyperbolic, Parabolic };

inline const char* to_string(Spectrum s) {
  switch (s) {
    case Spectrum::Elliptic: return "Elliptic";
    case Spectrum::Hyperbolic: return "Hyperbolic";
    case Spectrum::Parabolic: return "Parabolic";
  }
  return "?";
}

template <typename Scalar>
struct SpectralClassT {
  Spectrum kind;
  Scalar trace;
};

using SpectralClass = SpectralClassT<double>;

template <typename Scalar>
Unimodular<Scalar> rotation(Scalar xi) {
  using std::cos, std::sin;
  Mat2T<Scalar> r;
  r << cos(xi), -sin(xi), sin(xi), cos(xi);
  return Unimodular<Scalar>::trusted(r);
}

/// Largest singular value of a 2x2 matrix, in the cancellation-free form
/// (|z1| + |z2|) / 2 with z1 = (a+d, c-b), z2 = (a-d, b+c).
template <typename Derived>
typename Derived::Scalar op_norm(const Eigen::MatrixBase<Derived>& m) {
  using std::hypot;
  const auto a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  return (hypot(a + d, c - b) + hypot(a - d, b + c)) / 2;
}

template <typename Scalar>
Scalar op_norm(const Unimodular<Scalar>& m) {
  return op_norm(m.matrix());
}

template <typename Scalar>
Unimodular<Scalar> exp_traceless(const Traceless<Scalar>& q) {
  using std::abs, std::sqrt, std::cosh, std::sinh, std::cos, std::sin;
  const Scalar det = q.det();
  const Mat2T<Scalar> qm = q.matrix();
  const Mat2T<Scalar> id = Mat2T<Scalar>::Identity();
  if (abs(det) < Scalar(1e-14)) {
    // I + Q + Q^2/2 with Q^2 = -det I
    return Unimodular<Scalar>::trusted(id * (Scalar(1) - det / 2) + qm);
  }
  if (det < 0) {
    const Scalar alpha = sqrt(-det);
    return Unimodular<Scalar>::trusted(cosh(alpha) * id + (sinh(alpha) / alpha) * qm);
  }
  const Scalar omega = sqrt(det);
  return Unimodular<Scalar>::trusted(cos(omega) * id + (sin(omega) / omega) * qm);
}

/// Inverse of exp_traceless near the identity.
template <typename Scalar>
Traceless<Scalar> log_unimodular(const Unimodular<Scalar>& s,
                                 const Sl2Tolerances& tol = {}) {
  using std::acosh, std::acos, std::sinh, std::sin;
  const Mat2T<Scalar> id = Mat2T<Scalar>::Identity();
  const Scalar dist = op_norm((s.matrix() - id).eval());
  const Scalar half_trace = s.trace() / 2;
  if (!(dist <= Scalar(tol.log_radius)) || !(half_trace > Scalar(-1))) {
    fail(ErrorCode::OutOfLogDomain, "||S - I|| exceeds the logarithm radius");
  }
  const Scalar gap = half_trace - Scalar(1);
  Scalar factor;
  if (gap > Scalar(1e-8)) {
    const Scalar alpha = acosh(half_trace);
    factor = alpha / sinh(alpha);
  } else if (gap < Scalar(-1e-8)) {
    const Scalar omega = acos(half_trace);
    factor = omega / sin(omega);
  } else {
    factor = Scalar(1) - gap / 3;
  }
  return Traceless<Scalar>::project(s.matrix()) * factor;
}

template <typename Scalar>
SpectralClassT<Scalar> classify(const Unimodular<Scalar>& s, Scalar tol_cls = Scalar(1e-9)) {
  using std::abs;
  const Scalar tr = s.trace();
  if (abs(tr) < Scalar(2) - tol_cls) return {Spectrum::Elliptic, tr};
  if (abs(tr) > Scalar(2) + tol_cls) return {Spectrum::Hyperbolic, tr};
  return {Spectrum::Parabolic, tr};
}

template <typename Scalar>
struct EigenSplittingT {
  DirectionT<Scalar> unstable;
  DirectionT<Scalar> stable;
  Scalar sigma;  // > 1; eigenvalues are sign(tr) * sigma^{+-1}
};

using EigenSplitting = EigenSplittingT<double>;

namespace detail {

// Null vector of (M - mu I), taken from whichever row gives the longer vector.
template <typename Scalar>
Vec2T<Scalar> eigenvector(const Mat2T<Scalar>& m, Scalar mu) {
  Vec2T<Scalar> v1(m(0, 1), mu - m(0, 0));
  Vec2T<Scalar> v2(mu - m(1, 1), m(1, 0));
  return v1.squaredNorm() >= v2.squaredNorm() ? v1 : v2;
}

}  // namespace detail

template <typename Scalar>
EigenSplittingT<Scalar> eigen_splitting(const Unimodular<Scalar>& s,
                                        Scalar tol_cls = Scalar(1e-9)) {
  using std::abs, std::sqrt;
  const auto cls = classify(s, tol_cls);
  if (cls.kind != Spectrum::Hyperbolic) {
    fail(ErrorCode::NotHyperbolic, "eigen_splitting needs |tr| > 2");
  }
  const Scalar t = abs(cls.trace);
  const Scalar disc = sqrt((t - Scalar(2)) * (t + Scalar(2)));
  const Scalar sigma = (t + disc) / 2;
  const Scalar sign = cls.trace > 0 ? Scalar(1) : Scalar(-1);
  const auto vu = detail::eigenvector<Scalar>(s.matrix(), sign * sigma);
  const auto vs = detail::eigenvector<Scalar>(s.matrix(), sign / sigma);
  return {DirectionT<Scalar>::from_vector(vu), DirectionT<Scalar>::from_vector(vs), sigma};
}

/// Rotation angle theta in (-pi/2, pi/2] with R_theta * from = to as lines.
template <typename Scalar>
Scalar signed_rotation_between(const DirectionT<Scalar>& from, const DirectionT<Scalar>& to,
                               Scalar tol_ang = Scalar(1e-12)) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar theta = DirectionT<Scalar>::reduce(to.angle() - from.angle());  // [0, pi)
  if (theta > pi / 2) theta -= pi;
  using std::abs;
  if (abs(theta) < tol_ang || abs(abs(theta) - pi) < tol_ang) {
    fail(ErrorCode::DegenerateSplitting, "directions coincide");
  }
  return theta;
}

template <typename Scalar>
using FrameT = std::pair<DirectionT<Scalar>, DirectionT<Scalar>>;

/// Max-entry norm of M written from the (unit) basis `src` to the basis `dst`.
template <typename Derived>
typename Derived::Scalar max_norm_in_frame(const Eigen::MatrixBase<Derived>& m,
                                           const FrameT<typename Derived::Scalar>& src,
                                           const FrameT<typename Derived::Scalar>& dst,
                                           typename Derived::Scalar tol_ang = 1e-12) {
  using Scalar = typename Derived::Scalar;
  if (acute_angle(src.first, src.second) <= tol_ang ||
      acute_angle(dst.first, dst.second) <= tol_ang) {
    fail(ErrorCode::DegenerateSplitting, "collapsed frame");
  }
  Mat2T<Scalar> e, f;
  e << src.first.vector(), src.second.vector();
  f << dst.first.vector(), dst.second.vector();
  const Mat2T<Scalar> coords = f.inverse() * m * e;
  return coords.cwiseAbs().maxCoeff();
}

template <typename Scalar>
struct EllipticizeCheckT {
  Scalar theta;
  Unimodular<Scalar> product;
  SpectralClassT<Scalar> cls;
};

/// Rotates the unstable line of a hyperbolic A onto its stable line and
/// returns A * R_theta, which is elliptic.
template <typename Scalar>
EllipticizeCheckT<Scalar> ellipticize_check(const Unimodular<Scalar>& a,
                                            Scalar tol_cls = Scalar(1e-9)) {
  const auto split = eigen_splitting(a, tol_cls);
  const Scalar theta = signed_rotation_between(split.unstable, split.stable);
  const auto b = a * rotation(theta);
  return {theta, b, classify(b, tol_cls)};
}

}  // namespace sl2lab

#endif  // SL2LAB_SL2_HPP
