#ifndef SL2LAB_BUMP_HPP
#define SL2LAB_BUMP_HPP

namespace sl2lab {

/// Quintic smoothstep 10t^3 - 15t^4 + 6t^5, clamped to 0 before the window
/// and 1 after it. The derivative peaks at 15/8 in the middle.
template <typename Scalar>
struct Bump {
  static Scalar value(Scalar t) {
    if (t <= Scalar(0)) return Scalar(0);
    if (t >= Scalar(1)) return Scalar(1);
    return t * t * t * (Scalar(10) + t * (Scalar(-15) + Scalar(6) * t));
  }

  static Scalar derivative(Scalar t) {
    if (t <= Scalar(0) || t >= Scalar(1)) return Scalar(0);
    const Scalar s = t * (Scalar(1) - t);
    return Scalar(30) * s * s;
  }

  static constexpr Scalar max_derivative() { return Scalar(15) / Scalar(8); }
};

}  // namespace sl2lab

#endif  // SL2LAB_BUMP_HPP
