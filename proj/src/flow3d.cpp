#include "sl2lab/flow3d.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace sl2lab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct Wave {
  double v, d1, d2;  // value and first two derivatives of 1 + k cos(2 pi z)
};

Wave wave(double k, double z) {
  const double c = std::cos(kTwoPi * z), s = std::sin(kTwoPi * z);
  return {1 + k * c, -kTwoPi * k * s, -kTwoPi * kTwoPi * k * c};
}

}  // namespace

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::ConstantField: return "ConstantField";
    case ModelKind::ABCFlow: return "ABCFlow";
    case ModelKind::SuspensionCatMap: return "SuspensionCatMap";
    case ModelKind::UserDefined: return "UserDefined";
  }
  return "?";
}

Vec3 AbcFlow::value(const Vec3& x) const {
  return {a_ * std::sin(x.z()) + c_ * std::cos(x.y()), b_ * std::sin(x.x()) + a_ * std::cos(x.z()),
          c_ * std::sin(x.y()) + b_ * std::cos(x.x())};
}

Mat3 AbcFlow::jacobian(const Vec3& x) const {
  Mat3 j;
  j << 0, -c_ * std::sin(x.y()), a_ * std::cos(x.z()),
       b_ * std::cos(x.x()), 0, -a_ * std::sin(x.z()),
       -b_ * std::sin(x.x()), c_ * std::cos(x.y()), 0;
  return j;
}

SuspensionCatMap::SuspensionCatMap(double a, double b) : a_(a), b_(b) {
  if (!(std::abs(a) < 1 && std::abs(b) < 1)) {
    fail(ErrorCode::InvalidSpec, "suspension modulation amplitudes must be below 1");
  }
}

Mat2 SuspensionCatMap::cat() {
  Mat2 c;
  c << 2, 1, 1, 1;
  return c;
}

Mat2 SuspensionCatMap::generator() {
  // log S = acosh(tr/2) / sinh(acosh(tr/2)) (S - tr/2 I) for hyperbolic S, tr > 2
  const Mat2 c = cat();
  const double h = c.trace() / 2;
  const double a = std::acosh(h);
  return (a / std::sinh(a)) * (c - h * Mat2::Identity());
}

Vec3 SuspensionCatMap::difference(const Vec3& a, const Vec3& b) const {
  Vec3 d = a - b;
  d.z() -= std::round(d.z());
  return d;
}

double SuspensionCatMap::orbit_period() const { return 1 / std::sqrt(1 - b_ * b_); }

Vec3 SuspensionCatMap::value(const Vec3& x) const {
  const Wave s = wave(b_, x.z()), h = wave(a_, x.z());
  const Vec2 u(x.x(), x.y());
  const Vec2 du = s.v * h.v * (generator() * u) - (s.d1 / 2) * u;
  return {du.x(), du.y(), s.v};
}

Mat3 SuspensionCatMap::jacobian(const Vec3& x) const {
  const Wave s = wave(b_, x.z()), h = wave(a_, x.z());
  const Mat2 g = generator();
  const Vec2 u(x.x(), x.y());
  Mat3 j = Mat3::Zero();
  j.topLeftCorner<2, 2>() = s.v * h.v * g - (s.d1 / 2) * Mat2::Identity();
  j.topRightCorner<2, 1>() = (s.d1 * h.v + s.v * h.d1) * (g * u) - (s.d2 / 2) * u;
  j(2, 2) = s.d1;
  return j;
}

double max_divergence(const VectorField3& field, int n, double side) {
  double worst = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const Vec3 x(side * i / n, side * j / n, side * k / n);
        worst = std::max(worst, std::abs(field.jacobian(x).trace()));
      }
    }
  }
  return worst;
}

TangentState integrate_tangent(const VectorField3& field, const Vec3& x, double t,
                               const FlowOptions& opts) {
  TangentState st{x, Mat3::Identity()};
  if (t == 0) return st;
  const auto n = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / opts.step - 1e-9)));
  const double h = t / static_cast<double>(n);
  auto speed_check = [&](const Vec3& v) {
    if (v.norm() < opts.tol_speed) fail(ErrorCode::SingularityEncountered, "field vanishes on the trajectory");
  };
  for (long k = 0; k < n; ++k) {
    const Vec3 k1 = field.value(st.x);
    speed_check(k1);
    const Mat3 l1 = field.jacobian(st.x) * st.u;
    const Vec3 x2 = st.x + (h / 2) * k1;
    const Vec3 k2 = field.value(x2);
    const Mat3 l2 = field.jacobian(x2) * (st.u + (h / 2) * l1);
    const Vec3 x3 = st.x + (h / 2) * k2;
    const Vec3 k3 = field.value(x3);
    const Mat3 l3 = field.jacobian(x3) * (st.u + (h / 2) * l2);
    const Vec3 x4 = st.x + h * k3;
    const Vec3 k4 = field.value(x4);
    const Mat3 l4 = field.jacobian(x4) * (st.u + h * l3);
    st.x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    st.u += (h / 6) * (l1 + 2 * l2 + 2 * l3 + l4);
  }
  speed_check(field.value(st.x));
  return st;
}

Vec3 flow_map(const VectorField3& field, const Vec3& x, double t, const FlowOptions& opts) {
  return integrate_tangent(field, x, t, opts).x;
}

Mat3 tangent_flow(const VectorField3& field, const Vec3& x, double t, const FlowOptions& opts) {
  return integrate_tangent(field, x, t, opts).u;
}

Mat32 normal_basis(const Vec3& v) {
  const double len = v.norm();
  if (!(len > 0)) fail(ErrorCode::SingularityEncountered, "zero vector has no normal plane");
  const Vec3 n = v / len;
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(n(i)) < std::abs(n(axis))) axis = i;
  }
  Vec3 ref = Vec3::Zero();
  ref(axis) = 1;
  const Vec3 e1 = (ref - ref.dot(n) * n).normalized();
  Mat32 b;
  b.col(0) = e1;
  b.col(1) = n.cross(e1);
  return b;
}

PoincareMap linear_poincare(const VectorField3& field, const Vec3& x, double t,
                            const FlowOptions& opts) {
  const auto st = integrate_tangent(field, x, t, opts);
  const Vec3 v0 = field.value(x), v1 = field.value(st.x);
  const Mat32 e = normal_basis(v0), f = normal_basis(v1);
  PoincareMap p;
  p.matrix = f.transpose() * st.u * e;
  p.det = p.matrix.determinant();
  p.volume_residual = std::abs(std::abs(p.det) * v1.norm() - v0.norm()) / v0.norm();
  p.end = st.x;
  return p;
}

OrbitSegment integrate_orbit(const VectorField3& field, const Vec3& x0, double duration,
                             double step) {
  OrbitSegment o;
  o.duration = duration;
  const auto n = std::max(1L, static_cast<long>(std::ceil(duration / step - 1e-9)));
  const double h = duration / static_cast<double>(n);
  FlowOptions opts;
  opts.step = h;
  TangentState st{x0, Mat3::Identity()};
  o.times.push_back(0);
  o.points.push_back(x0);
  o.tangent.push_back(st.u);
  for (long k = 0; k < n; ++k) {
    const auto next = integrate_tangent(field, st.x, h, opts);
    st.x = next.x;
    st.u = next.u * st.u;
    o.times.push_back(static_cast<double>(k + 1) * h);
    o.points.push_back(st.x);
    o.tangent.push_back(st.u);
  }
  o.closure = field.difference(o.points.back(), o.points.front()).norm();
  for (std::size_t k = 1; k + 1 < o.points.size(); ++k) {
    const Vec3 d = (o.points[k + 1] - o.points[k - 1]) / (2 * h);
    o.max_speed_error = std::max(o.max_speed_error, (d - field.value(o.points[k])).norm());
  }
  return o;
}

TrivializationFrame trivialize(const VectorField3& field, const OrbitSegment& orbit) {
  TrivializationFrame f;
  Vec3 dir = normal_basis(field.value(orbit.points.front())).col(0);
  const Vec3 first = dir;
  for (const auto& x : orbit.points) {
    const Vec3 v = field.value(x);
    const Vec3 n = v.normalized();
    dir = (dir - dir.dot(n) * n).normalized();
    const Vec3 eta = dir / v.norm();
    Mat32 psi;
    psi.col(0) = eta;
    psi.col(1) = eta.cross(v);
    f.eta.push_back(eta);
    f.psi.push_back(psi);
  }
  f.closure_angle = std::acos(std::clamp(dir.dot(first), -1.0, 1.0));
  return f;
}

Mat2 trivialized_poincare(const VectorField3& field, const OrbitSegment& orbit,
                          const TrivializationFrame& frame, std::size_t i, std::size_t j) {
  const Vec3 n = field.value(orbit.points[j]).normalized();
  const Mat3 proj = Mat3::Identity() - n * n.transpose();
  const Mat3 u = orbit.tangent[j] * orbit.tangent[i].inverse();
  const Mat32& pj = frame.psi[j];
  const Eigen::Matrix<double, 2, 3> pinv = (pj.transpose() * pj).inverse() * pj.transpose();
  return pinv * proj * u * frame.psi[i];
}

Extraction extract_cocycle(const VectorField3& field, const Vec3& x0, double period,
                           const ExtractOptions& opts) {
  const auto pieces = std::max(1L, static_cast<long>(std::ceil(period / opts.segment - 1e-9)));
  const long sub = std::max(2L, 2 * static_cast<long>(std::lround(opts.segment / opts.step / 2)));
  const double width = period / static_cast<double>(pieces);
  const double h = width / static_cast<double>(sub);

  const auto orbit = integrate_orbit(field, x0, period, h);
  const auto frame = trivialize(field, orbit);
  auto m_at = [&](std::size_t k) { return trivialized_poincare(field, orbit, frame, 0, k); };

  Extraction ex;
  ex.closure = orbit.closure;
  std::vector<Segment> segs;
  segs.reserve(static_cast<std::size_t>(pieces));
  for (long k = 0; k < pieces; ++k) {
    const auto c = static_cast<std::size_t>(k * sub + sub / 2);
    const Mat2 dm = (m_at(c + 1) - m_at(c - 1)) / (2 * h);
    const Mat2 a = dm * m_at(c).inverse();
    ex.trace_residual = std::max(ex.trace_residual, std::abs(a.trace()) / 2);
    const double t0 = static_cast<double>(k) * width;
    const double t1 = k + 1 == pieces ? period : static_cast<double>(k + 1) * width;
    segs.push_back({t0, t1, TracelessMatrix::project(a)});
  }
  ex.cocycle.path = CoefficientPath(period, std::move(segs));
  ex.cocycle.integ.step = std::min(ex.cocycle.integ.step, width);
  ex.monodromy = m_at(orbit.points.size() - 1);
  const Mat2 back = transport(ex.cocycle.path, 0, period, ex.cocycle.integ);
  ex.reintegration_residual = op_norm((back - ex.monodromy).eval()) / op_norm(ex.monodromy);
  if (ex.trace_residual > opts.tol_trace) {
    fail(ErrorCode::ExtractionResidualTooLarge, "extracted coefficient is not traceless");
  }
  if (ex.reintegration_residual > opts.tol_reintegrate) {
    fail(ErrorCode::ExtractionResidualTooLarge, "re-integration does not reproduce the monodromy");
  }
  return ex;
}

}  // namespace sl2lab
