#ifndef SL2LAB_FLOW3D_HPP
#define SL2LAB_FLOW3D_HPP

// Divergence-free fields in R^3 with known closed orbits, their linear
// Poincare flow, a volume-normalized trivialization of the normal bundle and
// the planar cocycle it induces.

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

#include "sl2lab/splitting.hpp"

namespace sl2lab {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat32 = Eigen::Matrix<double, 3, 2>;

enum class ModelKind { ConstantField, ABCFlow, SuspensionCatMap, UserDefined };

const char* to_string(ModelKind kind);

class VectorField3 {
 public:
  virtual ~VectorField3() = default;
  virtual Vec3 value(const Vec3& x) const = 0;
  virtual Mat3 jacobian(const Vec3& x) const = 0;
  virtual ModelKind kind() const = 0;
  /// a - b, reduced along periodic coordinates.
  virtual Vec3 difference(const Vec3& a, const Vec3& b) const { return a - b; }
};

class ConstantField final : public VectorField3 {
 public:
  explicit ConstantField(const Vec3& v) : v_(v) {}
  Vec3 value(const Vec3&) const override { return v_; }
  Mat3 jacobian(const Vec3&) const override { return Mat3::Zero(); }
  ModelKind kind() const override { return ModelKind::ConstantField; }

 private:
  Vec3 v_;
};

/// (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).
class AbcFlow final : public VectorField3 {
 public:
  AbcFlow(double a, double b, double c) : a_(a), b_(b), c_(c) {}
  Vec3 value(const Vec3& x) const override;
  Mat3 jacobian(const Vec3& x) const override;
  ModelKind kind() const override { return ModelKind::ABCFlow; }

 private:
  double a_, b_, c_;
};

/// Suspension of the cat map [[2,1],[1,1]] over the circle z in R/Z:
///   X(u, z) = (s(z) h(z) G u - s'(z)/2 u, s(z)),  G = log [[2,1],[1,1]],
/// h = 1 + a cos 2 pi z, s = 1 + b cos 2 pi z. The orbit u = 0 is closed with
/// speed s and period 1 / sqrt(1 - b^2); its return map is the cat map.
class SuspensionCatMap final : public VectorField3 {
 public:
  explicit SuspensionCatMap(double a = 0, double b = 0);
  Vec3 value(const Vec3& x) const override;
  Mat3 jacobian(const Vec3& x) const override;
  ModelKind kind() const override { return ModelKind::SuspensionCatMap; }
  Vec3 difference(const Vec3& a, const Vec3& b) const override;

  static Mat2 cat();
  static Mat2 generator();
  double orbit_period() const;

 private:
  double a_, b_;
};

/// max |div X| on an n^3 grid over [0, side)^3, from the analytic Jacobian.
double max_divergence(const VectorField3& field, int n = 20, double side = 1);

struct FlowOptions {
  double step = 1e-3;
  double tol_speed = 1e-10;
};

struct TangentState {
  Vec3 x;
  Mat3 u;
};

/// Joint RK4 for x' = X(x), U' = DX(x) U. Throws SingularityEncountered.
TangentState integrate_tangent(const VectorField3& field, const Vec3& x, double t,
                               const FlowOptions& opts = {});
Vec3 flow_map(const VectorField3& field, const Vec3& x, double t, const FlowOptions& opts = {});
Mat3 tangent_flow(const VectorField3& field, const Vec3& x, double t,
                  const FlowOptions& opts = {});

/// Orthonormal (e1, e2) with (e1, e2, X/|X|) right-handed.
Mat32 normal_basis(const Vec3& v);

struct PoincareMap {
  Mat2 matrix;     // in orthonormal normal bases at x and X^t(x)
  double det = 0;
  double volume_residual = 0;  // | |det| |X(X^t x)| - |X(x)| | / |X(x)|
  Vec3 end;
};

PoincareMap linear_poincare(const VectorField3& field, const Vec3& x, double t,
                            const FlowOptions& opts = {});

struct OrbitSegment {
  std::vector<double> times;
  std::vector<Vec3> points;
  std::vector<Mat3> tangent;  // DX^{t_k}(x_0)
  double duration = 0;
  double closure = 0;         // |x(duration) - x(0)| modulo periodic coordinates
  double max_speed_error = 0;  // |gamma' - X(gamma)| by central differences
};

OrbitSegment integrate_orbit(const VectorField3& field, const Vec3& x0, double duration,
                             double step = 1e-4);

struct TrivializationFrame {
  std::vector<Vec3> eta;  // |eta| = 1 / |gamma'|, normal to gamma'
  std::vector<Mat32> psi;  // columns eta, eta x gamma'
  double closure_angle = 0;
};

TrivializationFrame trivialize(const VectorField3& field, const OrbitSegment& orbit);

/// M_t(s) between orbit samples i <= j, expressed through psi.
Mat2 trivialized_poincare(const VectorField3& field, const OrbitSegment& orbit,
                          const TrivializationFrame& frame, std::size_t i, std::size_t j);

struct ExtractOptions {
  double step = 1e-4;     // orbit samples and central differences
  double segment = 1e-3;  // length of the constant pieces
  double tol_trace = 1e-6;
  double tol_reintegrate = 1e-5;
};

struct Extraction {
  PeriodicCocycle cocycle;
  Mat2 monodromy;                 // M_tau(0) from the 3D flow
  double trace_residual = 0;      // max |tr A| / 2 before projection
  double reintegration_residual = 0;
  double closure = 0;
};

/// Throws ExtractionResidualTooLarge.
Extraction extract_cocycle(const VectorField3& field, const Vec3& x0, double period,
                           const ExtractOptions& opts = {});

}  // namespace sl2lab

#endif  // SL2LAB_FLOW3D_HPP
