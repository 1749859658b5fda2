#ifndef SL2LAB_COCYCLE_HPP
#define SL2LAB_COCYCLE_HPP

// Time-dependent traceless coefficient paths A(t) and the unimodular
// fundamental solutions of u' = A(t) u.

#include <limits>
#include <memory>
#include <vector>

#include "sl2lab/bump.hpp"
#include "sl2lab/sl2.hpp"

namespace sl2lab {

struct IntegratorOptions {
  double step = 1e-3;          // fixed RK4 step
  double tol_det = 1e-9;       // accepted |det - 1| of a fundamental solution
  double tol_coc = 1e-7;       // accepted cocycle identity residual
  double max_step_drift = 1e-4;  // per-step |det - 1| before renormalization
};

enum class Entry { A, B, C };

/// Constant traceless value on [t0, t1).
struct Segment {
  double t0 = 0;
  double t1 = 0;
  TracelessMatrix value;
};

/// amp * cos(freq * t + phase) added to one entry of [[a, b], [c, -a]] while
/// t lies in [t0, t1).
struct TrigTerm {
  Entry entry = Entry::A;
  double amp = 0;
  double freq = 0;
  double phase = 0;
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();

  double value(double t) const;
};

enum class ModifierKind { RightFactor, LeftFactor, HyperbolicFactor };

const char* to_string(ModifierKind kind);

/// Perturbation supported on the unit window [start, start + 1].
///  RightFactor:      Phi'(s0+1, s0) = Phi(s0+1, s0) * exp(Q)
///  LeftFactor:       Phi'(s0+1, s0) = exp(Q) * Phi(s0+1, s0)
///  HyperbolicFactor: RightFactor with generator scale * Q
struct WindowModifier {
  double start = 0;
  ModifierKind kind = ModifierKind::RightFactor;
  TracelessMatrix generator;
  double scale = 1;

  double end() const { return start + 1; }
  TracelessMatrix effective_generator() const;
};

class CoefficientPath {
 public:
  CoefficientPath() = default;
  CoefficientPath(double duration, std::vector<Segment> segments,
                  std::vector<TrigTerm> trig = {});

  static CoefficientPath constant(double duration, const TracelessMatrix& value);
  static CoefficientPath zero(double duration) { return constant(duration, {}); }

  double duration() const { return duration_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const std::vector<TrigTerm>& trig() const { return trig_; }
  std::vector<WindowModifier> modifiers() const;
  std::size_t modifier_count() const { return modifiers_.size(); }

  /// Estimated sup ||base(t)|| over a 64-per-unit grid plus breakpoints.
  double bound() const { return bound_; }

  /// Unperturbed layer (segments + trig).
  TracelessMatrix base(double t) const;

  /// Full coefficient including the window modifiers. OutOfDomain outside
  /// [0, duration].
  TracelessMatrix evaluate(double t) const;

  /// True when [start, start+1] fits in [0, duration] and misses every window.
  bool window_free(double start) const;

  /// Adds a modifier. Throws WindowOverlap / OutOfDomain.
  CoefficientPath with_modifier(const WindowModifier& mod,
                                const IntegratorOptions& opts = {}) const;

  /// Cyclic shift: the returned path at time t equals this path at (t + q) mod
  /// duration. Windows may not straddle q.
  CoefficientPath rebased(double q, const IntegratorOptions& opts = {}) const;

  /// Sorted breakpoints strictly inside (a, b).
  std::vector<double> breakpoints_between(double a, double b) const;

  // Integration internals.
  struct ModifierState {
    WindowModifier spec;
    std::shared_ptr<const std::vector<Mat2>> base_nodes;  // Phi_base(s0 + i/N, s0)
  };
  const std::vector<ModifierState>& modifier_states() const { return modifiers_; }
  const ModifierState* modifier_at(double t) const;
  Mat2 window_base_transport(const ModifierState& mod, double t,
                             const IntegratorOptions& opts) const;

 private:
  void rebuild_index();

  double duration_ = 0;
  std::vector<Segment> segments_;
  std::vector<TrigTerm> trig_;
  std::vector<ModifierState> modifiers_;
  std::vector<double> breaks_;
  double bound_ = 0;
};

/// Phi(t, s) for any ordering of s and t (backward when t < s). Classical RK4
/// with fixed step; each step propagator is rescaled to determinant one.
Mat2 transport(const CoefficientPath& path, double s, double t,
               const IntegratorOptions& opts = {});

/// Same, ignoring the window modifiers.
Mat2 base_transport(const CoefficientPath& path, double s, double t,
                    const IntegratorOptions& opts = {});

/// Phi(t, s) with 0 <= s <= t <= duration.
UnimodularMatrix fundamental_solution(const CoefficientPath& path, double s, double t,
                                      const IntegratorOptions& opts = {});

Direction propagate_direction(const CoefficientPath& path, const Direction& d, double s,
                              double t, const IntegratorOptions& opts = {});

/// Node values Phi(t_k, 0) on a uniform grid; other times integrate from the
/// nearest node below.
class FundamentalSolutionCache {
 public:
  FundamentalSolutionCache(const CoefficientPath& path, double grid_step,
                           const IntegratorOptions& opts = {});

  double grid_step() const { return grid_step_; }
  const std::vector<Mat2>& nodes() const { return nodes_; }
  Mat2 at(double t) const;
  /// Phi(t, s) = Phi(t, 0) Phi(s, 0)^{-1}
  Mat2 between(double s, double t) const;

 private:
  CoefficientPath path_;
  IntegratorOptions opts_;
  double grid_step_;
  std::vector<Mat2> nodes_;
};

}  // namespace sl2lab

#endif  // SL2LAB_COCYCLE_HPP
