#ifndef SL2LAB_CERTIFICATE_HPP
#define SL2LAB_CERTIFICATE_HPP

// Record of a perturbation: inserted windows, measured perturbation size and
// the residuals of every post-condition, each with its tolerance.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sl2lab/cocycle.hpp"

namespace sl2lab {

struct Residual {
  std::string name;
  double value = 0;
  double tol = 0;

  bool ok() const { return value <= tol; }
};

struct WindowRecord {
  double start = 0;
  ModifierKind kind = ModifierKind::RightFactor;
  TracelessMatrix q;
  double norm = 0;  // op norm of the effective generator
};

struct Certificate {
  std::string lemma;
  std::vector<WindowRecord> windows;
  double sup_norm = 0;
  std::vector<Residual> residuals;
  std::vector<Certificate> children;

  // Paths the residuals refer to, kept for re-verification.
  std::shared_ptr<const CoefficientPath> before;
  std::shared_ptr<const CoefficientPath> after;

  // Optional checks replayed by reverify().
  double sup_bound = -1;                 // sup ||after - before|| must not exceed
  bool expect_elliptic = false;          // final monodromy with |tr| < 2
  std::optional<double> norm_cap;        // op_norm(monodromy based at cap_base) < cap
  double cap_base = 0;

  void add(std::string name, double value, double tol) {
    residuals.push_back({std::move(name), value, tol});
  }
  const Residual* find(const std::string& name) const;
  bool pass() const;
  const char* verdict() const { return pass() ? "Pass" : "Fail"; }
};

struct VerifyOptions {
  IntegratorOptions integ;
  double tol_factor = 1e-7;  // relative factor-equation residual
  double grid = 1.0 / 256;   // spacing of the sup-norm grid
  double tol_cls = 1e-9;
};

/// sup ||after(t) - before(t)|| over a uniform grid plus window interiors.
double measure_sup_norm(const CoefficientPath& before, const CoefficientPath& after,
                        double grid = 1.0 / 256);

/// ||Phi'(s0+1, s0) - Phi(s0+1, s0) S|| / ||Phi(s0+1, s0)|| for a right-type
/// window, with S on the left for a left window.
double factor_residual(const CoefficientPath& before, const CoefficientPath& after,
                       const WindowModifier& window, const IntegratorOptions& opts = {});

std::vector<WindowRecord> new_windows(const CoefficientPath& before,
                                      const CoefficientPath& after);

/// Recomputes every replayable residual from the stored paths, recursively.
Certificate reverify(const Certificate& cert, const VerifyOptions& opts = {});

}  // namespace sl2lab

#endif  // SL2LAB_CERTIFICATE_HPP
