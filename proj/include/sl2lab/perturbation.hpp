#ifndef SL2LAB_PERTURBATION_HPP
#define SL2LAB_PERTURBATION_HPP

// Local perturbations of periodic cocycles on unit windows, each returning
// the perturbed cocycle and a certificate of its post-conditions.

#include "sl2lab/certificate.hpp"
#include "sl2lab/splitting.hpp"

namespace sl2lab {

/// Largest ||S - I|| whose logarithm keeps the right-factor perturbation
/// 2 e^{2C} ||log S|| within epsilon: ||log S|| <= -log(1 - ||S - I||).
double factor_bound(double C, double epsilon);

struct PerturbationBudget {
  double epsilon = 0;
  double theta = 0;
  double C = 0;
  double delta = 0;
  double j = 0;
  int m = 1;
  double K = 0;
  double alpha = 0;
  int T = 2;

  /// C defaults to the sup of |A| over the path (windows have length one).
  static PerturbationBudget make(double epsilon, double theta, double C, int m);
  static PerturbationBudget for_path(const CoefficientPath& path, double epsilon,
                                     double theta, int m);
  PerturbationBudget scaled(double fraction) const;
};

struct PerturbationTolerances {
  double factor = 1e-7;     // relative factor-equation residual
  double direction = 1e-5;  // exchange end-point angle
  double identity = 1e-5;   // ||M -+ I|| after the hyperbolic stage
  double root = 1e-10;      // scalar bisections
  int max_iter = 200;
  double cls = 1e-9;
};

struct PerturbationResult {
  PeriodicCocycle cocycle;
  Certificate cert;
};

PerturbationResult insert_factor_right(const PeriodicCocycle& p, double s0,
                                       const UnimodularMatrix& s,
                                       const PerturbationBudget& budget,
                                       const PerturbationTolerances& tol = {});

PerturbationResult insert_factor_left(const PeriodicCocycle& p, double s0,
                                      const UnimodularMatrix& s,
                                      const PerturbationBudget& budget,
                                      const PerturbationTolerances& tol = {});

/// Monodromy based at `base` becomes M R_xi, or R_xi M with at_end. Large
/// angles are split over several free windows, each factor within delta.
PerturbationResult compose_rotation(const PeriodicCocycle& p, double xi, bool at_end,
                                    const PerturbationBudget& budget, double base = 0,
                                    const PerturbationTolerances& tol = {});

/// Rotates Nu onto Ns where the invariant lines are closest.
PerturbationResult small_angle_ellipticize(const PeriodicCocycle& p,
                                           const PerturbationBudget& budget,
                                           const PerturbationTolerances& tol = {});

/// ||exp(Q) - I|| for Q with eigenvalues +-alpha on (1,0) and (cos theta, sin theta).
double rho(double theta, double alpha, double tol_ang = 1e-12);
double rho_inverse(double theta, double delta, double tol = 1e-10, int max_iter = 200);

/// Right rotations on [q + i, q + i + 1], i < m, so that Nu(q) lands on Ns(q + m).
PerturbationResult exchange_directions(const PeriodicCocycle& p, const SplittingFrame& frame,
                                       double q, const PerturbationBudget& budget,
                                       const PerturbationTolerances& tol = {});

/// Theta_p(s) = psi_u(p) + psi_u(p + m) - 2 psi_u(p - s) - log sigma.
double theta_balance(const PeriodicCocycle& p, const SplittingFrame& frame, double witness,
                     int m, double s);

/// Root of theta_balance on [0, tau - m]. Throws NoRootBracket.
double theta_root(const PeriodicCocycle& p, const SplittingFrame& frame, double witness,
                  int m, double tol = 1e-10, int max_iter = 200);

struct TameResult {
  PeriodicCocycle cocycle;  // same time frame as the input
  Certificate cert;
  double q = 0;             // base point where the monodromy is tame
  double witness = 0;
  double s = 0;
  bool unchanged = false;
};

TameResult tame_norm(const PeriodicCocycle& p, const SplittingFrame& frame,
                     const PerturbationBudget& budget, const PerturbationTolerances& tol = {});

struct EllipticizeResult {
  PeriodicCocycle cocycle;  // re-based at q
  Certificate cert;
  double q = 0;
  double t0 = 0;
  int windows = 0;
};

EllipticizeResult ellipticize_long_orbit(const PeriodicCocycle& p,
                                         const PerturbationBudget& budget,
                                         const PerturbationTolerances& tol = {});

}  // namespace sl2lab

#endif  // SL2LAB_PERTURBATION_HPP
