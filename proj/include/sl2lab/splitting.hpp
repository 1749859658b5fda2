#ifndef SL2LAB_SPLITTING_HPP
#define SL2LAB_SPLITTING_HPP

// Diagnostics of a periodic cocycle: monodromy, the invariant hyperbolic
// splitting along the period, angle profile and domination ratios.

#include <iosfwd>
#include <optional>
#include <vector>

#include "sl2lab/cocycle.hpp"

namespace sl2lab {

/// A coefficient path read cyclically, A(t + tau) = A(t).
struct PeriodicCocycle {
  CoefficientPath path;
  int samples_per_unit = 64;
  IntegratorOptions integ;

  double period() const { return path.duration(); }
};

/// Invariant lines Nu, Ns on the sample grid t_k = k / samples_per_unit
/// (plus tau), with the log-stretches of unit vectors taken at t = 0:
///   psi_u(t) = log |Phi(t, 0) u|,  psi_s(t) = log |Phi(t, 0) s|.
struct SplittingFrame {
  std::vector<double> times;
  std::vector<Direction> unstable;
  std::vector<Direction> stable;
  std::vector<double> angle;
  std::vector<double> psi_u;
  std::vector<double> psi_s;
  std::vector<Mat2> steps;  // Phi(t_{k+1}, t_k)
  double sigma = 1;
  double trace = 0;
  double closure_residual = 0;      // |psi_u(tau) - log sigma| vs |psi_s(0)|
  double consistency_residual = 0;  // worst angle against local eigenlines

  double period() const { return times.back(); }
  std::size_t index_below(double t) const;
};

struct DominationReport {
  int m = 1;
  std::vector<double> times;
  std::vector<double> ratio;     // |P^m on Ns(t)| / |P^m on Nu(t)|
  std::vector<double> witnesses;  // times with ratio >= 1/2
  double max_ratio = 0;
  bool dominated = false;
};

UnimodularMatrix monodromy(const PeriodicCocycle& p);

/// Phi(q + tau, q) = Phi(q, 0) Phi(tau, q).
UnimodularMatrix monodromy_at(const PeriodicCocycle& p, double q);

/// Throws NotHyperbolic, DegenerateSplitting, ConsistencyFailure.
SplittingFrame hyperbolic_splitting(const PeriodicCocycle& p, int checkpoints = 4,
                                    double tol_consistency = 1e-6);

/// Lines and log-stretches between grid points, and beyond tau by periodicity.
Direction unstable_at(const PeriodicCocycle& p, const SplittingFrame& f, double t);
Direction stable_at(const PeriodicCocycle& p, const SplittingFrame& f, double t);
double psi_u_at(const PeriodicCocycle& p, const SplittingFrame& f, double t);
double psi_s_at(const PeriodicCocycle& p, const SplittingFrame& f, double t);

/// r_m(t) = exp[(psi_s(t+m) - psi_s(t)) - (psi_u(t+m) - psi_u(t))].
double domination_ratio(const PeriodicCocycle& p, const SplittingFrame& f, int m, double t);

DominationReport domination_report(const PeriodicCocycle& p, const SplittingFrame& f, int m);

/// Smallest m in [1, m_max] with r_m <= 1/2 everywhere on the grid.
std::optional<int> min_domination_time(const PeriodicCocycle& p, const SplittingFrame& f,
                                       int m_max);

/// log(sigma) / tau, or 0 when the monodromy is not hyperbolic.
double upper_lyapunov(const PeriodicCocycle& p);

double min_angle(const SplittingFrame& f);
std::size_t min_angle_index(const SplittingFrame& f);

/// Columns t, angle, r_m.
void write_profile_csv(std::ostream& os, const SplittingFrame& f, const DominationReport& r);

}  // namespace sl2lab

#endif  // SL2LAB_SPLITTING_HPP
