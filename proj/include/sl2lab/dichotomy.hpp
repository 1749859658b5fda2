#ifndef SL2LAB_DICHOTOMY_HPP
#define SL2LAB_DICHOTOMY_HPP

// Four-way classification of a periodic cocycle under perturbations of size
// epsilon: elliptic already, made elliptic through a small angle, made
// elliptic by breaking domination, or dominated.

#include <optional>
#include <string>
#include <vector>

#include "sl2lab/perturbation.hpp"

namespace sl2lab {

enum class DichotomyCase { AlreadyElliptic, SmallAngle, DominationBreak, Dominated, Inconclusive };

const char* to_string(DichotomyCase c);

struct DichotomyVerdict {
  DichotomyCase kind = DichotomyCase::Inconclusive;
  std::string message;
  double theta = 0;
  int m = 0;
  int T = 0;
  double trace_before = 0;
  double trace_after = 0;
  double sup_norm = 0;
  double min_angle = 0;
  double sigma = 1;
  std::vector<int> searched;
  std::optional<DominationReport> domination;
  std::optional<Certificate> cert;
  PeriodicCocycle result;
};

/// Largest invariant-line angle the small-angle case accepts for epsilon.
double small_angle_threshold(const CoefficientPath& path, double epsilon);

DichotomyVerdict analyze(const PeriodicCocycle& p, double epsilon, int m_max,
                         const PerturbationTolerances& tol = {});

}  // namespace sl2lab

#endif  // SL2LAB_DICHOTOMY_HPP
