#include "sl2lab/dichotomy.hpp"

#include <cmath>

namespace sl2lab {

const char* to_string(DichotomyCase c) {
  switch (c) {
    case DichotomyCase::AlreadyElliptic: return "AlreadyElliptic";
    case DichotomyCase::SmallAngle: return "SmallAngle";
    case DichotomyCase::DominationBreak: return "DominationBreak";
    case DichotomyCase::Dominated: return "Dominated";
    case DichotomyCase::Inconclusive: return "Inconclusive";
  }
  return "?";
}

double small_angle_threshold(const CoefficientPath& path, double epsilon) {
  // One window at the base point rotates by at most delta.
  return factor_bound(path.bound(), epsilon);
}

DichotomyVerdict analyze(const PeriodicCocycle& p, double epsilon, int m_max,
                         const PerturbationTolerances& tol) {
  DichotomyVerdict v;
  v.result = p;
  const auto mono = monodromy(p);
  v.trace_before = v.trace_after = mono.trace();
  if (!(epsilon > 0)) {
    v.message = "FactorTooLarge: empty perturbation budget (epsilon <= 0)";
    return v;
  }
  const auto cls = classify(mono, tol.cls);
  if (cls.kind == Spectrum::Elliptic) {
    v.kind = DichotomyCase::AlreadyElliptic;
    return v;
  }
  if (cls.kind == Spectrum::Parabolic) {
    v.message = "parabolic monodromy";
    return v;
  }

  try {
    const auto frame = hyperbolic_splitting(p);
    v.sigma = frame.sigma;
    v.min_angle = min_angle(frame);
    v.theta = small_angle_threshold(p.path, epsilon);
    if (!(v.theta > 0)) {
      v.message = "FactorTooLarge: empty perturbation budget";
      return v;
    }

    if (v.min_angle < v.theta) {
      const auto budget = PerturbationBudget::for_path(p.path, epsilon, v.theta, 1);
      auto res = small_angle_ellipticize(p, budget, tol);
      v.kind = DichotomyCase::SmallAngle;
      v.m = 0;
      v.result = res.cocycle;
      v.sup_norm = res.cert.sup_norm;
      v.trace_after = monodromy(res.cocycle).trace();
      v.cert = std::move(res.cert);
      return v;
    }

    for (int m = 1; m <= m_max; m *= 2) {
      v.searched.push_back(m);
      auto report = domination_report(p, frame, m);
      if (report.dominated) {
        v.kind = DichotomyCase::Dominated;
        v.m = m;
        v.domination = std::move(report);
        return v;
      }
    }

    std::string errors;
    for (int m : v.searched) {
      const auto budget = PerturbationBudget::for_path(p.path, epsilon, v.theta, m);
      try {
        auto res = ellipticize_long_orbit(p, budget, tol);
        v.kind = DichotomyCase::DominationBreak;
        v.m = m;
        v.T = budget.scaled(1.0 / 3).T;
        v.result = res.cocycle;
        v.sup_norm = res.cert.sup_norm;
        v.trace_after = monodromy(res.cocycle).trace();
        v.domination = domination_report(p, frame, m);
        v.cert = std::move(res.cert);
        return v;
      } catch (const Error& e) {
        if (!errors.empty()) errors += "; ";
        errors += "m=" + std::to_string(m) + ": " + e.what();
        v.T = budget.scaled(1.0 / 3).T;
      }
    }
    v.message = errors.empty() ? "no domination time searched" : errors;
  } catch (const Error& e) {
    v.message = e.what();
  }
  return v;
}

}  // namespace sl2lab
