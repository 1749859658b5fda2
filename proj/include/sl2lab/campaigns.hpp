#ifndef SL2LAB_CAMPAIGNS_HPP
#define SL2LAB_CAMPAIGNS_HPP

// Randomized property suites behind `sl2lab verify`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sl2lab/scenario.hpp"

namespace sl2lab {

struct PropertyStat {
  std::string name;
  long checked = 0;
  long failed = 0;
  double max_value = 0;
  double tol = 0;
};

struct SuiteResult {
  std::string suite;
  long samples = 0;
  std::vector<PropertyStat> properties;
  double seconds = 0;

  long failures() const;
  bool pass() const { return failures() == 0; }
};

struct CampaignOptions {
  std::uint64_t seed = 1;
  long samples = 0;  // 0 selects the suite default
  IntegratorOptions integ;
  unsigned threads = 0;  // 0 uses the hardware concurrency
};

std::vector<std::string> suite_names();

/// nullopt for an unknown suite.
std::optional<SuiteResult> run_suite(const std::string& name, const CampaignOptions& opts = {});

/// Hyperbolic A = V diag(sigma, 1/sigma) V^{-1} (sign of the trace random)
/// with |tr| in [2 + min_gap, max_trace] and eigenline angle >= min_angle.
UnimodularMatrix random_hyperbolic(Rng& rng, double min_gap = 1e-6, double max_trace = 100,
                                   double min_angle = 1e-3);

/// Traceless matrix with operator norm one.
TracelessMatrix random_unit_traceless(Rng& rng);

/// Seed of sample i, independent of how samples are spread over threads.
std::uint64_t sample_seed(std::uint64_t seed, std::uint64_t i);

}  // namespace sl2lab

#endif  // SL2LAB_CAMPAIGNS_HPP
