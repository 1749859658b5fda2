#ifndef SL2LAB_SCENARIO_HPP
#define SL2LAB_SCENARIO_HPP

// Seeded generators of periodic cocycles and the bundled scenario corpus.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sl2lab/splitting.hpp"

namespace sl2lab {

/// Uniform doubles from mt19937_64 with a fixed bit mapping, so a seed gives
/// the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

enum class Generator {
  ConstantHyperbolic,
  RotatedConjugation,
  TrigRandom,
  NearParabolic,
  SuspensionExtract,
};

const char* to_string(Generator g);
std::optional<Generator> generator_from_string(const std::string& s);

struct ScenarioSpec {
  Generator generator = Generator::ConstantHyperbolic;
  double lambda = 0.1;
  double omega = 0.5;
  double tau = 40;
  std::uint64_t seed = 1;
  double c_bound = 1;            // TrigRandom: sup of |A| is kept below this
  int terms = 3;                 // TrigRandom: number of cosine terms
  double trace_target = 2.0001;  // NearParabolic
  double beta = 0.01;            // NearParabolic: angle between eigenlines
  double mod_a = 0;              // SuspensionExtract: fiber rate modulation
  double mod_b = 0;              // SuspensionExtract: speed modulation
  std::string hint;
};

/// Throws InvalidSpec.
PeriodicCocycle generate(const ScenarioSpec& spec, const IntegratorOptions& integ = {});

/// Constant lambda V diag(1, -1) V^{-1}, eigenlines at angle beta.
TracelessMatrix skewed_hyperbolic(double lambda, double beta);

struct CorpusEntry {
  std::string name;
  ScenarioSpec spec;
};

std::vector<CorpusEntry> bundled_corpus();

}  // namespace sl2lab

#endif  // SL2LAB_SCENARIO_HPP
