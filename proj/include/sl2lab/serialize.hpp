#ifndef SL2LAB_SERIALIZE_HPP
#define SL2LAB_SERIALIZE_HPP

// JSON forms of paths, certificates, verdicts and reports. Parsing failures
// raise ParseError.

#include <json.hpp>

#include <string>

#include "sl2lab/dichotomy.hpp"
#include "sl2lab/scenario.hpp"

namespace sl2lab {

using Json = nlohmann::ordered_json;

Json to_json(const TracelessMatrix& m);
Json to_json(const Mat2& m);
Json to_json(const CoefficientPath& path);
Json to_json(const Certificate& cert);
Json to_json(const PerturbationBudget& b);
Json to_json(const ScenarioSpec& s);
Json to_json(const DominationReport& r, bool with_profile = false);
Json to_json(const DichotomyVerdict& v);
Json to_json(const IntegratorOptions& o);
Json to_json(const PerturbationTolerances& t);

/// Modifiers are re-inserted in order; each one rebuilds its window cache.
CoefficientPath path_from_json(const Json& j, const IntegratorOptions& opts = {});
ScenarioSpec spec_from_json(const Json& j);

Json parse_json(const std::string& text);
Json read_json_file(const std::string& file);
CoefficientPath read_path_file(const std::string& file, const IntegratorOptions& opts = {});

/// Diagnostics of a splitting: spectrum, angles, exponent, domination times.
Json splitting_summary(const PeriodicCocycle& p, const SplittingFrame& f, int m_max);

/// True when every number in the document is finite.
bool all_finite(const Json& j);

}  // namespace sl2lab

#endif  // SL2LAB_SERIALIZE_HPP
