#include "sl2lab/serialize.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace sl2lab {

namespace {

const char* entry_name(Entry e) {
  switch (e) {
    case Entry::A: return "a";
    case Entry::B: return "b";
    case Entry::C: return "c";
  }
  return "?";
}

Entry entry_from(const Json& j) {
  const auto s = j.get<std::string>();
  if (s == "a") return Entry::A;
  if (s == "b") return Entry::B;
  if (s == "c") return Entry::C;
  fail(ErrorCode::ParseError, "trig entry must be \"a\", \"b\" or \"c\"");
}

ModifierKind kind_from(const std::string& s) {
  for (auto k : {ModifierKind::RightFactor, ModifierKind::LeftFactor, ModifierKind::HyperbolicFactor}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorCode::ParseError, "unknown modifier kind " + s);
}

TracelessMatrix traceless_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorCode::ParseError, "matrix must be [a, b, c]");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <typename F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

Json to_json(const TracelessMatrix& m) { return Json::array({m.a, m.b, m.c}); }

Json to_json(const Mat2& m) {
  return Json::array({Json::array({m(0, 0), m(0, 1)}), Json::array({m(1, 0), m(1, 1)})});
}

Json to_json(const CoefficientPath& path) {
  Json j;
  j["duration"] = path.duration();
  j["segments"] = Json::array();
  for (const auto& s : path.segments()) {
    j["segments"].push_back({{"t0", s.t0}, {"t1", s.t1}, {"matrix", to_json(s.value)}});
  }
  j["trig"] = Json::array();
  for (const auto& t : path.trig()) {
    Json tj{{"entry", entry_name(t.entry)}, {"freq", t.freq}, {"amp", t.amp}};
    if (t.phase != 0) tj["phase"] = t.phase;
    if (std::isfinite(t.t0)) tj["t0"] = t.t0;
    if (std::isfinite(t.t1)) tj["t1"] = t.t1;
    j["trig"].push_back(tj);
  }
  j["modifiers"] = Json::array();
  for (const auto& m : path.modifiers()) {
    j["modifiers"].push_back({{"start", m.start},
                              {"kind", to_string(m.kind)},
                              {"q", to_json(m.generator)},
                              {"scale", m.scale}});
  }
  return j;
}

CoefficientPath path_from_json(const Json& j, const IntegratorOptions& opts) {
  if (!j.is_object()) fail(ErrorCode::ParseError, "path must be a JSON object");
  std::vector<Segment> segs;
  std::vector<TrigTerm> trig;
  std::vector<WindowModifier> mods;
  const double duration = guarded([&] {
    for (const auto& s : j.at("segments")) {
      segs.push_back({s.at("t0").get<double>(), s.at("t1").get<double>(),
                      traceless_from(s.at("matrix"))});
    }
    if (j.contains("trig")) {
      for (const auto& t : j.at("trig")) {
        TrigTerm term;
        term.entry = entry_from(t.at("entry"));
        term.freq = t.at("freq").get<double>();
        term.amp = t.at("amp").get<double>();
        term.phase = t.value("phase", 0.0);
        if (t.contains("t0")) term.t0 = t.at("t0").get<double>();
        if (t.contains("t1")) term.t1 = t.at("t1").get<double>();
        trig.push_back(term);
      }
    }
    if (j.contains("modifiers")) {
      for (const auto& m : j.at("modifiers")) {
        WindowModifier w;
        w.start = m.at("start").get<double>();
        w.kind = kind_from(m.at("kind").get<std::string>());
        w.generator = traceless_from(m.at("q"));
        w.scale = m.value("scale", 1.0);
        mods.push_back(w);
      }
    }
    return j.at("duration").get<double>();
  });
  CoefficientPath path(duration, std::move(segs), std::move(trig));
  for (const auto& m : mods) path = path.with_modifier(m, opts);
  return path;
}

Json to_json(const Certificate& c) {
  Json j;
  j["lemma"] = c.lemma;
  j["windows"] = Json::array();
  for (const auto& w : c.windows) {
    j["windows"].push_back(
        {{"start", w.start}, {"kind", to_string(w.kind)}, {"q", to_json(w.q)}, {"norm", w.norm}});
  }
  j["sup_norm"] = c.sup_norm;
  j["residuals"] = Json::object();
  for (const auto& r : c.residuals) {
    j["residuals"][r.name] = {{"value", finite_or_null(r.value)}, {"tol", r.tol}};
  }
  j["verdict"] = c.verdict();
  j["children"] = Json::array();
  for (const auto& ch : c.children) j["children"].push_back(to_json(ch));
  return j;
}

Json to_json(const PerturbationBudget& b) {
  return {{"epsilon", b.epsilon}, {"theta", b.theta}, {"C", b.C}, {"delta", b.delta},
          {"j", b.j},             {"m", b.m},         {"K", b.K}, {"alpha", b.alpha},
          {"T", b.T}};
}

Json to_json(const ScenarioSpec& s) {
  Json j{{"generator", to_string(s.generator)}};
  switch (s.generator) {
    case Generator::ConstantHyperbolic:
      j["lambda"] = s.lambda;
      j["tau"] = s.tau;
      break;
    case Generator::RotatedConjugation:
      j["lambda"] = s.lambda;
      j["omega"] = s.omega;
      j["tau"] = s.tau;
      break;
    case Generator::TrigRandom:
      j["seed"] = s.seed;
      j["tau"] = s.tau;
      j["c_bound"] = s.c_bound;
      j["terms"] = s.terms;
      break;
    case Generator::NearParabolic:
      j["trace_target"] = s.trace_target;
      j["beta"] = s.beta;
      j["tau"] = s.tau;
      break;
    case Generator::SuspensionExtract:
      j["a"] = s.mod_a;
      j["b"] = s.mod_b;
      break;
  }
  if (!s.hint.empty()) j["hint"] = s.hint;
  return j;
}

ScenarioSpec spec_from_json(const Json& j) {
  return guarded([&] {
    ScenarioSpec s;
    const auto g = generator_from_string(j.at("generator").get<std::string>());
    if (!g) fail(ErrorCode::InvalidSpec, "unknown generator");
    s.generator = *g;
    s.lambda = j.value("lambda", s.lambda);
    s.omega = j.value("omega", s.omega);
    s.tau = j.value("tau", s.tau);
    s.seed = j.value("seed", s.seed);
    s.c_bound = j.value("c_bound", s.c_bound);
    s.terms = j.value("terms", s.terms);
    s.trace_target = j.value("trace_target", s.trace_target);
    s.beta = j.value("beta", s.beta);
    s.mod_a = j.value("a", s.mod_a);
    s.mod_b = j.value("b", s.mod_b);
    s.hint = j.value("hint", s.hint);
    return s;
  });
}

Json to_json(const DominationReport& r, bool with_profile) {
  Json j{{"m", r.m},
         {"dominated", r.dominated},
         {"max_ratio", r.max_ratio},
         {"witness_count", r.witnesses.size()}};
  if (!r.witnesses.empty()) j["first_witness"] = r.witnesses.front();
  if (with_profile) {
    j["times"] = r.times;
    j["ratio"] = r.ratio;
  }
  return j;
}

Json to_json(const DichotomyVerdict& v) {
  Json j{{"kind", to_string(v.kind)},
         {"theta", v.theta},
         {"m", v.m},
         {"T", v.T},
         {"trace_before", v.trace_before},
         {"trace_after", v.trace_after},
         {"sup_norm", v.sup_norm},
         {"min_angle", v.min_angle},
         {"sigma", v.sigma},
         {"searched", v.searched}};
  if (!v.message.empty()) j["message"] = v.message;
  if (v.domination) j["domination"] = to_json(*v.domination);
  if (v.cert) j["certificate"] = to_json(*v.cert);
  return j;
}

Json to_json(const IntegratorOptions& o) {
  return {{"step", o.step},
          {"tol_det", o.tol_det},
          {"tol_coc", o.tol_coc},
          {"max_step_drift", o.max_step_drift}};
}

Json to_json(const PerturbationTolerances& t) {
  return {{"factor", t.factor},     {"direction", t.direction}, {"identity", t.identity},
          {"root", t.root},         {"max_iter", t.max_iter},   {"cls", t.cls}};
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorCode::ParseError, e.what());
  }
}

Json read_json_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorCode::ParseError, "cannot open " + file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str());
}

CoefficientPath read_path_file(const std::string& file, const IntegratorOptions& opts) {
  return path_from_json(read_json_file(file), opts);
}

Json splitting_summary(const PeriodicCocycle& p, const SplittingFrame& f, int m_max) {
  const auto k = min_angle_index(f);
  Json j{{"trace", f.trace},
         {"sigma", f.sigma},
         {"lambda_u", std::log(std::abs(f.sigma)) / p.period()},
         {"min_angle", f.angle[k]},
         {"min_angle_time", f.times[k]},
         {"closure_residual", f.closure_residual},
         {"consistency_residual", f.consistency_residual},
         {"samples", f.times.size()}};
  const auto m = min_domination_time(p, f, m_max);
  j["domination_time"] = m ? Json(*m) : Json(nullptr);
  j["m_max"] = m_max;
  return j;
}

bool all_finite(const Json& j) {
  if (j.is_number_float()) return std::isfinite(j.get<double>());
  if (j.is_structured()) {
    for (const auto& x : j) {
      if (!all_finite(x)) return false;
    }
  }
  return true;
}

}  // namespace sl2lab
