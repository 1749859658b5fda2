// sl2lab: command-line front end. Exit codes: 0 ok, 1 runtime failure,
// 2 inconclusive verdict, 3 parse error, 4 usage error.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "sl2lab/campaigns.hpp"
#include "sl2lab/dichotomy.hpp"
#include "sl2lab/flow3d.hpp"
#include "sl2lab/serialize.hpp"

using namespace sl2lab;

namespace {

constexpr int kOk = 0, kRuntime = 1, kInconclusive = 2, kParse = 3, kUsage = 4;

struct Common {
  IntegratorOptions integ;
  PerturbationTolerances tol;
  int samples_per_unit = 64;
  std::string out;

  Json echo() const {
    return {{"integrator", to_json(integ)},
            {"tolerances", to_json(tol)},
            {"samples_per_unit", samples_per_unit}};
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--step", c.integ.step, "RK4 step")->capture_default_str();
  app->add_option("--tol-det", c.integ.tol_det, "accepted |det - 1|")->capture_default_str();
  app->add_option("--tol-coc", c.integ.tol_coc, "accepted cocycle identity residual")->capture_default_str();
  app->add_option("--tol-factor", c.tol.factor, "relative factor-equation residual")->capture_default_str();
  app->add_option("--tol-direction", c.tol.direction, "exchange end-point angle")->capture_default_str();
  app->add_option("--tol-identity", c.tol.identity, "identity residual after hyperbolic factors")->capture_default_str();
  app->add_option("--tol-root", c.tol.root, "scalar bisection tolerance")->capture_default_str();
  app->add_option("--tol-cls", c.tol.cls, "parabolic band around |tr| = 2")->capture_default_str();
  app->add_option("--samples-per-unit", c.samples_per_unit, "splitting grid density")->capture_default_str();
  app->add_option("-o,--out", c.out, "write the resulting path JSON here");
}

PeriodicCocycle load(const std::string& file, const Common& c) {
  PeriodicCocycle p;
  p.integ = c.integ;
  p.samples_per_unit = c.samples_per_unit;
  p.path = read_path_file(file, c.integ);
  return p;
}

void write_file(const std::string& file, const std::string& text) {
  std::ofstream os(file);
  if (!os) fail(ErrorCode::InvalidSpec, "cannot write " + file);
  os << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json monodromy_json(const UnimodularMatrix& m, double tol_cls) {
  const auto cls = classify(m, tol_cls);
  return {{"matrix", to_json(m.matrix())}, {"trace", m.trace()}, {"class", to_string(cls.kind)}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- scenario ----

struct ScenarioArgs {
  std::string generator = "ConstantHyperbolic";
  std::string spec_file;
  std::string name;
  bool list = false;
  ScenarioSpec spec;
};

int cmd_scenario(ScenarioArgs& a, const Common& c) {
  if (a.list) {
    Json j = Json::array();
    for (const auto& e : bundled_corpus()) j.push_back({{"name", e.name}, {"spec", to_json(e.spec)}});
    std::cout << dump(j);
    return kOk;
  }
  ScenarioSpec spec = a.spec;
  if (!a.name.empty()) {
    bool found = false;
    for (const auto& e : bundled_corpus()) {
      if (e.name == a.name) {
        spec = e.spec;
        found = true;
      }
    }
    if (!found) fail(ErrorCode::InvalidSpec, "no corpus scenario named " + a.name);
  } else if (!a.spec_file.empty()) {
    spec = spec_from_json(read_json_file(a.spec_file));
  } else {
    const auto g = generator_from_string(a.generator);
    if (!g) fail(ErrorCode::InvalidSpec, "unknown generator " + a.generator);
    spec.generator = *g;
  }
  const auto p = generate(spec, c.integ);
  const auto text = dump(to_json(p.path));
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_file(c.out, text);
  }
  return kOk;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::string input;
  int m_max = 64;
  std::string profile;
  int profile_m = 1;
};

int cmd_analyze(const AnalyzeArgs& a, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = load(a.input, c);
  Json r{{"command", "analyze"}, {"input", a.input}, {"options", c.echo()}};
  r["options"]["m_max"] = a.m_max;
  const auto mono = monodromy(p);
  r["monodromy"] = monodromy_json(mono, c.tol.cls);
  r["lambda_u"] = upper_lyapunov(p);
  const auto cls = classify(mono, c.tol.cls);
  if (cls.kind == Spectrum::Hyperbolic) {
    const auto f = hyperbolic_splitting(p);
    r["splitting"] = splitting_summary(p, f, a.m_max);
    if (!a.profile.empty()) {
      std::ofstream os(a.profile);
      write_profile_csv(os, f, domination_report(p, f, a.profile_m));
    }
  } else {
    r["diagnostics"] = cls.kind == Spectrum::Elliptic ? "AlreadyElliptic" : "Parabolic";
  }
  r["wall_time_s"] = seconds_since(t0);
  std::cout << dump(r);
  return kOk;
}

// ---- perturb ----

struct PerturbArgs {
  std::string input;
  double epsilon = 0.1;
  double theta = 0;  // 0: the small-angle threshold for epsilon
  int m = 1;
  double xi = 0.1;
  bool at_end = false;
  double base = 0;
  double s0 = 0;
  std::vector<double> q{0, 0, 0};
  bool left = false;
  double at = -1;  // exchange base point; < 0 picks the first domination witness
};

int cmd_perturb(const std::string& which, const PerturbArgs& a, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = load(a.input, c);
  const double theta = a.theta > 0 ? a.theta : small_angle_threshold(p.path, a.epsilon);
  if (!(theta > 0)) fail(ErrorCode::FactorTooLarge, "empty perturbation budget");
  const auto budget = PerturbationBudget::for_path(p.path, a.epsilon, std::min(theta, std::numbers::pi / 2), a.m);
  Json r{{"command", "perturb " + which}, {"input", a.input}, {"options", c.echo()}};
  r["options"]["epsilon"] = a.epsilon;
  r["options"]["m"] = a.m;
  r["budget"] = to_json(budget);
  r["trace_before"] = monodromy(p).trace();

  PeriodicCocycle result;
  Certificate cert;
  if (which == "rot") {
    auto res = compose_rotation(p, a.xi, a.at_end, budget, a.base, c.tol);
    result = res.cocycle;
    cert = res.cert;
  } else if (which == "insert") {
    if (a.q.size() != 3) fail(ErrorCode::InvalidSpec, "--q takes three numbers a b c");
    const auto s = exp_traceless(TracelessMatrix{a.q[0], a.q[1], a.q[2]});
    auto res = a.left ? insert_factor_left(p, a.s0, s, budget, c.tol)
                      : insert_factor_right(p, a.s0, s, budget, c.tol);
    result = res.cocycle;
    cert = res.cert;
  } else if (which == "exchange") {
    const auto f = hyperbolic_splitting(p);
    double q = a.at;
    if (q < 0) {
      const auto rep = domination_report(p, f, a.m);
      q = 0;
      for (double w : rep.witnesses) {
        if (w + a.m <= p.period()) {
          q = w;
          break;
        }
      }
    }
    r["q"] = q;
    auto res = exchange_directions(p, f, q, budget, c.tol);
    result = res.cocycle;
    cert = res.cert;
  } else if (which == "tame") {
    const auto f = hyperbolic_splitting(p);
    auto res = tame_norm(p, f, budget, c.tol);
    r["q"] = res.q;
    r["witness"] = res.witness;
    r["s"] = res.s;
    r["unchanged"] = res.unchanged;
    r["rebased_norm"] = op_norm(monodromy_at(res.cocycle, res.q).matrix());
    result = res.cocycle;
    cert = res.cert;
  } else {
    auto res = ellipticize_long_orbit(p, budget, c.tol);
    r["q"] = res.q;
    r["t0"] = res.t0;
    r["hyperbolic_windows"] = res.windows;
    result = res.cocycle;
    cert = res.cert;
  }
  r["trace_after"] = monodromy(result).trace();
  r["certificate"] = to_json(cert);
  r["reverified"] = reverify(cert, {c.integ, c.tol.factor, 1.0 / 256, c.tol.cls}).verdict();
  r["wall_time_s"] = seconds_since(t0);
  if (!c.out.empty()) write_file(c.out, dump(to_json(result.path)));
  std::cout << dump(r);
  return cert.pass() ? kOk : kRuntime;
}

// ---- dichotomy ----

struct DichotomyArgs {
  std::string input;
  double epsilon = 0.1;
  int m_max = 16;
};

int cmd_dichotomy(const DichotomyArgs& a, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = load(a.input, c);
  Json r{{"command", "dichotomy"}, {"input", a.input}, {"options", c.echo()}};
  r["options"]["epsilon"] = a.epsilon;
  r["options"]["m_max"] = a.m_max;
  const auto v = analyze(p, a.epsilon, a.m_max, c.tol);
  r["verdict"] = to_json(v);
  if (v.cert) r["reverified"] = reverify(*v.cert, {c.integ, c.tol.factor, 1.0 / 256, c.tol.cls}).verdict();
  r["wall_time_s"] = seconds_since(t0);
  if (!c.out.empty()) write_file(c.out, dump(to_json(v.result.path)));
  std::cout << dump(r);
  return v.kind == DichotomyCase::Inconclusive ? kInconclusive : kOk;
}

// ---- verify ----

struct VerifyArgs {
  std::string suite;
  std::uint64_t seed = 1;
  long samples = 0;
  unsigned threads = 0;
};

int cmd_verify(const VerifyArgs& a, const Common& c) {
  CampaignOptions o;
  o.seed = a.seed;
  o.samples = a.samples;
  o.integ = c.integ;
  o.threads = a.threads;
  const auto res = run_suite(a.suite, o);
  if (!res) {
    std::cerr << "unknown suite " << a.suite << "; known:";
    for (const auto& n : suite_names()) std::cerr << ' ' << n;
    std::cerr << '\n';
    return kUsage;
  }
  Json r{{"command", "verify"}, {"suite", res->suite}, {"options", c.echo()}};
  r["options"]["seed"] = a.seed;
  r["options"]["samples"] = a.samples;
  r["samples"] = res->samples;
  r["properties"] = Json::array();
  for (const auto& p : res->properties) {
    r["properties"].push_back({{"name", p.name},
                               {"checked", p.checked},
                               {"failed", p.failed},
                               {"max", p.max_value},
                               {"tol", p.tol}});
  }
  r["failures"] = res->failures();
  r["verdict"] = res->pass() ? "Pass" : "Fail";
  r["wall_time_s"] = res->seconds;
  std::cout << dump(r);
  return res->pass() ? kOk : kRuntime;
}

// ---- extract3d ----

struct ExtractArgs {
  std::string model = "suspension";
  std::vector<double> params{0, 0};
  int orbit_id = 0;
  double period = 0;
  std::string spec_file;
  ExtractOptions ex;
};

int cmd_extract3d(ExtractArgs a, const Common& c) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!a.spec_file.empty()) {
    const auto j = read_json_file(a.spec_file);
    try {
      a.model = j.at("model").get<std::string>();
      if (j.contains("params")) a.params = j.at("params").get<std::vector<double>>();
      a.orbit_id = j.value("orbit_id", 0);
      a.period = j.value("period", 0.0);
    } catch (const Json::exception& e) {
      fail(ErrorCode::ParseError, e.what());
    }
  }
  if (a.model != "suspension") {
    fail(ErrorCode::InvalidSpec, "closed orbits are known analytically only for the suspension model");
  }
  if (a.orbit_id != 0) fail(ErrorCode::InvalidSpec, "the suspension model has one closed orbit, id 0");
  a.params.resize(2, 0.0);
  const SuspensionCatMap field(a.params[0], a.params[1]);
  const double period = a.period > 0 ? a.period : field.orbit_period();
  const auto ex = extract_cocycle(field, Vec3(0, 0, 0), period, a.ex);
  Json r{{"command", "extract3d"}, {"options", c.echo()}};
  r["model"] = {{"model", a.model}, {"params", a.params}, {"orbit_id", a.orbit_id}, {"period", period}};
  r["extract_options"] = {{"step", a.ex.step},
                          {"segment", a.ex.segment},
                          {"tol_trace", a.ex.tol_trace},
                          {"tol_reintegrate", a.ex.tol_reintegrate}};
  r["divergence"] = max_divergence(field);
  r["closure"] = ex.closure;
  r["trace_residual"] = ex.trace_residual;
  r["reintegration_residual"] = ex.reintegration_residual;
  const UnimodularMatrix mono = monodromy(ex.cocycle);
  r["monodromy"] = monodromy_json(mono, c.tol.cls);
  if (classify(mono, c.tol.cls).kind == Spectrum::Hyperbolic) r["sigma"] = eigen_splitting(mono).sigma;
  r["wall_time_s"] = seconds_since(t0);
  if (!c.out.empty()) write_file(c.out, dump(to_json(ex.cocycle.path)));
  std::cout << dump(r);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturbation experiments on SL(2,R) cocycles of closed orbits"};
  app.require_subcommand(1);
  Common common;

  ScenarioArgs sc;
  auto* scenario = app.add_subcommand("scenario", "generate a coefficient path");
  add_common(scenario, common);
  scenario->add_option("--generator", sc.generator)->capture_default_str();
  scenario->add_option("--spec", sc.spec_file, "scenario spec JSON");
  scenario->add_option("--name", sc.name, "bundled corpus scenario");
  scenario->add_flag("--list", sc.list, "list the bundled corpus");
  scenario->add_option("--lambda", sc.spec.lambda)->capture_default_str();
  scenario->add_option("--omega", sc.spec.omega)->capture_default_str();
  scenario->add_option("--tau", sc.spec.tau)->capture_default_str();
  scenario->add_option("--seed", sc.spec.seed)->capture_default_str();
  scenario->add_option("--c-bound", sc.spec.c_bound)->capture_default_str();
  scenario->add_option("--terms", sc.spec.terms)->capture_default_str();
  scenario->add_option("--trace-target", sc.spec.trace_target)->capture_default_str();
  scenario->add_option("--beta", sc.spec.beta)->capture_default_str();
  scenario->add_option("--a", sc.spec.mod_a)->capture_default_str();
  scenario->add_option("--b", sc.spec.mod_b)->capture_default_str();

  AnalyzeArgs an;
  auto* analyze_cmd = app.add_subcommand("analyze", "splitting, angles and domination of a path");
  add_common(analyze_cmd, common);
  analyze_cmd->add_option("path", an.input)->required();
  analyze_cmd->add_option("--m-max", an.m_max)->capture_default_str();
  analyze_cmd->add_option("--profile", an.profile, "write t,angle,r_m CSV");
  analyze_cmd->add_option("--profile-m", an.profile_m)->capture_default_str();

  PerturbArgs pa;
  std::string which;
  auto* perturb = app.add_subcommand("perturb", "apply one perturbation and certify it");
  add_common(perturb, common);
  perturb->add_option("kind", which)->required()->check(CLI::IsMember({"rot", "insert", "exchange", "tame", "ellipticize"}));
  perturb->add_option("path", pa.input)->required();
  perturb->add_option("--epsilon", pa.epsilon)->capture_default_str();
  perturb->add_option("--theta", pa.theta, "angle threshold (default: small-angle threshold)");
  perturb->add_option("--m", pa.m)->capture_default_str();
  perturb->add_option("--xi", pa.xi, "rotation angle")->capture_default_str();
  perturb->add_flag("--at-end", pa.at_end);
  perturb->add_option("--base", pa.base)->capture_default_str();
  perturb->add_option("--s0", pa.s0, "window start")->capture_default_str();
  perturb->add_option("--q", pa.q, "generator a b c")->expected(3);
  perturb->add_flag("--left", pa.left);
  perturb->add_option("--at", pa.at, "exchange base point");

  DichotomyArgs da;
  auto* dich = app.add_subcommand("dichotomy", "four-way verdict under epsilon-perturbations");
  add_common(dich, common);
  dich->add_option("path", da.input)->required();
  dich->add_option("--epsilon", da.epsilon)->capture_default_str();
  dich->add_option("--m-max", da.m_max)->capture_default_str();

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "run a property suite");
  add_common(verify, common);
  verify->add_option("suite", va.suite)->required();
  verify->add_option("--seed", va.seed)->capture_default_str();
  verify->add_option("--samples", va.samples, "0 selects the suite default")->capture_default_str();
  verify->add_option("--threads", va.threads)->capture_default_str();

  ExtractArgs ea;
  auto* ex = app.add_subcommand("extract3d", "planar cocycle of a closed orbit of a 3D flow");
  add_common(ex, common);
  ex->add_option("--model", ea.model)->capture_default_str();
  ex->add_option("--params", ea.params, "model parameters")->capture_default_str();
  ex->add_option("--orbit-id", ea.orbit_id)->capture_default_str();
  ex->add_option("--period", ea.period, "0 uses the analytic period");
  ex->add_option("--spec", ea.spec_file, "{model, params, orbit_id, period}");
  ex->add_option("--extract-step", ea.ex.step)->capture_default_str();
  ex->add_option("--segment", ea.ex.segment)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*scenario) return cmd_scenario(sc, common);
    if (*analyze_cmd) return cmd_analyze(an, common);
    if (*perturb) return cmd_perturb(which, pa, common);
    if (*dich) return cmd_dichotomy(da, common);
    if (*verify) return cmd_verify(va, common);
    if (*ex) return cmd_extract3d(ea, common);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == ErrorCode::ParseError ? kParse : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}
