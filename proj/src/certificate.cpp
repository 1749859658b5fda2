#include "sl2lab/certificate.hpp"

#include <algorithm>
#include <cmath>

namespace sl2lab {

const Residual* Certificate::find(const std::string& name) const {
  for (const auto& r : residuals) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

bool Certificate::pass() const {
  return std::all_of(residuals.begin(), residuals.end(), [](const Residual& r) { return r.ok(); }) &&
         std::all_of(children.begin(), children.end(), [](const Certificate& c) { return c.pass(); });
}

double measure_sup_norm(const CoefficientPath& before, const CoefficientPath& after,
                        double grid) {
  const double tau = std::min(before.duration(), after.duration());
  double sup = 0;
  auto probe = [&](double t) {
    const Mat2 d = after.evaluate(t).matrix() - before.evaluate(t).matrix();
    sup = std::max(sup, op_norm(d));
  };
  const auto n = static_cast<long>(std::ceil(tau / grid));
  for (long k = 0; k <= n; ++k) probe(std::min(tau, static_cast<double>(k) * grid));
  // the bump derivative peaks mid-window; sample every window finely
  for (const auto& w : after.modifiers()) {
    for (int k = 0; k <= 512; ++k) probe(std::min(tau, w.start + k / 512.0));
  }
  return sup;
}

double factor_residual(const CoefficientPath& before, const CoefficientPath& after,
                       const WindowModifier& window, const IntegratorOptions& opts) {
  const Mat2 phi = transport(before, window.start, window.end(), opts);
  const Mat2 phi2 = transport(after, window.start, window.end(), opts);
  const Mat2 s = exp_traceless(window.effective_generator()).matrix();
  const Mat2 expected = window.kind == ModifierKind::LeftFactor ? Mat2(s * phi) : Mat2(phi * s);
  return op_norm((phi2 - expected).eval()) / op_norm(phi);
}

std::vector<WindowRecord> new_windows(const CoefficientPath& before,
                                      const CoefficientPath& after) {
  std::vector<WindowRecord> out;
  const auto old = before.modifiers();
  for (const auto& w : after.modifiers()) {
    const bool seen = std::any_of(old.begin(), old.end(), [&](const WindowModifier& o) {
      return std::abs(o.start - w.start) < 1e-9 && o.kind == w.kind;
    });
    if (seen) continue;
    out.push_back({w.start, w.kind, w.effective_generator(),
                   op_norm(w.effective_generator().matrix())});
  }
  return out;
}

Certificate reverify(const Certificate& cert, const VerifyOptions& opts) {
  Certificate out;
  out.lemma = cert.lemma;
  out.windows = cert.windows;
  out.before = cert.before;
  out.after = cert.after;
  out.sup_bound = cert.sup_bound;
  out.expect_elliptic = cert.expect_elliptic;
  out.norm_cap = cert.norm_cap;
  out.cap_base = cert.cap_base;
  for (const auto& child : cert.children) out.children.push_back(reverify(child, opts));
  if (!cert.before || !cert.after) {
    out.residuals = cert.residuals;
    out.sup_norm = cert.sup_norm;
    return out;
  }
  const auto& before = *cert.before;
  const auto& after = *cert.after;

  double worst = 0;
  for (const auto& w : new_windows(before, after)) {
    WindowModifier spec{w.start, w.kind, w.q, 1};
    worst = std::max(worst, factor_residual(before, after, spec, opts.integ));
  }
  out.add("factor_equation", worst, opts.tol_factor);

  out.sup_norm = measure_sup_norm(before, after, opts.grid);
  if (cert.sup_bound >= 0) out.add("sup_norm", out.sup_norm, cert.sup_bound);

  const double tau = after.duration();
  if (cert.expect_elliptic) {
    const Mat2 m = transport(after, 0, tau, opts.integ);
    out.add("final_trace", std::abs(m.trace()), 2 - opts.tol_cls);
  }
  if (cert.norm_cap) {
    const double q = cert.cap_base;
    const Mat2 m = transport(after, 0, q, opts.integ) * transport(after, q, tau, opts.integ);
    out.add("monodromy_norm", op_norm(m), *cert.norm_cap);
  }
  return out;
}

}  // namespace sl2lab
