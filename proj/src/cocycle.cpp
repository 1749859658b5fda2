#include "sl2lab/cocycle.hpp"

#include <algorithm>
#include <cmath>

namespace sl2lab {

namespace {

constexpr double kTimeEps = 1e-12;

void add_entry(Mat2& m, Entry e, double v) {
  switch (e) {
    case Entry::A:
      m(0, 0) += v;
      m(1, 1) -= v;
      break;
    case Entry::B: m(0, 1) += v; break;
    case Entry::C: m(1, 0) += v; break;
  }
}

bool in_range(double t, double t0, double t1, double duration) {
  if (t < t0) return false;
  if (t < t1) return true;
  // the final right end point belongs to the last piece
  return t <= t1 && t1 >= duration - kTimeEps;
}

Mat2 inverse_of(const Mat2& w) {
  Mat2 inv;
  inv << w(1, 1), -w(0, 1), -w(1, 0), w(0, 0);
  return inv / w.determinant();
}

}  // namespace

double TrigTerm::value(double t) const { return amp * std::cos(freq * t + phase); }

const char* to_string(ModifierKind kind) {
  switch (kind) {
    case ModifierKind::RightFactor: return "right";
    case ModifierKind::LeftFactor: return "left";
    case ModifierKind::HyperbolicFactor: return "hyperbolic";
  }
  return "?";
}

TracelessMatrix WindowModifier::effective_generator() const {
  return kind == ModifierKind::HyperbolicFactor ? generator * scale : generator;
}

CoefficientPath::CoefficientPath(double duration, std::vector<Segment> segments,
                                 std::vector<TrigTerm> trig)
    : duration_(duration), segments_(std::move(segments)), trig_(std::move(trig)) {
  if (!(duration_ > 0) || !std::isfinite(duration_)) {
    fail(ErrorCode::InvalidSpec, "duration must be positive");
  }
  std::sort(segments_.begin(), segments_.end(),
            [](const Segment& x, const Segment& y) { return x.t0 < y.t0; });
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.t0 < s.t1) || s.t0 < -kTimeEps || s.t1 > duration_ + kTimeEps) {
      fail(ErrorCode::InvalidSpec, "segment outside [0, duration] or empty");
    }
    if (i > 0 && s.t0 < segments_[i - 1].t1 - kTimeEps) {
      fail(ErrorCode::InvalidSpec, "overlapping segments");
    }
  }
  for (const auto& term : trig_) {
    if (!std::isfinite(term.amp) || !std::isfinite(term.freq) || !std::isfinite(term.phase) ||
        !(term.t0 < term.t1)) {
      fail(ErrorCode::InvalidSpec, "malformed trig term");
    }
  }
  rebuild_index();
}

CoefficientPath CoefficientPath::constant(double duration, const TracelessMatrix& value) {
  return CoefficientPath(duration, {Segment{0, duration, value}});
}

std::vector<WindowModifier> CoefficientPath::modifiers() const {
  std::vector<WindowModifier> out;
  out.reserve(modifiers_.size());
  for (const auto& m : modifiers_) out.push_back(m.spec);
  return out;
}

void CoefficientPath::rebuild_index() {
  std::vector<double> br;
  auto push = [&](double t) {
    if (t > kTimeEps && t < duration_ - kTimeEps) br.push_back(t);
  };
  for (const auto& s : segments_) {
    push(s.t0);
    push(s.t1);
  }
  for (const auto& term : trig_) {
    if (std::isfinite(term.t0)) push(term.t0);
    if (std::isfinite(term.t1)) push(term.t1);
  }
  for (const auto& m : modifiers_) {
    push(m.spec.start);
    push(m.spec.end());
  }
  std::sort(br.begin(), br.end());
  breaks_.clear();
  for (double t : br) {
    if (breaks_.empty() || t - breaks_.back() > kTimeEps) breaks_.push_back(t);
  }
  std::sort(modifiers_.begin(), modifiers_.end(),
            [](const ModifierState& x, const ModifierState& y) {
              return x.spec.start < y.spec.start;
            });

  double sup = 0;
  auto probe = [&](double t) {
    t = std::clamp(t, 0.0, duration_);
    sup = std::max(sup, op_norm(base(t).matrix()));
  };
  const auto n = static_cast<long>(std::ceil(duration_ * 64));
  for (long k = 0; k <= n; ++k) probe(duration_ * static_cast<double>(k) / n);
  for (double t : breaks_) {
    probe(t - 1e-9);
    probe(t);
  }
  bound_ = sup;
}

TracelessMatrix CoefficientPath::base(double t) const {
  Mat2 m = Mat2::Zero();
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double x, const Segment& s) { return x < s.t0; });
  if (it != segments_.begin()) {
    const auto& s = *(it - 1);
    if (in_range(t, s.t0, s.t1, duration_)) m = s.value.matrix();
  }
  for (const auto& term : trig_) {
    if (in_range(t, term.t0, term.t1, duration_)) add_entry(m, term.entry, term.value(t));
  }
  return TracelessMatrix::project(m);
}

const CoefficientPath::ModifierState* CoefficientPath::modifier_at(double t) const {
  for (const auto& m : modifiers_) {
    if (t >= m.spec.start && t <= m.spec.end()) return &m;
  }
  return nullptr;
}

Mat2 CoefficientPath::window_base_transport(const ModifierState& mod, double t,
                                            const IntegratorOptions& opts) const {
  const auto& nodes = *mod.base_nodes;
  const auto n = static_cast<long>(nodes.size()) - 1;
  const double hc = 1.0 / static_cast<double>(n);
  const long i = std::clamp(static_cast<long>(std::floor((t - mod.spec.start) / hc)), 0L, n);
  const double node_t = mod.spec.start + static_cast<double>(i) * hc;
  if (std::abs(t - node_t) < kTimeEps) return nodes[static_cast<std::size_t>(i)];
  return base_transport(*this, node_t, t, opts) * nodes[static_cast<std::size_t>(i)];
}

TracelessMatrix CoefficientPath::evaluate(double t) const {
  if (!(t >= -kTimeEps && t <= duration_ + kTimeEps)) {
    fail(ErrorCode::OutOfDomain, "time outside [0, duration]");
  }
  t = std::clamp(t, 0.0, duration_);
  const TracelessMatrix a = base(t);
  const ModifierState* mod = modifier_at(t);
  if (mod == nullptr) return a;
  const double u = t - mod->spec.start;
  const TracelessMatrix q = mod->spec.effective_generator();
  if (mod->spec.kind == ModifierKind::LeftFactor) {
    const Mat2 e = exp_traceless(q * Bump<double>::value(u)).matrix();
    const Mat2 conj = e * a.matrix() * inverse_of(e);
    return TracelessMatrix::project(conj) + q * Bump<double>::derivative(u);
  }
  const Mat2 w = window_base_transport(*mod, t, IntegratorOptions{});
  const Mat2 h = Bump<double>::derivative(u) * (w * q.matrix() * inverse_of(w));
  return a + TracelessMatrix::project(h);
}

bool CoefficientPath::window_free(double start) const {
  if (start < -kTimeEps || start + 1 > duration_ + kTimeEps) return false;
  for (const auto& m : modifiers_) {
    if (start < m.spec.end() - kTimeEps && m.spec.start < start + 1 - kTimeEps) return false;
  }
  return true;
}

std::vector<double> CoefficientPath::breakpoints_between(double a, double b) const {
  std::vector<double> out;
  for (double t : breaks_) {
    if (t > a + kTimeEps && t < b - kTimeEps) out.push_back(t);
  }
  return out;
}

CoefficientPath CoefficientPath::with_modifier(const WindowModifier& mod,
                                               const IntegratorOptions& opts) const {
  if (mod.start < -kTimeEps || mod.end() > duration_ + kTimeEps) {
    fail(ErrorCode::OutOfDomain, "window does not fit in [0, duration]");
  }
  if (!window_free(mod.start)) fail(ErrorCode::WindowOverlap, "window already in use");
  CoefficientPath out = *this;
  ModifierState st{mod, nullptr};
  st.spec.start = std::clamp(mod.start, 0.0, duration_ - 1);
  if (mod.kind != ModifierKind::LeftFactor) {
    const long n = std::max(1L, static_cast<long>(std::ceil(1.0 / opts.step - 1e-9)));
    auto nodes = std::make_shared<std::vector<Mat2>>();
    nodes->reserve(static_cast<std::size_t>(n) + 1);
    nodes->push_back(Mat2::Identity());
    for (long i = 0; i < n; ++i) {
      const double a = st.spec.start + static_cast<double>(i) / n;
      const double b = st.spec.start + static_cast<double>(i + 1) / n;
      nodes->push_back(base_transport(*this, a, b, opts) * nodes->back());
    }
    st.base_nodes = std::move(nodes);
  }
  out.modifiers_.push_back(std::move(st));
  out.rebuild_index();
  return out;
}

CoefficientPath CoefficientPath::rebased(double q, const IntegratorOptions&) const {
  const double tau = duration_;
  q = std::fmod(q, tau);
  if (q < 0) q += tau;
  if (q < kTimeEps || q > tau - kTimeEps) return *this;

  std::vector<Segment> segs;
  for (const auto& s : segments_) {
    if (s.t1 > q + kTimeEps) {
      segs.push_back({std::max(s.t0, q) - q, s.t1 - q, s.value});
    }
    if (s.t0 < q - kTimeEps) {
      segs.push_back({s.t0 + tau - q, std::min(s.t1, q) + tau - q, s.value});
    }
  }
  std::vector<TrigTerm> terms;
  for (const auto& term : trig_) {
    const double r0 = std::max(term.t0, 0.0);
    const double r1 = std::min(term.t1, tau);
    if (r1 > q + kTimeEps && r1 > r0) {
      TrigTerm t = term;
      t.t0 = std::max(r0, q) - q;
      t.t1 = r1 - q;
      t.phase = term.phase + term.freq * q;
      terms.push_back(t);
    }
    if (r0 < q - kTimeEps && r1 > r0) {
      TrigTerm t = term;
      t.t0 = r0 + tau - q;
      t.t1 = std::min(r1, q) + tau - q;
      t.phase = term.phase + term.freq * (q - tau);
      terms.push_back(t);
    }
  }
  CoefficientPath out(tau, std::move(segs), std::move(terms));
  for (const auto& m : modifiers_) {
    ModifierState st = m;
    if (m.spec.start >= q - kTimeEps) {
      st.spec.start = std::max(0.0, m.spec.start - q);
    } else if (m.spec.end() <= q + kTimeEps) {
      st.spec.start = std::min(tau - 1, m.spec.start + tau - q);
    } else {
      fail(ErrorCode::WindowOverlap, "window straddles the new base point");
    }
    out.modifiers_.push_back(std::move(st));
  }
  out.rebuild_index();
  return out;
}

namespace {

// Coefficient on one integration piece; the active segment, trig terms and
// window are fixed by the piece midpoint.
struct PieceField {
  Mat2 constant = Mat2::Zero();
  std::vector<const TrigTerm*> terms;

  Mat2 at(double t) const {
    Mat2 m = constant;
    for (const auto* term : terms) add_entry(m, term->entry, term->value(t));
    return m;
  }
};

PieceField piece_field(const CoefficientPath& path, double mid) {
  PieceField f;
  const auto& segs = path.segments();
  auto it = std::upper_bound(segs.begin(), segs.end(), mid,
                             [](double x, const Segment& s) { return x < s.t0; });
  if (it != segs.begin() && mid < (it - 1)->t1) f.constant = (it - 1)->value.matrix();
  for (const auto& term : path.trig()) {
    if (mid >= term.t0 && mid < term.t1) f.terms.push_back(&term);
  }
  return f;
}

Mat2 renormalized(const Mat2& p, const IntegratorOptions& opts) {
  const double det = p.determinant();
  if (!(det > 0) || std::abs(det - 1) > opts.max_step_drift) {
    fail(ErrorCode::StepTooCoarse, "step propagator lost unimodularity");
  }
  return p / std::sqrt(det);
}

Mat2 rk4_propagator(const Mat2& b1, const Mat2& b2, const Mat2& b3, const Mat2& b4,
                    double h) {
  const Mat2 id = Mat2::Identity();
  const Mat2 k1 = b1;
  const Mat2 k2 = b2 * (id + (h / 2) * k1);
  const Mat2 k3 = b3 * (id + (h / 2) * k2);
  const Mat2 k4 = b4 * (id + h * k3);
  return id + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

Mat2 integrate(const CoefficientPath& path, double s, double t, const IntegratorOptions& opts,
               bool with_modifiers) {
  Mat2 u = Mat2::Identity();
  if (s == t) return u;
  if (!(opts.step > 0)) fail(ErrorCode::InvalidSpec, "integration step must be positive");
  const bool forward = t > s;
  std::vector<double> knots{s};
  auto inner = path.breakpoints_between(std::min(s, t), std::max(s, t));
  if (!forward) std::reverse(inner.begin(), inner.end());
  knots.insert(knots.end(), inner.begin(), inner.end());
  knots.push_back(t);

  for (std::size_t p = 0; p + 1 < knots.size(); ++p) {
    const double a = knots[p], b = knots[p + 1];
    const double mid = (a + b) / 2;
    const PieceField field = piece_field(path, mid);
    const CoefficientPath::ModifierState* mod = with_modifiers ? path.modifier_at(mid) : nullptr;
    const long n = std::max(1L, static_cast<long>(std::ceil(std::abs(b - a) / opts.step - 1e-9)));
    const double h = (b - a) / static_cast<double>(n);

    if (mod == nullptr) {
      for (long k = 0; k < n; ++k) {
        const double tk = a + static_cast<double>(k) * h;
        const Mat2 b1 = field.at(tk);
        const Mat2 b2 = field.at(tk + h / 2);
        const Mat2 b4 = field.at(tk + h);
        u = renormalized(rk4_propagator(b1, b2, b2, b4, h), opts) * u;
      }
      continue;
    }

    const double s0 = mod->spec.start;
    const Mat2 q = mod->spec.effective_generator().matrix();
    const TracelessMatrix qt = mod->spec.effective_generator();
    if (mod->spec.kind == ModifierKind::LeftFactor) {
      auto coeff = [&](double x) -> Mat2 {
        const double v = x - s0;
        const Mat2 e = exp_traceless(qt * Bump<double>::value(v)).matrix();
        return Bump<double>::derivative(v) * q + e * field.at(x) * inverse_of(e);
      };
      for (long k = 0; k < n; ++k) {
        const double tk = a + static_cast<double>(k) * h;
        const Mat2 b2 = coeff(tk + h / 2);
        u = renormalized(rk4_propagator(coeff(tk), b2, b2, coeff(tk + h), h), opts) * u;
      }
      continue;
    }

    // Right factor: A + alpha'(t - s0) W Q W^{-1}, W = Phi_base(t, s0) carried
    // along with the same RK4 stages.
    Mat2 w = path.window_base_transport(*mod, a, opts);
    auto drift = [&](double x, const Mat2& wx) -> Mat2 {
      return Bump<double>::derivative(x - s0) * (wx * q * inverse_of(wx));
    };
    for (long k = 0; k < n; ++k) {
      const double tk = a + static_cast<double>(k) * h;
      const Mat2 a1 = field.at(tk), a2 = field.at(tk + h / 2), a4 = field.at(tk + h);
      const Mat2 kw1 = a1 * w;
      const Mat2 w2 = w + (h / 2) * kw1;
      const Mat2 kw2 = a2 * w2;
      const Mat2 w3 = w + (h / 2) * kw2;
      const Mat2 kw3 = a2 * w3;
      const Mat2 w4 = w + h * kw3;
      const Mat2 kw4 = a4 * w4;
      const Mat2 b1 = a1 + drift(tk, w);
      const Mat2 b2 = a2 + drift(tk + h / 2, w2);
      const Mat2 b3 = a2 + drift(tk + h / 2, w3);
      const Mat2 b4 = a4 + drift(tk + h, w4);
      u = renormalized(rk4_propagator(b1, b2, b3, b4, h), opts) * u;
      w = w + (h / 6) * (kw1 + 2 * kw2 + 2 * kw3 + kw4);
      w /= std::sqrt(w.determinant());
    }
  }
  return u;
}

}  // namespace

Mat2 transport(const CoefficientPath& path, double s, double t, const IntegratorOptions& opts) {
  return integrate(path, s, t, opts, true);
}

Mat2 base_transport(const CoefficientPath& path, double s, double t,
                    const IntegratorOptions& opts) {
  return integrate(path, s, t, opts, false);
}

UnimodularMatrix fundamental_solution(const CoefficientPath& path, double s, double t,
                                      const IntegratorOptions& opts) {
  const double tau = path.duration();
  if (!(s >= -kTimeEps && s <= t + kTimeEps && t <= tau + kTimeEps)) {
    fail(ErrorCode::OutOfDomain, "need 0 <= s <= t <= duration");
  }
  return UnimodularMatrix::trusted(
      transport(path, std::clamp(s, 0.0, tau), std::clamp(t, 0.0, tau), opts));
}

Direction propagate_direction(const CoefficientPath& path, const Direction& d, double s,
                              double t, const IntegratorOptions& opts) {
  return Direction::from_vector(transport(path, s, t, opts) * d.vector());
}

FundamentalSolutionCache::FundamentalSolutionCache(const CoefficientPath& path,
                                                   double grid_step,
                                                   const IntegratorOptions& opts)
    : path_(path), opts_(opts), grid_step_(grid_step) {
  if (!(grid_step_ > 0)) fail(ErrorCode::InvalidSpec, "grid step must be positive");
  const double tau = path_.duration();
  const auto n = static_cast<long>(std::ceil(tau / grid_step_ - 1e-9));
  nodes_.reserve(static_cast<std::size_t>(n) + 1);
  nodes_.push_back(Mat2::Identity());
  for (long k = 0; k < n; ++k) {
    const double a = static_cast<double>(k) * grid_step_;
    const double b = std::min(tau, static_cast<double>(k + 1) * grid_step_);
    nodes_.push_back(transport(path_, a, b, opts_) * nodes_.back());
  }
}

Mat2 FundamentalSolutionCache::at(double t) const {
  const double tau = path_.duration();
  if (!(t >= -kTimeEps && t <= tau + kTimeEps)) {
    fail(ErrorCode::OutOfDomain, "time outside [0, duration]");
  }
  t = std::clamp(t, 0.0, tau);
  const auto last = static_cast<long>(nodes_.size()) - 1;
  const long k = std::clamp(static_cast<long>(std::floor(t / grid_step_)), 0L, last);
  const double tk = std::min(tau, static_cast<double>(k) * grid_step_);
  if (std::abs(t - tk) < kTimeEps) return nodes_[static_cast<std::size_t>(k)];
  return transport(path_, tk, t, opts_) * nodes_[static_cast<std::size_t>(k)];
}

Mat2 FundamentalSolutionCache::between(double s, double t) const {
  const Mat2 ps = at(s);
  Mat2 inv;
  inv << ps(1, 1), -ps(0, 1), -ps(1, 0), ps(0, 0);
  return at(t) * inv;
}

}  // namespace sl2lab
