#include "qadim/tangents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qadim {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

// Preimage of [0, 1] under x -> s x + o.
Interval preimage_window(const AffineMap& T, std::size_t axis) {
  const Scalar& s = T.scale[axis];
  Scalar p = (0 - T.offset[axis]) / s, q = (1 - T.offset[axis]) / s;
  if (q < p) std::swap(p, q);
  return {p, q};
}

void check_map(const AffineMap& T, std::size_t dim) {
  if (T.scale.size() != dim || T.offset.size() != dim)
    throw DomainError("map has " + std::to_string(T.scale.size()) + " axes, set has " + std::to_string(dim));
  for (const auto& s : T.scale)
    if (s == 0) throw DomainError("map scale must be nonzero");
}

}  // namespace

Scalar AffineMap::a() const {
  if (scale.empty()) throw DomainError("map without axes");
  Scalar m = abs(scale[0]);
  for (const auto& s : scale) m = std::min(m, Scalar(abs(s)));
  return m;
}

Scalar AffineMap::b() const {
  if (scale.empty()) throw DomainError("map without axes");
  Scalar m = abs(scale[0]);
  for (const auto& s : scale) m = std::max(m, Scalar(abs(s)));
  return m;
}

AffineMap similarity_1d(const Scalar& scale, const Scalar& offset) { return {{scale}, {offset}}; }

AffineMap cylinder_map(const Interval& I) {
  const Scalar len = I.length();
  if (!(len > 0)) throw DomainError("cylinder map needs an interval of positive length");
  return similarity_1d(1 / len, -I.lo / len);
}

std::string to_string(TangentMode m) {
  switch (m) {
    case TangentMode::weak: return "weak";
    case TangentMode::generalized: return "generalized";
    case TangentMode::pseudo: return "pseudo";
  }
  return "weak";
}

TangentMode parse_tangent_mode(const std::string& s) {
  if (s == "weak") return TangentMode::weak;
  if (s == "generalized") return TangentMode::generalized;
  if (s == "pseudo") return TangentMode::pseudo;
  throw DomainError("unknown tangent mode '" + s + "'");
}

void TangentSequence::validate() const {
  if (maps.empty()) throw DomainError("tangent sequence has no maps");
  if (!(k_max >= 1)) throw DomainError("comparability bound must be at least 1");
  const std::size_t dim = maps.front().dim();
  for (std::size_t k = 0; k < maps.size(); ++k) {
    const auto& T = maps[k];
    check_map(T, dim);
    if (T.b() > T.a() * Scalar(k_max))
      throw DomainError("map " + std::to_string(k) + " exceeds the comparability bound b/a <= " + std::to_string(k_max));
    if (k == 0) continue;
    if (T.b() < maps[k - 1].b()) throw DomainError("b_k must be nondecreasing (map " + std::to_string(k) + ")");
    if (mode == TangentMode::generalized && !(T.b() > maps[k - 1].b()))
      throw DomainError("generalized tangents need strictly increasing b_k (map " + std::to_string(k) + ")");
  }
}

// ---------------------------------------------------------------- magnify

IntervalSet1D magnify(const IntervalSet1D& s, const AffineMap& T) {
  check_map(T, 1);
  const Interval w = preimage_window(T, 0);
  auto items = s.intervals();
  auto first = std::lower_bound(items.begin(), items.end(), w.lo,
                                [](const Interval& iv, const Scalar& x) { return iv.hi < x; });
  std::vector<Interval> out;
  for (auto it = first; it != items.end() && it->lo <= w.hi; ++it) {
    Scalar a = T.apply(it->lo), b = T.apply(it->hi);
    if (b < a) std::swap(a, b);
    a = std::max(a, Scalar(0));
    b = std::min(b, Scalar(1));
    if (a <= b) out.push_back({a, b});
  }
  return IntervalSet1D(std::move(out));
}

PointSet1D magnify(const PointSet1D& s, const AffineMap& T) {
  check_map(T, 1);
  const Interval w = preimage_window(T, 0);
  auto pts = s.points();
  std::vector<Scalar> out;
  for (auto it = std::lower_bound(pts.begin(), pts.end(), w.lo); it != pts.end() && *it <= w.hi; ++it) {
    Scalar y = T.apply(*it);
    if (y >= 0 && y <= 1) out.push_back(y);
  }
  return PointSet1D(std::move(out));
}

PointSet2D magnify(const PointSet2D& s, const AffineMap& T) {
  check_map(T, 2);
  std::vector<Point2> out;
  for (const auto& p : s.points()) {
    Point2 q{T.apply(p.x, 0), T.apply(p.y, 1)};
    if (q.x >= 0 && q.x <= 1 && q.y >= 0 && q.y <= 1) out.push_back(q);
  }
  return PointSet2D(std::move(out));
}

Set1D magnify(const Set1D& s, const AffineMap& T) {
  return std::visit([&](const auto& v) -> Set1D { return magnify(v, T); }, s);
}

IntervalSet1D as_intervals(const Set1D& s) {
  return std::visit(overloaded{
                        [](const IntervalSet1D& v) { return v; },
                        [](const PointSet1D& v) { return to_interval_set(v); },
                    },
                    s);
}

// ---------------------------------------------------------------- truncation

Scalar truncation_bound(const IntervalSet1D& s) { return s.empty() ? Scalar(0) : s.max_len() / 2; }

// ---------------------------------------------------------------- classification

std::string to_string(TangentClass c) {
  switch (c) {
    case TangentClass::finite_set: return "finite-set";
    case TangentClass::interval: return "interval";
    case TangentClass::other: return "other";
  }
  return "other";
}

Classification classify_tangent_1d(const Set1D& p, double tol) {
  if (!(tol > 0)) throw DomainError("classification tolerance must be positive");
  const IntervalSet1D s = as_intervals(p);
  if (s.empty()) throw DomainError("cannot classify an empty set");
  auto items = s.intervals();
  Classification out;
  auto& st = out.stats;
  st.components = items.size();
  st.diameter = s.diameter();
  st.max_gap = 0;
  st.min_gap = items.size() > 1 ? items[1].lo - items[0].hi : Scalar(0);
  st.max_component = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    st.max_component = std::max(st.max_component, items[i].length());
    if (i) {
      Scalar g = items[i].lo - items[i - 1].hi;
      st.max_gap = std::max(st.max_gap, g);
      st.min_gap = std::min(st.min_gap, g);
    }
  }
  const Scalar slack = Scalar(tol) * st.diameter;
  if (st.diameter == 0) {
    out.kind = TangentClass::finite_set;
  } else if (st.components <= 64 && st.max_component <= slack && st.min_gap >= st.max_gap - slack) {
    out.kind = TangentClass::finite_set;
  } else if (st.max_gap < slack) {
    out.kind = TangentClass::interval;
  } else {
    out.kind = TangentClass::other;
  }
  return out;
}

// ---------------------------------------------------------------- interval witness

std::optional<IntervalWitness> interval_tangent_witness(const Set1D& set, int k) {
  if (k < 2) throw DomainError("interval witness needs k >= 2");
  const IntervalSet1D s = as_intervals(set);
  auto items = s.intervals();
  const std::size_t m = items.size();
  const std::size_t kk = static_cast<std::size_t>(k);
  if (m < kk + 1) return std::nullopt;
  const std::size_t lookahead = std::max<std::size_t>(64, 8 * kk);
  std::vector<double> len(m), gap(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    len[i] = items[i].length().convert_to<double>();
    if (i + 1 < m) gap[i] = (items[i + 1].lo - items[i].hi).convert_to<double>();
  }
  double best = std::numeric_limits<double>::infinity();
  std::size_t bi = 0, bj = 0;
  // a margin keeps double rounding away from the strict inequality; the chain is re-checked exactly
  const double margin = 1 - 1e-9;
  for (std::size_t i = 0; i + kk < m; ++i) {
    double span = len[i], maxgap = 0;
    for (std::size_t j = i + 1; j < m && j <= i + lookahead; ++j) {
      span += gap[j - 1] + len[j];
      maxgap = std::max(maxgap, gap[j - 1]);
      if (span >= best) break;
      if (j - i >= kk && maxgap < span / k * margin) {
        best = span;
        bi = i;
        bj = j;
        break;
      }
    }
  }
  if (!std::isfinite(best)) return std::nullopt;

  IntervalWitness w;
  w.span = items[bj].hi - items[bi].lo;
  const Scalar limit = w.span / k;
  const Scalar step = limit / 2;
  for (std::size_t i = bi; i <= bj; ++i) {
    Scalar x = items[i].lo;
    w.z.push_back(x);
    while (items[i].hi - x > step) {
      x += step;
      w.z.push_back(x);
    }
    if (items[i].hi > x) w.z.push_back(items[i].hi);
  }
  w.max_step = 0;
  for (std::size_t i = 1; i < w.z.size(); ++i) w.max_step = std::max(w.max_step, Scalar(w.z[i] - w.z[i - 1]));
  if (!(w.max_step < limit)) throw std::logic_error("interval witness failed its own check");
  return w;
}

// ---------------------------------------------------------------- convergence

TangentVerdict tangent_converge(const Set1D& s, const TangentSequence& seq, const Set1D& candidate,
                                const TangentOptions& opt) {
  seq.validate();
  if (seq.maps.size() < 4) throw DomainError("tangent convergence needs at least 4 maps");
  const IntervalSet1D cand = as_intervals(candidate);
  if (cand.empty()) throw DomainError("tangent candidate is empty");
  if (opt.set_truncation < 0 || opt.candidate_truncation < 0) throw DomainError("truncation bounds must be >= 0");
  const IntervalSet1D base = as_intervals(s);

  TangentVerdict v;
  IntervalSet1D last;
  for (const auto& T : seq.maps) {
    IntervalSet1D img = magnify(base, T);
    Scalar raw = 1;  // an empty image is as far as two subsets of the window can be
    if (!img.empty()) {
      auto h = hausdorff_distance(cand, img);
      raw = seq.mode == TangentMode::pseudo ? h.a_to_b : h.distance;
    }
    Scalar allow = T.b() * opt.set_truncation + opt.candidate_truncation;
    v.raw.push_back(raw);
    v.allowance.push_back(allow);
    v.distances.push_back(std::max(Scalar(0), Scalar(raw - allow)));
    v.b.push_back(T.b());
    last = std::move(img);
  }

  // least squares of log d on log b over the last half
  const std::size_t n = v.distances.size(), from = n / 2;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = from; k < n; ++k)
    if (v.distances[k] > 0) pts.emplace_back(log2_of(v.b[k]), log2_of(v.distances[k]));
  if (pts.empty()) {
    v.epsilon.reset();
    v.C = 0;
  } else if (pts.size() == 1) {
    v.epsilon = 0.0;
    v.C = std::exp2(pts[0].second);
  } else {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, cnt = static_cast<double>(pts.size());
    for (auto [x, y] : pts) sx += x, sy += y, sxx += x * x, sxy += x * y;
    double den = sxx - sx * sx / cnt;
    double slope = den > 0 ? (sxy - sx * sy / cnt) / den : 0;
    double icpt = (sy - slope * sx) / cnt;
    v.epsilon = std::max(0.0, -slope);
    v.C = std::exp2(icpt);
  }
  v.fast = !v.epsilon || *v.epsilon >= opt.eps_fast;
  v.converged = v.fast || v.distances.back() <= Scalar(opt.converged_tol);
  if (!last.empty()) v.classification = classify_tangent_1d(last, opt.classify_tol);
  return v;
}

// ---------------------------------------------------------------- bound check

std::string to_string(BoundStatus s) {
  switch (s) {
    case BoundStatus::pass: return "pass";
    case BoundStatus::fail: return "fail";
    case BoundStatus::not_applied: return "not-applied";
  }
  return "not-applied";
}

TangentBoundReport tangent_bound_check(const Set1D& s, const TangentSequence& seq, const Set1D& candidate,
                                       const TangentBoundConfig& config) {
  if (config.slack < 0) throw DomainError("slack must be >= 0");
  TangentBoundReport rep;
  rep.verdict = tangent_converge(s, seq, candidate, config.tangent);

  const IntervalSet1D cand = as_intervals(candidate);
  if (cand.diameter() > 0) {
    Target ct(cand);
    auto box = estimate_box(ct, config.candidate_sweep);
    rep.candidate_lbox = box.lower.estimate;
    rep.candidate_ubox = box.upper.estimate;
  }
  Target st = std::visit([&](const auto& v) { return Target(v, config.set_native_radii); }, s);
  rep.set_qa = h_upper_sweep(st, config.delta, config.set_sweep).estimate;
  rep.set_ql = h_lower_sweep(st, config.delta, config.set_sweep).estimate;

  for (const auto& iv : cand.intervals())
    if (iv.hi > 0 && iv.lo < 1) rep.interior_point = true;

  if (rep.verdict.fast) {
    rep.lower_box_vs_qa = rep.candidate_lbox <= rep.set_qa + config.slack ? BoundStatus::pass : BoundStatus::fail;
  } else {
    rep.notes.push_back("tangent is not fast (fitted order " + std::to_string(rep.verdict.epsilon.value_or(0)) +
                        " < " + std::to_string(config.tangent.eps_fast) + "); qA bound not applied");
  }
  if (rep.interior_point) {
    rep.ql_vs_upper_box = rep.set_ql <= rep.candidate_ubox + config.slack ? BoundStatus::pass : BoundStatus::fail;
  } else {
    rep.notes.push_back("tangent has no interior point of [0,1]; qL bound not applied");
  }
  rep.pass = rep.lower_box_vs_qa != BoundStatus::fail && rep.ql_vs_upper_box != BoundStatus::fail;
  return rep;
}

}  // namespace qadim
