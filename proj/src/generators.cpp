#include "qadim/generators.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace qadim {

namespace {

Scalar ratio_from_exponent(const Scalar& e) {
  if (e == floor(e)) return ldexp(Scalar(1), -e.convert_to<int>());
  return pow(Scalar(2), -e);
}

void check_exponent(const Scalar& e) {
  if (!(e >= 1)) throw DomainError("dissection ratio exceeds 1/2 (exponent " + to_decimal(e, 6) + " < 1)");
}

}  // namespace

RatioSchedule RatioSchedule::constant(const Scalar& exponent) {
  return from_segments({{kUnbounded, exponent}});
}

RatioSchedule RatioSchedule::from_segments(std::vector<Segment> segments) {
  if (segments.empty()) throw DomainError("empty ratio schedule");
  RatioSchedule s;
  std::uint64_t total = 0;
  Scalar emax = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& seg = segments[i];
    check_exponent(seg.exponent);
    if (seg.count == 0) throw DomainError("schedule segment with zero count");
    if (seg.count == kUnbounded && i + 1 != segments.size()) {
      throw DomainError("only the last schedule segment may be unbounded");
    }
    total = seg.count == kUnbounded ? kUnbounded : total + seg.count;
    s.ends_.push_back(total);
    s.seg_ratio_.push_back(ratio_from_exponent(seg.exponent));
    emax = std::max(emax, seg.exponent);
  }
  s.length_ = total;
  s.rho0_ = ratio_from_exponent(emax);
  s.segments_ = std::move(segments);
  return s;
}

RatioSchedule RatioSchedule::from_rule(Rule ratio, std::uint64_t horizon, std::optional<Scalar> rho0) {
  if (!ratio) throw DomainError("empty ratio rule");
  if (rho0 && !(*rho0 > 0 && *rho0 <= Scalar(1) / 2)) throw DomainError("rho0 must lie in (0, 1/2]");
  RatioSchedule s;
  s.rule_ = std::move(ratio);
  s.length_ = horizon;
  s.rho0_ = std::move(rho0);
  return s;
}

Scalar RatioSchedule::ratio(std::uint64_t k) const {
  if (k == 0 || k > length_) throw DomainError("schedule step " + std::to_string(k) + " is undefined");
  if (rule_) {
    Scalar r = rule_(k);
    if (!(r > 0 && r <= Scalar(1) / 2)) throw DomainError("rule ratio outside (0, 1/2] at step " + std::to_string(k));
    if (rho0_ && r < *rho0_) throw DomainError("rule ratio below the declared lower bound at step " + std::to_string(k));
    return r;
  }
  auto it = std::lower_bound(ends_.begin(), ends_.end(), k);
  return seg_ratio_[static_cast<std::size_t>(it - ends_.begin())];
}

Scalar RatioSchedule::exponent(std::uint64_t k) const {
  if (rule_) return -log(ratio(k)) / boost::math::constants::ln_two<Scalar>();
  if (k == 0 || k > length_) throw DomainError("schedule step " + std::to_string(k) + " is undefined");
  auto it = std::lower_bound(ends_.begin(), ends_.end(), k);
  return segments_[static_cast<std::size_t>(it - ends_.begin())].exponent;
}

std::vector<Scalar> RatioSchedule::exponents(std::uint64_t n) const {
  if (n > length_) throw DomainError("schedule shorter than " + std::to_string(n) + " steps");
  std::vector<Scalar> out;
  out.reserve(n);
  if (rule_) {
    for (std::uint64_t k = 1; k <= n; ++k) out.push_back(exponent(k));
    return out;
  }
  for (const auto& seg : segments_) {
    std::uint64_t take = std::min<std::uint64_t>(seg.count, n - out.size());
    out.insert(out.end(), take, seg.exponent);
    if (out.size() == n) break;
  }
  return out;
}

CantorApprox::CantorApprox(RatioSchedule schedule, std::size_t depth, int precision_bits)
    : schedule_(std::move(schedule)), depth_(depth) {
  check_precision_bits(precision_bits);
  if (depth > schedule_.length()) throw DomainError("schedule shorter than the requested depth");
  lengths_.reserve(depth + 1);
  shifts_.reserve(depth + 1);
  lengths_.emplace_back(1);
  shifts_.emplace_back(0);
  for (std::size_t k = 1; k <= depth; ++k) {
    Scalar r = schedule_.ratio(k);
    if (r > Scalar(1) / 2) throw DomainError("dissection ratio exceeds 1/2 at step " + std::to_string(k));
    lengths_.push_back(round_to_bits(lengths_.back() * r, precision_bits));
    shifts_.push_back(lengths_[k - 1] - lengths_[k]);
  }
  if (depth <= kMaxMaterializedDepth) {
    std::vector<Scalar> los{Scalar(0)};
    for (std::size_t k = 1; k <= depth; ++k) {
      std::vector<Scalar> next;
      next.reserve(los.size() * 2);
      for (const auto& lo : los) {
        next.push_back(lo);
        next.push_back(round_to_bits(lo + shifts_[k], precision_bits));
      }
      los = std::move(next);
    }
    std::vector<Interval> iv;
    iv.reserve(los.size());
    for (auto& lo : los) iv.push_back({lo, lo + lengths_.back()});
    intervals_ = IntervalSet1D(std::move(iv));
    materialized_ = true;
  }
}

const IntervalSet1D& CantorApprox::intervals() const {
  if (!materialized_) throw DomainError("Cantor approximation deeper than " + std::to_string(kMaxMaterializedDepth) +
                                        " is not materialised");
  return intervals_;
}

std::uint64_t CantorApprox::local_count(const Scalar& x, const Scalar& R, const Scalar& r) const {
  if (r <= 0) throw DomainError("covering radius must be positive");
  const Scalar a = x - R, b = x + R, two_r = 2 * r;
  bool open = false;
  Scalar reach;
  std::uint64_t count = 0;
  auto feed = [&](const Scalar& lo, const Scalar& hi) {
    if (!open || lo > reach) {
      open = true;
      ++count;
      reach = lo + two_r;
    }
    if (hi > reach) {
      Scalar extra = ceil((hi - reach) / two_r);
      if (extra >= Scalar(kCountLimit)) throw DomainError("covering count exceeds 2^62");
      count += extra.convert_to<std::uint64_t>();
      reach += extra * two_r;
    }
  };
  struct Node {
    Scalar lo;
    std::size_t k;
  };
  std::vector<Node> stack{{Scalar(0), 0}};
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    const Scalar hi = node.lo + lengths_[node.k];
    if (hi < a || node.lo > b) continue;
    if (open && hi <= reach) continue;
    if (node.k == depth_) {
      feed(std::max(node.lo, a), std::min(hi, b));
      continue;
    }
    if (node.lo >= a && hi <= b && lengths_[node.k] <= two_r && (!open || node.lo > reach)) {
      feed(node.lo, node.lo);  // the whole subtree fits in one new ball
      continue;
    }
    stack.push_back({node.lo + shifts_[node.k + 1], node.k + 1});
    stack.push_back({std::move(node.lo), node.k + 1});
  }
  if (count >= kCountLimit) throw DomainError("covering count exceeds 2^62");
  return count;
}

std::vector<Interval> CantorApprox::members() const {
  std::vector<Interval> out;
  for (auto& lo : level_left_endpoints(depth_)) out.push_back({lo, lo + lengths_.back()});
  return out;
}

std::uint64_t CantorApprox::covering_count(const Scalar& r) const {
  return local_count(lengths_[0] / 2, lengths_[0] / 2, r);
}

std::vector<Scalar> CantorApprox::level_left_endpoints(std::size_t k) const {
  if (k > depth_ || k > 24) throw DomainError("level out of range for enumeration");
  return sample_left_endpoints(k, std::size_t{1} << k);
}

std::vector<Scalar> CantorApprox::sample_left_endpoints(std::size_t k, std::size_t cap) const {
  if (k > depth_ || k > 62) throw DomainError("level out of range for sampling");
  if (cap == 0) return {};
  const std::uint64_t total = std::uint64_t{1} << k;
  const std::uint64_t m = std::min<std::uint64_t>(total, cap);
  std::vector<Scalar> out;
  out.reserve(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    // spread addresses evenly; unsigned __int128 avoids overflow of i * total
    auto addr = static_cast<std::uint64_t>((static_cast<unsigned __int128>(i) * total) / m);
    Scalar lo = 0;
    for (std::size_t level = 1; level <= k; ++level) {
      if (addr >> (k - level) & 1) lo += shifts_[level];
    }
    out.push_back(lo);
  }
  return out;
}

CantorApprox cantor_step(const RatioSchedule& schedule, std::size_t n, int precision_bits) {
  return CantorApprox(schedule, n, precision_bits);
}

SimilarityIFS1D::SimilarityIFS1D(std::vector<SimilarityMap> maps, std::vector<std::vector<int>> transition)
    : maps_(std::move(maps)), transition_(std::move(transition)) {
  if (maps_.empty()) throw DomainError("IFS needs at least one map");
  if (maps_.size() > 0xffff) throw DomainError("too many maps");
  for (const auto& m : maps_) {
    if (!(m.ratio > 0 && m.ratio < 1)) throw DomainError("similarity ratio outside (0, 1)");
  }
  if (!transition_.empty()) {
    if (transition_.size() != maps_.size()) throw DomainError("transition matrix has the wrong size");
    for (const auto& row : transition_) {
      if (row.size() != maps_.size()) throw DomainError("transition matrix is not square");
      bool any = false;
      for (int v : row) {
        if (v != 0 && v != 1) throw DomainError("transition matrix entries must be 0 or 1");
        any = any || v == 1;
      }
      if (!any) throw DomainError("transition matrix has a dead state");
    }
  }
  Scalar lo, hi;
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    Scalar fp = maps_[i].translation / (1 - maps_[i].ratio);
    if (i == 0 || fp < lo) lo = fp;
    if (i == 0 || fp > hi) hi = fp;
  }
  if (lo == hi) hi = lo + 1;
  base_ = {lo, hi};
}

SimilarityIFS1D SimilarityIFS1D::uniform(const Scalar& ratio, const std::vector<Scalar>& translations) {
  std::vector<SimilarityMap> maps;
  for (const auto& t : translations) maps.push_back({ratio, t});
  return SimilarityIFS1D(std::move(maps));
}

bool SimilarityIFS1D::allowed(std::size_t from, std::size_t to) const {
  return transition_.empty() || transition_[from][to] == 1;
}

bool SimilarityIFS1D::admissible(const Word& w) const {
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    if (!allowed(w[i], w[i + 1])) return false;
  }
  return true;
}

Scalar SimilarityIFS1D::min_ratio() const {
  Scalar m = maps_.front().ratio;
  for (const auto& f : maps_) m = std::min(m, f.ratio);
  return m;
}

Scalar SimilarityIFS1D::max_ratio() const {
  Scalar m = maps_.front().ratio;
  for (const auto& f : maps_) m = std::max(m, f.ratio);
  return m;
}

Scalar SimilarityIFS1D::moran_constant() const { return 1 / min_ratio(); }

Interval SimilarityIFS1D::cylinder(const Word& w) const {
  Scalar rho = 1, t = 0;
  for (auto s : w) {
    t += rho * maps_.at(s).translation;
    rho *= maps_[s].ratio;
  }
  return {rho * base_.lo + t, rho * base_.hi + t};
}

namespace {

struct Cyl {
  Scalar rho, t;
  std::uint16_t last;
};

constexpr std::size_t kMaxWords = std::size_t{1} << 24;

}  // namespace

MoranCut moran_cut(const SimilarityIFS1D& ifs, const Scalar& r) {
  const Scalar W = ifs.base().length();
  if (!(r > 0 && r <= W)) throw DomainError("cut scale must lie in (0, |W|]");
  MoranCut cut;
  cut.r = r;
  cut.D = ifs.moran_constant();
  struct Item {
    Word w;
    Scalar rho, t;
  };
  std::vector<Item> stack{{Word{}, Scalar(1), Scalar(0)}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    for (std::size_t i = ifs.size(); i-- > 0;) {
      if (!it.w.empty() && !ifs.allowed(it.w.back(), i)) continue;
      Item child{it.w, it.rho * ifs.maps()[i].ratio, it.t + it.rho * ifs.maps()[i].translation};
      child.w.push_back(static_cast<std::uint16_t>(i));
      if (child.rho * W < r) {
        Interval J{child.rho * ifs.base().lo + child.t, child.rho * ifs.base().hi + child.t};
        if (!(r <= cut.D * J.length())) throw DomainError("cut word violates |J| < r <= D|J|");
        cut.words.push_back(std::move(child.w));
        cut.intervals.push_back(J);
        if (cut.words.size() > kMaxWords) throw DomainError("cut too large; increase r");
      } else {
        stack.push_back(std::move(child));
      }
    }
  }
  return cut;
}

IntervalSet1D ifs_attractor(const SimilarityIFS1D& ifs, std::size_t depth, int precision_bits) {
  check_precision_bits(precision_bits);
  std::vector<Cyl> level{{Scalar(1), Scalar(0), 0}};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<Cyl> next;
    next.reserve(level.size() * ifs.size());
    for (const auto& c : level) {
      for (std::size_t i = 0; i < ifs.size(); ++i) {
        if (d > 0 && !ifs.allowed(c.last, i)) continue;
        next.push_back({round_to_bits(c.rho * ifs.maps()[i].ratio, precision_bits),
                        round_to_bits(c.t + c.rho * ifs.maps()[i].translation, precision_bits),
                        static_cast<std::uint16_t>(i)});
      }
      if (next.size() > kMaxWords) throw DomainError("attractor depth too large");
    }
    level = std::move(next);
  }
  std::vector<Interval> iv;
  iv.reserve(level.size());
  for (const auto& c : level) iv.push_back({c.rho * ifs.base().lo + c.t, c.rho * ifs.base().hi + c.t});
  return IntervalSet1D(std::move(iv));
}

MoranReport validate_moran(const SimilarityIFS1D& ifs, std::size_t depth) {
  if (depth < 2) throw DomainError("validation depth must be at least 2");
  MoranReport rep;
  std::vector<std::vector<Word>> words(depth + 1);
  words[0].push_back({});
  for (std::size_t d = 1; d <= depth; ++d) {
    for (const auto& w : words[d - 1]) {
      for (std::size_t i = 0; i < ifs.size(); ++i) {
        if (!w.empty() && !ifs.allowed(w.back(), i)) continue;
        Word c = w;
        c.push_back(static_cast<std::uint16_t>(i));
        words[d].push_back(std::move(c));
      }
    }
    if (words[d].size() > 200000) throw DomainError("validation depth too large for this system");
  }
  auto note = [&](const std::string& s) {
    if (rep.violations.size() < 32) rep.violations.push_back(s);
  };
  auto name = [](const Word& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "." : "") + std::to_string(w[i] + 1);
    return s.empty() ? std::string("()") : s;
  };
  rep.d_m3 = 0;
  rep.d_m4 = 0;
  Scalar prev_max = ifs.base().length();
  const Scalar tol = ldexp(prev_max, -200);
  for (std::size_t d = 1; d <= depth; ++d) {
    Scalar level_max = 0;
    for (const auto& w : words[d]) {
      Interval J = ifs.cylinder(w);
      Interval P = ifs.cylinder(Word(w.begin(), w.end() - 1));
      if (!(P.lo - tol <= J.lo && J.hi <= P.hi + tol)) {
        rep.m1 = false;
        note("M1: J_" + name(w) + " not inside its parent");
      }
      rep.d_m4 = std::max(rep.d_m4, P.length() / J.length());
      level_max = std::max(level_max, J.length());
    }
    if (!(level_max < prev_max)) {
      rep.m2 = false;
      note("M2: diameters do not shrink at depth " + std::to_string(d));
    }
    prev_max = level_max;
  }
  for (std::size_t a = 1; a < depth; ++a) {
    for (std::size_t b = 1; a + b <= depth; ++b) {
      for (const auto& w : words[a]) {
        for (const auto& t : words[b]) {
          if (!ifs.allowed(w.back(), t.front())) continue;
          Word wt = w;
          wt.insert(wt.end(), t.begin(), t.end());
          Scalar ratio = ifs.cylinder(wt).length() / (ifs.cylinder(w).length() * ifs.cylinder(t).length());
          rep.d_m3 = std::max(rep.d_m3, ratio);
        }
      }
    }
  }
  for (std::size_t a = 1; a < depth; ++a) {
    for (const auto& tau : words[a]) {
      for (std::size_t l = 1; a + l <= depth; ++l) {
        const auto& ws = words[l];
        for (std::size_t i = 0; i < ws.size(); ++i) {
          if (!ifs.allowed(tau.back(), ws[i].front())) continue;
          Word ti = tau;
          ti.insert(ti.end(), ws[i].begin(), ws[i].end());
          Interval Jti = ifs.cylinder(ti), Ji = ifs.cylinder(ws[i]);
          for (std::size_t j = i + 1; j < ws.size(); ++j) {
            if (!ifs.allowed(tau.back(), ws[j].front())) continue;
            Word tj = tau;
            tj.insert(tj.end(), ws[j].begin(), ws[j].end());
            if (!Jti.intersects(ifs.cylinder(tj)) && Ji.intersects(ifs.cylinder(ws[j]))) {
              rep.m5 = false;
              note("M5: J_" + name(ws[i]) + " meets J_" + name(ws[j]) + " but their images under " + name(tau) +
                   " are disjoint");
            }
          }
        }
      }
    }
  }
  rep.d = std::max({Scalar(1), rep.d_m3, rep.d_m4});
  return rep;
}

FAlphaApprox f_alpha_step(const Scalar& alpha, std::size_t k, int precision_bits) {
  check_precision_bits(precision_bits);
  if (!(alpha > 0 && alpha < 1)) throw DomainError("alpha must lie in (0, 1)");
  if (k < 1) throw DomainError("F_alpha depth must be at least 1");
  if (k > 7) throw DomainError("F_alpha depth above 7 has more than 2^28 intervals");
  FAlphaApprox out;
  out.alpha = alpha;
  out.depth = k;
  out.level_lengths.emplace_back(1);
  out.level_gaps.emplace_back(0);
  std::vector<Scalar> los{Scalar(0)};
  for (std::size_t j = 1; j <= k; ++j) {
    const std::uint64_t m = std::uint64_t{1} << j;
    Scalar expo = Scalar(j) / alpha;
    Scalar factor = expo == floor(expo) ? ldexp(Scalar(1), -expo.convert_to<int>()) : pow(Scalar(2), -expo);
    if (!(Scalar(m) * factor < 1)) throw DomainError("F_alpha children would overlap at step " + std::to_string(j));
    const Scalar parent = out.level_lengths.back();
    const Scalar child = round_to_bits(parent * factor, precision_bits);
    const Scalar gap = round_to_bits((parent - Scalar(m) * child) / (m - 1), precision_bits);
    std::vector<Scalar> offsets(m);
    for (std::uint64_t i = 0; i < m; ++i) offsets[i] = i + 1 == m ? parent - child : Scalar(i) * (child + gap);
    std::vector<Scalar> next;
    next.reserve(los.size() * m);
    for (const auto& lo : los) {
      for (const auto& off : offsets) next.push_back(round_to_bits(lo + off, precision_bits));
    }
    los = std::move(next);
    out.level_lengths.push_back(child);
    out.level_gaps.push_back(gap);
  }
  std::vector<Interval> iv;
  iv.reserve(los.size());
  const Scalar len = out.level_lengths.back();
  for (auto& lo : los) iv.push_back({lo, lo + len});
  out.intervals = IntervalSet1D(std::move(iv));
  return out;
}

StrictSchedule example_strict_schedule(const StrictParams& p) {
  if (!(1 <= p.a && p.a <= p.alpha && p.alpha <= p.u && p.u < p.v && p.v <= p.beta && p.beta <= p.b)) {
    throw DomainError("strict example needs 1 <= a <= alpha <= u < v <= beta <= b");
  }
  if (p.s1 < 1 || p.growth < 2) throw DomainError("s_j must be increasing (s1 >= 1, growth >= 2)");
  if (p.blocks < 1 || p.blocks > 40) throw DomainError("block count must lie in [1, 40]");
  StrictSchedule out;
  out.s.assign(p.blocks + 1, 0);
  out.t.assign(p.blocks + 1, 0);
  out.t_residue.assign(p.blocks + 1, 0.0);
  for (std::size_t j = 1; j <= p.blocks; ++j) {
    Scalar s = Scalar(p.s1) * pow(Scalar(p.growth), static_cast<int>(j - 1));
    if (s > Scalar(std::uint64_t{1} << 50)) throw DomainError("s_j overflows the step counter");
    out.s[j] = s.convert_to<std::uint64_t>();
    bool even = j % 2 == 0;
    bool collapse = even ? p.u == p.alpha : p.v == p.beta;
    if (collapse) {
      out.t[j] = out.s[j];
    } else {
      Scalar exact = even ? s * (p.v - p.alpha) / (p.u - p.alpha) : s * (p.beta - p.u) / (p.beta - p.v);
      Scalar rounded = round(exact);
      if (rounded < s) rounded = s;
      out.t[j] = rounded.convert_to<std::uint64_t>();
      out.t_residue[j] = (rounded - exact).convert_to<double>();
    }
  }
  std::vector<RatioSchedule::Segment> segs;
  std::uint64_t filled = 0;
  auto phase = [&](const Scalar& e, std::uint64_t lo, std::uint64_t hi) {
    if (hi < lo) return;
    if (lo != filled + 1) {
      throw DomainError("strict schedule phases do not tile; s_j grows too slowly for these exponents");
    }
    segs.push_back({hi - lo + 1, e});
    filled = hi;
  };
  for (std::size_t m = 1; m <= p.blocks; ++m) {
    if (m % 2 == 1) {
      std::uint64_t j = (m - 1) / 2;
      phase(p.u, out.t[2 * j] + j + 1, out.s[m]);
      phase(p.beta, out.s[m] + 1, out.t[m]);
      phase(p.b, out.t[m] + 1, out.t[m] + j);
    } else {
      std::uint64_t j = m / 2;
      phase(p.v, out.t[2 * j - 1] + j, out.s[m]);
      phase(p.alpha, out.s[m] + 1, out.t[m]);
      phase(p.a, out.t[m] + 1, out.t[m] + j);
    }
  }
  out.schedule = RatioSchedule::from_segments(std::move(segs));
  return out;
}

PointSet1D decreasing_gap_points(const std::function<Scalar(std::uint64_t)>& rule, std::uint64_t n) {
  if (n < 1) throw DomainError("sequence needs at least one point");
  std::vector<Scalar> a;
  a.reserve(n);
  for (std::uint64_t k = 1; k <= n; ++k) a.push_back(rule(k));
  for (std::uint64_t k = 1; k < n; ++k) {
    if (!(a[k] < a[k - 1])) throw DomainError("sequence not decreasing at k = " + std::to_string(k));
    if (k + 1 < n && a[k - 1] - a[k] < a[k] - a[k + 1]) {
      throw DomainError("gaps not decreasing at k = " + std::to_string(k));
    }
  }
  std::reverse(a.begin(), a.end());
  return PointSet1D(std::move(a));
}

Scalar rule_inverse(std::uint64_t k) { return Scalar(1) / Scalar(k); }

Scalar rule_exp_neg_sqrt(std::uint64_t k) {
  const long double e2 = -std::sqrt(static_cast<long double>(k)) * 1.44269504088896340735992468100189214L;
  return exp2_of(e2);
}

std::function<Scalar(std::uint64_t)> rule_power(const Scalar& p) {
  if (!(p > 0)) throw DomainError("power rule needs p > 0");
  return [p](std::uint64_t k) { return pow(Scalar(k), -p); };
}

std::function<Scalar(std::uint64_t)> rule_arithmetic(std::uint64_t n) {
  if (n < 1) throw DomainError("arithmetic rule needs n >= 1");
  return [n](std::uint64_t k) { return 1 - Scalar(k) / Scalar(n); };
}

ProjectionExample::ProjectionExample(int jmax) : jmax_(jmax) {
  if (jmax < 1 || jmax > 20) throw DomainError("jmax must lie in [1, 20]");
  std::vector<Scalar> cantor_los{Scalar(0)};  // step-(j-1) Cantor left endpoints
  levels_.resize(jmax + 1);
  for (int j = 1; j <= jmax; ++j) {
    const Scalar q = ldexp(Scalar(1), -2 * j);  // 4^{-j}
    std::vector<Scalar> ys;
    ys.reserve(cantor_los.size() * 2);
    for (const auto& c : cantor_los) {
      ys.push_back(c + q);
      ys.push_back(c + 3 * q);
    }
    auto& lvl = levels_[j];
    lvl.reserve(ys.size());
    const Scalar x0 = ldexp(Scalar(1), -j);
    for (std::size_t i = 0; i < ys.size(); ++i) lvl.push_back({x0 + Scalar(i) * q, ys[i]});
    std::vector<Scalar> next;
    next.reserve(cantor_los.size() * 2);
    for (const auto& c : cantor_los) {
      next.push_back(c);
      next.push_back(c + 3 * q);
    }
    cantor_los = std::move(next);
  }
}

PointSet2D ProjectionExample::level(int j) const {
  if (j < 1 || j > jmax_) throw DomainError("projection level out of range");
  return PointSet2D(levels_[j]);
}

PointSet1D ProjectionExample::level_x(int j) const {
  if (j < 1 || j > jmax_) throw DomainError("projection level out of range");
  std::vector<Scalar> xs;
  for (const auto& p : levels_[j]) xs.push_back(p.x);
  return PointSet1D(std::move(xs));
}

PointSet2D ProjectionExample::set() const {
  std::vector<Point2> all;
  for (int j = 1; j <= jmax_; ++j) all.insert(all.end(), levels_[j].begin(), levels_[j].end());
  return PointSet2D(std::move(all));
}

PointSet1D ProjectionExample::x_projection() const {
  std::vector<Scalar> xs;
  for (int j = 1; j <= jmax_; ++j)
    for (const auto& p : levels_[j]) xs.push_back(p.x);
  return PointSet1D(std::move(xs));
}

ProjectionExample projection_example(int jmax) { return ProjectionExample(jmax); }

ProductSet product_set(const IntervalSet1D& a, const IntervalSet1D& b) {
  if (a.empty() || b.empty()) throw DomainError("product of an empty set");
  if (static_cast<double>(a.size()) * static_cast<double>(b.size()) > 1e7) throw DomainError("product too large");
  ProductSet out;
  std::vector<Point2> corners;
  for (const auto& i : a.intervals()) {
    for (const auto& j : b.intervals()) {
      out.cells.emplace_back(i, j);
      corners.push_back({i.lo, j.lo});
      corners.push_back({i.lo, j.hi});
      corners.push_back({i.hi, j.lo});
      corners.push_back({i.hi, j.hi});
    }
  }
  out.corners = PointSet2D(std::move(corners));
  return out;
}

ProductSet product_set(const PointSet1D& a, const PointSet1D& b) {
  return product_set(to_interval_set(a), to_interval_set(b));
}

void write_set(std::ostream& os, const IntervalSet1D& s) {
  for (const auto& iv : s.intervals()) os << to_decimal(iv.lo) << ' ' << to_decimal(iv.hi) << '\n';
}

void write_set(std::ostream& os, const PointSet1D& s) {
  for (const auto& x : s.points()) os << to_decimal(x) << '\n';
}

void write_set(std::ostream& os, const PointSet2D& s) {
  for (const auto& p : s.points()) os << to_decimal(p.x) << ' ' << to_decimal(p.y) << '\n';
}

}  // namespace qadim
