#include "qadim/setcore.hpp"

#include <algorithm>
#include <random>

namespace qadim {

namespace {

std::uint64_t to_count(const Scalar& v) {
  if (v >= Scalar(kCountLimit)) throw DomainError("covering count exceeds 2^62");
  return v.convert_to<std::uint64_t>();
}

// First index in [from, n) whose key exceeds limit; keys are non-decreasing.
template <class Key>
std::size_t gallop_past(std::size_t from, std::size_t n, const Scalar& limit, Key key) {
  if (from >= n || key(from) > limit) return from;
  std::size_t lo = from, step = 1, hi = from + 1;
  while (hi < n && key(hi) <= limit) {
    lo = hi;
    step *= 2;
    hi = from + step;
  }
  hi = std::min(hi, n);
  // invariant: key(lo) <= limit, key(hi) > limit or hi == n
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (key(mid) <= limit) lo = mid; else hi = mid;
  }
  return hi;
}

// Greedy cover of n sorted disjoint closed intervals given by accessors.
template <class Lo, class Hi>
std::uint64_t greedy_cover(std::size_t n, const Scalar& r, Lo lo, Hi hi) {
  if (r <= 0) throw DomainError("covering radius must be positive");
  const Scalar two_r = 2 * r;
  std::uint64_t count = 0;
  std::size_t i = 0;
  while (i < n) {
    Scalar reach = lo(i) + two_r;
    ++count;
    std::size_t j = i + 1;
    for (;;) {
      // intervals j-1 and earlier start within reach; the last may stick out
      const Scalar last_hi = hi(j - 1);
      if (last_hi > reach) {
        Scalar extra = ceil((last_hi - reach) / two_r);
        count += to_count(extra);
        if (count >= kCountLimit) throw DomainError("covering count exceeds 2^62");
        reach += extra * two_r;
      }
      std::size_t k = gallop_past(j, n, reach, lo);
      if (k == j) break;
      j = k;
    }
    i = j;
  }
  return count;
}

template <class T, class Key>
std::vector<T> stratified(std::span<const T> items, const CenterPolicy& policy, Key key) {
  std::vector<T> out;
  if (items.empty()) return out;
  if (policy.exhaustive || items.size() <= policy.cap || policy.cap < 2) {
    out.assign(items.begin(), items.end());
    return out;
  }
  const Scalar a = key(items.front());
  const Scalar width = (key(items.back()) - a) / policy.cap;
  std::mt19937_64 rng(policy.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t prev = items.size();
  for (std::size_t b = 0; b < policy.cap; ++b) {
    double u = policy.seed == 0 ? 0.0 : unit(rng);
    Scalar target = a + (Scalar(b) + u) * width;
    auto it = std::lower_bound(items.begin(), items.end(), target,
                               [&](const T& v, const Scalar& t) { return key(v) < t; });
    if (it == items.end()) continue;
    if (key(*it) >= a + Scalar(b + 1) * width && b + 1 < policy.cap) continue;  // empty stratum
    std::size_t idx = static_cast<std::size_t>(it - items.begin());
    if (idx != prev) out.push_back(*it);
    prev = idx;
  }
  if (!(out.back() == items.back())) out.push_back(items.back());
  return out;
}

}  // namespace

IntervalSet1D::IntervalSet1D(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (iv.hi < iv.lo) throw DomainError("interval with hi < lo");
  }
  auto by_lo = [](const Interval& a, const Interval& b) { return a.lo < b.lo; };
  if (!std::is_sorted(intervals.begin(), intervals.end(), by_lo)) {
    std::sort(intervals.begin(), intervals.end(), by_lo);
  }
  items_.reserve(intervals.size());
  for (auto& iv : intervals) {
    if (!items_.empty() && iv.lo <= items_.back().hi) {
      if (iv.hi > items_.back().hi) items_.back().hi = std::move(iv.hi);
    } else {
      items_.push_back(std::move(iv));
    }
  }
}

const Scalar& IntervalSet1D::lo() const {
  if (empty()) throw DomainError("empty interval set has no bounds");
  return items_.front().lo;
}

const Scalar& IntervalSet1D::hi() const {
  if (empty()) throw DomainError("empty interval set has no bounds");
  return items_.back().hi;
}

Scalar IntervalSet1D::min_len() const {
  if (empty()) return 0;
  Scalar m = items_.front().length();
  for (const auto& iv : items_) m = std::min(m, iv.length());
  return m;
}

Scalar IntervalSet1D::max_len() const {
  Scalar m = 0;
  for (const auto& iv : items_) m = std::max(m, iv.length());
  return m;
}

bool IntervalSet1D::contains(const Scalar& x) const {
  auto it = std::lower_bound(items_.begin(), items_.end(), x,
                             [](const Interval& iv, const Scalar& v) { return iv.hi < v; });
  return it != items_.end() && it->lo <= x;
}

PointSet1D::PointSet1D(std::vector<Scalar> points) : pts_(std::move(points)) {
  if (!std::is_sorted(pts_.begin(), pts_.end())) std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

Scalar PointSet1D::min_gap() const {
  if (pts_.size() < 2) return 0;
  Scalar g = pts_[1] - pts_[0];
  for (std::size_t i = 2; i < pts_.size(); ++i) g = std::min(g, pts_[i] - pts_[i - 1]);
  return g;
}

PointSet2D::PointSet2D(std::vector<Point2> points) : pts_(std::move(points)) {
  if (!std::is_sorted(pts_.begin(), pts_.end())) std::sort(pts_.begin(), pts_.end());
  pts_.erase(std::unique(pts_.begin(), pts_.end()), pts_.end());
}

Scalar PointSet2D::diameter() const {
  if (pts_.empty()) return 0;
  Scalar ylo = pts_.front().y, yhi = ylo;
  for (const auto& p : pts_) {
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  return std::max(pts_.back().x - pts_.front().x, yhi - ylo);
}

Scalar PointSet2D::min_distance() const {
  if (pts_.size() < 2) return 0;
  Scalar best = diameter();
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    for (std::size_t j = i + 1; j < pts_.size(); ++j) {
      Scalar dx = pts_[j].x - pts_[i].x;
      if (dx >= best) break;
      Scalar d = std::max(dx, abs(pts_[j].y - pts_[i].y));
      if (d < best) best = d;
    }
  }
  return best;
}

std::uint64_t covering_number_1d(std::span<const Interval> iv, const Scalar& r) {
  return greedy_cover(
      iv.size(), r, [&](std::size_t i) -> const Scalar& { return iv[i].lo; },
      [&](std::size_t i) -> const Scalar& { return iv[i].hi; });
}

std::uint64_t covering_number_1d(std::span<const Scalar> p, const Scalar& r) {
  auto key = [&](std::size_t i) -> const Scalar& { return p[i]; };
  return greedy_cover(p.size(), r, key, key);
}

std::uint64_t covering_number_1d(const IntervalSet1D& s, const Scalar& r) {
  return covering_number_1d(s.intervals(), r);
}

std::uint64_t covering_number_1d(const PointSet1D& s, const Scalar& r) {
  return covering_number_1d(s.points(), r);
}

std::uint64_t local_covering_number(const IntervalSet1D& s, const Scalar& x, const Scalar& R,
                                    const Scalar& r) {
  auto iv = s.intervals();
  const Scalar a = x - R, b = x + R;
  auto first = std::lower_bound(iv.begin(), iv.end(), a,
                                [](const Interval& v, const Scalar& t) { return v.hi < t; });
  auto last = std::upper_bound(first, iv.end(), b,
                               [](const Scalar& t, const Interval& v) { return t < v.lo; });
  if (first == last) return 0;
  std::span<const Interval> sub(first, last);
  const std::size_t n = sub.size();
  return greedy_cover(
      n, r,
      [&](std::size_t i) -> Scalar { return i == 0 ? std::max(sub[0].lo, a) : sub[i].lo; },
      [&](std::size_t i) -> Scalar { return i + 1 == n ? std::min(sub[i].hi, b) : sub[i].hi; });
}

std::uint64_t local_covering_number(const PointSet1D& s, const Scalar& x, const Scalar& R,
                                    const Scalar& r) {
  auto p = s.points();
  auto first = std::lower_bound(p.begin(), p.end(), x - R);
  auto last = std::upper_bound(first, p.end(), x + R);
  return covering_number_1d(std::span<const Scalar>(first, last), r);
}

IntervalSet1D local_restrict(const IntervalSet1D& s, const Scalar& x, const Scalar& R) {
  if (R < 0) throw DomainError("negative ball radius");
  const Scalar a = x - R, b = x + R;
  std::vector<Interval> out;
  for (const auto& iv : s.intervals()) {
    if (iv.hi < a) continue;
    if (iv.lo > b) break;
    out.push_back({std::max(iv.lo, a), std::min(iv.hi, b)});
  }
  return IntervalSet1D(std::move(out));
}

PointSet1D local_restrict(const PointSet1D& s, const Scalar& x, const Scalar& R) {
  if (R < 0) throw DomainError("negative ball radius");
  auto p = s.points();
  auto first = std::lower_bound(p.begin(), p.end(), x - R);
  auto last = std::upper_bound(first, p.end(), x + R);
  return PointSet1D(std::vector<Scalar>(first, last));
}

namespace {

std::span<const Point2> x_slab(std::span<const Point2> p, const Scalar& xlo, const Scalar& xhi) {
  auto first = std::lower_bound(p.begin(), p.end(), xlo,
                                [](const Point2& q, const Scalar& t) { return q.x < t; });
  auto last = std::upper_bound(first, p.end(), xhi,
                               [](const Scalar& t, const Point2& q) { return t < q.x; });
  return {first, last};
}

}  // namespace

PointSet2D local_restrict(const PointSet2D& s, const Point2& x, const Scalar& R) {
  if (R < 0) throw DomainError("negative ball side");
  const Scalar h = R / 2;
  std::vector<Point2> out;
  for (const auto& q : x_slab(s.points(), x.x - h, x.x + h)) {
    if (abs(q.y - x.y) <= h) out.push_back(q);
  }
  return PointSet2D(std::move(out));
}

std::uint64_t box_count_2d(std::span<const Point2> pts, const Scalar& r) {
  if (r <= 0) throw DomainError("grid mesh must be positive");
  std::vector<std::pair<Scalar, Scalar>> cells;
  cells.reserve(pts.size());
  for (const auto& q : pts) cells.emplace_back(floor(q.x / r), floor(q.y / r));
  std::sort(cells.begin(), cells.end());
  return static_cast<std::uint64_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

std::uint64_t box_count_2d(const PointSet2D& s, const Scalar& r) {
  return box_count_2d(s.points(), r);
}

std::uint64_t local_box_count(const PointSet2D& s, const Point2& x, const Scalar& R, const Scalar& r) {
  const Scalar h = R / 2;
  std::vector<Point2> inside;
  for (const auto& q : x_slab(s.points(), x.x - h, x.x + h)) {
    if (abs(q.y - x.y) <= h) inside.push_back(q);
  }
  return box_count_2d(inside, r);
}

std::vector<Scalar> select_centers(const IntervalSet1D& s, const CenterPolicy& policy) {
  std::vector<Scalar> los;
  los.reserve(s.size());
  for (const auto& iv : s.intervals()) los.push_back(iv.lo);
  return stratified<Scalar>(los, policy, [](const Scalar& v) -> const Scalar& { return v; });
}

std::vector<Scalar> select_centers(const PointSet1D& s, const CenterPolicy& policy) {
  return stratified<Scalar>(s.points(), policy, [](const Scalar& v) -> const Scalar& { return v; });
}

std::vector<Point2> select_centers(const PointSet2D& s, const CenterPolicy& policy) {
  return stratified<Point2>(s.points(), policy, [](const Point2& v) -> const Scalar& { return v.x; });
}

namespace {

template <class C, class Count>
NrrResult<C> best_center(const std::vector<C>& centers, Count count) {
  if (centers.empty()) throw DomainError("no centres: the set is empty");
  NrrResult<C> best{0, centers.front()};
  bool first = true;
  for (const auto& c : centers) {
    std::uint64_t n = count(c);
    if (first || n > best.count) best = {n, c};
    first = false;
  }
  return best;
}

}  // namespace

NrrResult<Scalar> nrr(const IntervalSet1D& s, const Scalar& r, const Scalar& R, const CenterPolicy& policy) {
  if (!(r > 0 && r < R)) throw DomainError("nrr needs 0 < r < R");
  return best_center(select_centers(s, policy),
                     [&](const Scalar& c) { return local_covering_number(s, c, R, r); });
}

NrrResult<Scalar> nrr(const PointSet1D& s, const Scalar& r, const Scalar& R, const CenterPolicy& policy) {
  if (!(r > 0 && r < R)) throw DomainError("nrr needs 0 < r < R");
  return best_center(select_centers(s, policy),
                     [&](const Scalar& c) { return local_covering_number(s, c, R, r); });
}

NrrResult<Point2> nrr(const PointSet2D& s, const Scalar& r, const Scalar& R, const CenterPolicy& policy) {
  if (!(r > 0 && r < R)) throw DomainError("nrr needs 0 < r < R");
  return best_center(select_centers(s, policy),
                     [&](const Point2& c) { return local_box_count(s, c, R, r); });
}

IntervalSet1D to_interval_set(const PointSet1D& p) {
  std::vector<Interval> iv;
  iv.reserve(p.size());
  for (const auto& x : p.points()) iv.push_back({x, x});
  return IntervalSet1D(std::move(iv));
}

namespace {

Scalar distance_to(std::span<const Interval> b, const Scalar& x) {
  auto it = std::lower_bound(b.begin(), b.end(), x,
                             [](const Interval& v, const Scalar& t) { return v.hi < t; });
  Scalar best = -1;
  if (it != b.end()) best = it->lo <= x ? Scalar(0) : it->lo - x;
  if (it != b.begin()) {
    Scalar d = x - std::prev(it)->hi;
    if (best < 0 || d < best) best = d;
  }
  return best;
}

// sup over a in A of dist(a, B): attained at endpoints of A or at midpoints of gaps of B.
Scalar directed(std::span<const Interval> a, std::span<const Interval> b) {
  Scalar worst = 0;
  std::size_t g = 0;  // gap g lies between b[g] and b[g+1]
  for (const auto& iv : a) {
    worst = std::max(worst, distance_to(b, iv.lo));
    worst = std::max(worst, distance_to(b, iv.hi));
    while (g + 1 < b.size() && (b[g].hi + b[g + 1].lo) / 2 < iv.lo) ++g;
    for (std::size_t h = g; h + 1 < b.size(); ++h) {
      Scalar mid = (b[h].hi + b[h + 1].lo) / 2;
      if (mid > iv.hi) break;
      worst = std::max(worst, distance_to(b, mid));
    }
  }
  return worst;
}

}  // namespace

HausdorffResult hausdorff_distance(const IntervalSet1D& a, const IntervalSet1D& b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance of an empty set");
  Scalar ab = directed(a.intervals(), b.intervals());
  Scalar ba = directed(b.intervals(), a.intervals());
  return {std::max(ab, ba), ab, ba};
}

HausdorffResult hausdorff_distance(const PointSet1D& a, const PointSet1D& b) {
  return hausdorff_distance(to_interval_set(a), to_interval_set(b));
}

namespace {

Scalar directed(std::span<const Point2> a, std::span<const Point2> b) {
  Scalar worst = 0;
  for (const auto& p : a) {
    auto it = std::lower_bound(b.begin(), b.end(), p.x,
                               [](const Point2& q, const Scalar& t) { return q.x < t; });
    Scalar best = -1;
    auto consider = [&](const Point2& q) {
      Scalar d = std::max(abs(q.x - p.x), abs(q.y - p.y));
      if (best < 0 || d < best) best = d;
    };
    for (auto r = it; r != b.end(); ++r) {
      if (best >= 0 && r->x - p.x >= best) break;
      consider(*r);
    }
    for (auto l = it; l != b.begin();) {
      --l;
      if (best >= 0 && p.x - l->x >= best) break;
      consider(*l);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

HausdorffResult hausdorff_distance(const PointSet2D& a, const PointSet2D& b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance of an empty set");
  Scalar ab = directed(a.points(), b.points());
  Scalar ba = directed(b.points(), a.points());
  return {std::max(ab, ba), ab, ba};
}

std::vector<Interval> three_interval_cover_oracle(std::span<const Interval> family, const Scalar& x,
                                                  const Scalar& R, const Scalar& D) {
  if (!(R > 0)) throw DomainError("ball radius must be positive");
  if (!(D >= 1)) throw DomainError("construction constant D must be at least 1");
  const Scalar slack = ldexp(Scalar(1), -200);
  const Scalar lo_len = 2 * R * (1 - slack), hi_len = 2 * D * R * (1 + slack);
  for (const auto& iv : family) {
    if (iv.length() < lo_len || iv.length() > hi_len) {
      throw DomainError("family member length outside [2R, 2DR]");
    }
  }
  // I1: a member containing x that also contains [x, x+R]; otherwise mirror.
  const Interval* right = nullptr;
  const Interval* left = nullptr;
  for (const auto& iv : family) {
    if (!iv.contains(x)) continue;
    if (!right && iv.hi >= x + R) right = &iv;
    if (!left && iv.lo <= x - R) left = &iv;
  }
  if (!right && !left) throw DomainError("x lies in no family member");
  std::vector<Interval> out;
  if (right) {
    const Interval& i1 = *right;
    const Interval* i2 = &i1;
    const Interval* i3 = nullptr;
    for (const auto& iv : family) {
      if (iv.intersects(i1) && iv.lo < i2->lo) i2 = &iv;
      if (iv.hi < i1.lo && (!i3 || iv.hi > i3->hi)) i3 = &iv;
    }
    out.push_back(i1);
    if (!(*i2 == i1)) out.push_back(*i2);
    if (i3) out.push_back(*i3);
  } else {
    const Interval& i1 = *left;
    const Interval* i2 = &i1;
    const Interval* i3 = nullptr;
    for (const auto& iv : family) {
      if (iv.intersects(i1) && iv.hi > i2->hi) i2 = &iv;
      if (iv.lo > i1.hi && (!i3 || iv.lo < i3->lo)) i3 = &iv;
    }
    out.push_back(i1);
    if (!(*i2 == i1)) out.push_back(*i2);
    if (i3) out.push_back(*i3);
  }
  return out;
}

}  // namespace qadim
