#pragma once

#include "qadim/scalar.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qadim {

struct Interval {
  Scalar lo;
  Scalar hi;
  Scalar length() const { return hi - lo; }
  bool contains(const Scalar& x) const { return lo <= x && x <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Finite union of closed intervals, sorted and pairwise disjoint.
// Overlapping or touching inputs are merged on construction.
class IntervalSet1D {
 public:
  IntervalSet1D() = default;
  explicit IntervalSet1D(std::vector<Interval> intervals);

  std::span<const Interval> intervals() const { return items_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const Scalar& lo() const;
  const Scalar& hi() const;
  Scalar diameter() const { return empty() ? Scalar(0) : hi() - lo(); }
  Scalar min_len() const;
  Scalar max_len() const;
  bool contains(const Scalar& x) const;

 private:
  std::vector<Interval> items_;
};

// Strictly increasing finite point set (duplicates dropped on construction).
class PointSet1D {
 public:
  PointSet1D() = default;
  explicit PointSet1D(std::vector<Scalar> points);

  std::span<const Scalar> points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  Scalar diameter() const { return empty() ? Scalar(0) : pts_.back() - pts_.front(); }
  Scalar min_gap() const;

 private:
  std::vector<Scalar> pts_;
};

struct Point2 {
  Scalar x;
  Scalar y;
  friend bool operator==(const Point2&, const Point2&) = default;
  friend bool operator<(const Point2& a, const Point2& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

// Sup-norm geometry; lexicographically sorted, no duplicates.
class PointSet2D {
 public:
  PointSet2D() = default;
  explicit PointSet2D(std::vector<Point2> points);

  std::span<const Point2> points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }
  bool empty() const { return pts_.empty(); }
  Scalar diameter() const;
  // Smallest sup-norm distance between two distinct points.
  Scalar min_distance() const;

 private:
  std::vector<Point2> pts_;
};

inline constexpr std::uint64_t kCountLimit = std::uint64_t{1} << 62;

// Minimum number of closed balls of radius r covering the set (greedy, optimal in 1-D).
std::uint64_t covering_number_1d(const IntervalSet1D& s, const Scalar& r);
std::uint64_t covering_number_1d(const PointSet1D& s, const Scalar& r);
std::uint64_t covering_number_1d(std::span<const Interval> sorted_disjoint, const Scalar& r);
std::uint64_t covering_number_1d(std::span<const Scalar> sorted_points, const Scalar& r);

// N_r(S ∩ B(x, R)) without materialising the restriction.
std::uint64_t local_covering_number(const IntervalSet1D& s, const Scalar& x, const Scalar& R, const Scalar& r);
std::uint64_t local_covering_number(const PointSet1D& s, const Scalar& x, const Scalar& R, const Scalar& r);
std::uint64_t local_box_count(const PointSet2D& s, const Point2& x, const Scalar& R, const Scalar& r);

// Set intersected with the closed ball B(x, R).  In the plane the ball is the
// closed square with centre x and side R.
IntervalSet1D local_restrict(const IntervalSet1D& s, const Scalar& x, const Scalar& R);
PointSet1D local_restrict(const PointSet1D& s, const Scalar& x, const Scalar& R);
PointSet2D local_restrict(const PointSet2D& s, const Point2& x, const Scalar& R);

// Number of cells of the mesh-r grid anchored at the origin that meet the set.
std::uint64_t box_count_2d(const PointSet2D& s, const Scalar& r);
std::uint64_t box_count_2d(std::span<const Point2> pts, const Scalar& r);

struct CenterPolicy {
  std::size_t cap = 4096;
  bool exhaustive = false;
  std::uint64_t seed = 0;
};

// Candidate centres: every element when exhaustive or small, otherwise one per
// equal-width positional stratum.  Returned sorted, without duplicates.
std::vector<Scalar> select_centers(const IntervalSet1D& s, const CenterPolicy& policy);
std::vector<Scalar> select_centers(const PointSet1D& s, const CenterPolicy& policy);
std::vector<Point2> select_centers(const PointSet2D& s, const CenterPolicy& policy);

template <class C>
struct NrrResult {
  std::uint64_t count = 0;
  C witness{};
};

// max over centres of N_r(S ∩ B(x, R)); ties keep the smallest centre.
NrrResult<Scalar> nrr(const IntervalSet1D& s, const Scalar& r, const Scalar& R, const CenterPolicy& policy);
NrrResult<Scalar> nrr(const PointSet1D& s, const Scalar& r, const Scalar& R, const CenterPolicy& policy);
NrrResult<Point2> nrr(const PointSet2D& s, const Scalar& r, const Scalar& R, const CenterPolicy& policy);

struct HausdorffResult {
  Scalar distance;  // two-sided
  Scalar a_to_b;    // sup over a of dist(a, B)
  Scalar b_to_a;
};

HausdorffResult hausdorff_distance(const PointSet1D& a, const PointSet1D& b);
HausdorffResult hausdorff_distance(const IntervalSet1D& a, const IntervalSet1D& b);
HausdorffResult hausdorff_distance(const PointSet2D& a, const PointSet2D& b);

IntervalSet1D to_interval_set(const PointSet1D& p);

// Three members of a basic-set family whose union covers the family's union
// inside B(x, R).  Members must have length in [2R, 2DR]; x must lie in one.
std::vector<Interval> three_interval_cover_oracle(std::span<const Interval> family, const Scalar& x,
                                                  const Scalar& R, const Scalar& D);

}  // namespace qadim
