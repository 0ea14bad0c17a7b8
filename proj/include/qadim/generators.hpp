#pragma once

#include "qadim/setcore.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qadim {

inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

// Dissection ratios r_k = 2^{-e_k}, k = 1, 2, ...  Either piecewise constant
// exponents or a closed-form rule k -> r_k.
class RatioSchedule {
 public:
  struct Segment {
    std::uint64_t count;  // kUnbounded for a final infinite run
    Scalar exponent;
  };
  using Rule = std::function<Scalar(std::uint64_t)>;

  static RatioSchedule constant(const Scalar& exponent);
  static RatioSchedule from_segments(std::vector<Segment> segments);
  // rho0 > 0 declares inf r_k >= rho0; pass nullopt when no such bound is known.
  static RatioSchedule from_rule(Rule ratio, std::uint64_t horizon, std::optional<Scalar> rho0);

  Scalar exponent(std::uint64_t k) const;
  Scalar ratio(std::uint64_t k) const;
  std::uint64_t length() const { return length_; }
  bool inf_positive() const { return rho0_.has_value(); }
  const std::optional<Scalar>& rho0() const { return rho0_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool rule_based() const { return static_cast<bool>(rule_); }
  // exponents e_1..e_n as a flat list (n <= length())
  std::vector<Scalar> exponents(std::uint64_t n) const;

 private:
  std::vector<Segment> segments_;
  std::vector<std::uint64_t> ends_;  // cumulative segment ends
  std::vector<Scalar> seg_ratio_;
  Rule rule_;
  std::uint64_t length_ = 0;
  std::optional<Scalar> rho0_;
};

// Depth-n two-branch Cantor approximation.  Intervals are materialised up to
// kMaxMaterializedDepth; deeper trees answer counting queries implicitly.
class CantorApprox {
 public:
  static constexpr std::size_t kMaxMaterializedDepth = 20;

  CantorApprox(RatioSchedule schedule, std::size_t depth, int precision_bits);

  std::size_t depth() const { return depth_; }
  const RatioSchedule& schedule() const { return schedule_; }
  bool materialized() const { return materialized_; }
  // union of the step-n intervals (touching members merged)
  const IntervalSet1D& intervals() const;
  // the 2^n step-n intervals themselves, n <= 24
  std::vector<Interval> members() const;
  // length of a step-k interval, k = 0..depth
  const Scalar& level_length(std::size_t k) const { return lengths_[k]; }
  Scalar min_len() const { return lengths_.back(); }
  Scalar diameter() const { return lengths_.front(); }

  std::uint64_t covering_count(const Scalar& r) const;
  // N_r(E_n ∩ [x-R, x+R]) by pruned traversal
  std::uint64_t local_count(const Scalar& x, const Scalar& R, const Scalar& r) const;
  // left endpoints of all step-k intervals in increasing order
  std::vector<Scalar> level_left_endpoints(std::size_t k) const;
  // up to `cap` step-k left endpoints, evenly spread over the 2^k addresses
  std::vector<Scalar> sample_left_endpoints(std::size_t k, std::size_t cap) const;

 private:
  RatioSchedule schedule_;
  std::size_t depth_;
  std::vector<Scalar> lengths_;
  std::vector<Scalar> shifts_;  // shifts_[k] = |I_{k-1}| - |I_k|, offset of a right child
  bool materialized_ = false;
  IntervalSet1D intervals_;
};

CantorApprox cantor_step(const RatioSchedule& schedule, std::size_t n, int precision_bits = default_precision_bits());

struct SimilarityMap {
  Scalar ratio;
  Scalar translation;
};

using Word = std::vector<std::uint16_t>;

// Similarity IFS x -> rho_i x + t_i with an optional 0/1 transition matrix.
class SimilarityIFS1D {
 public:
  SimilarityIFS1D(std::vector<SimilarityMap> maps, std::vector<std::vector<int>> transition = {});
  static SimilarityIFS1D uniform(const Scalar& ratio, const std::vector<Scalar>& translations);

  const std::vector<SimilarityMap>& maps() const { return maps_; }
  std::size_t size() const { return maps_.size(); }
  bool allowed(std::size_t from, std::size_t to) const;
  bool full_shift() const { return transition_.empty(); }
  const std::vector<std::vector<int>>& transition() const { return transition_; }
  // Interval W mapped into itself by every map: hull of the fixed points,
  // widened to unit length when all fixed points coincide.
  const Interval& base() const { return base_; }
  Scalar moran_constant() const;  // 1 / min rho_i
  Interval cylinder(const Word& w) const;
  bool admissible(const Word& w) const;
  Scalar min_ratio() const;
  Scalar max_ratio() const;

 private:
  std::vector<SimilarityMap> maps_;
  std::vector<std::vector<int>> transition_;
  Interval base_;
};

struct MoranCut {
  std::vector<Word> words;
  std::vector<Interval> intervals;
  Scalar r;
  Scalar D;
};

// Words whose cylinders first drop below r: |J_w| < r <= |J_{w^-}|.
MoranCut moran_cut(const SimilarityIFS1D& ifs, const Scalar& r);
// Union of all admissible depth-n cylinders.
IntervalSet1D ifs_attractor(const SimilarityIFS1D& ifs, std::size_t depth, int precision_bits = default_precision_bits());

struct MoranReport {
  bool m1 = true, m2 = true, m3 = true, m4 = true, m5 = true;
  Scalar d_m3;  // smallest D with |J_wt| <= D |J_w| |J_t|
  Scalar d_m4;  // smallest D with |J_w^-| <= D |J_w|
  Scalar d;     // max of the above and 1
  std::vector<std::string> violations;
};

MoranReport validate_moran(const SimilarityIFS1D& ifs, std::size_t depth);

struct FAlphaApprox {
  Scalar alpha;
  std::size_t depth = 0;
  IntervalSet1D intervals;
  std::vector<Scalar> level_lengths;  // |I| at step k = 0..depth
  std::vector<Scalar> level_gaps;     // gap between consecutive step-k siblings, k = 1..depth (index 0 unused)
};

FAlphaApprox f_alpha_step(const Scalar& alpha, std::size_t k, int precision_bits = default_precision_bits());

struct StrictParams {
  Scalar a, alpha, u, v, beta, b;
  std::uint64_t s1 = 4;
  std::uint64_t growth = 4;
  std::size_t blocks = 8;  // s-indices 1..blocks
};

struct StrictSchedule {
  RatioSchedule schedule;
  std::vector<std::uint64_t> s;  // s[j], j = 1..blocks (s[0] unused)
  std::vector<std::uint64_t> t;  // t[j], t[0] = 0
  std::vector<double> t_residue;  // rounded t minus exact value
};

StrictSchedule example_strict_schedule(const StrictParams& p);

PointSet1D decreasing_gap_points(const std::function<Scalar(std::uint64_t)>& rule, std::uint64_t n);

// Named rules for sequence sets.
Scalar rule_inverse(std::uint64_t k);        // 1/k
Scalar rule_exp_neg_sqrt(std::uint64_t k);   // e^{-sqrt k}, long double accurate
std::function<Scalar(std::uint64_t)> rule_power(const Scalar& p);         // k^{-p}
std::function<Scalar(std::uint64_t)> rule_arithmetic(std::uint64_t n);    // 1 - k/n

class ProjectionExample {
 public:
  explicit ProjectionExample(int jmax);
  int jmax() const { return jmax_; }
  PointSet2D level(int j) const;    // E_j
  PointSet1D level_x(int j) const;  // x-coordinates of E_j
  PointSet2D set() const;           // E
  PointSet1D x_projection() const;  // pi_x(E)

 private:
  int jmax_;
  std::vector<std::vector<Point2>> levels_;
};

ProjectionExample projection_example(int jmax);

struct ProductSet {
  std::vector<std::pair<Interval, Interval>> cells;
  PointSet2D corners;
};

ProductSet product_set(const IntervalSet1D& a, const IntervalSet1D& b);
ProductSet product_set(const PointSet1D& a, const PointSet1D& b);

// Line-based export: "lo hi" per interval, "x" or "x y" per point.
void write_set(std::ostream& os, const IntervalSet1D& s);
void write_set(std::ostream& os, const PointSet1D& s);
void write_set(std::ostream& os, const PointSet2D& s);

}  // namespace qadim
