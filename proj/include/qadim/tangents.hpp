#pragma once

#include "qadim/estimators.hpp"
#include "qadim/generators.hpp"
#include "qadim/setcore.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qadim {

using Set1D = std::variant<IntervalSet1D, PointSet1D>;

// x -> scale * x + offset per axis.
struct AffineMap {
  std::vector<Scalar> scale;
  std::vector<Scalar> offset;

  std::size_t dim() const { return scale.size(); }
  Scalar a() const;  // min |scale|
  Scalar b() const;  // max |scale|
  Scalar apply(const Scalar& x, std::size_t axis = 0) const { return scale[axis] * x + offset[axis]; }
};

AffineMap similarity_1d(const Scalar& scale, const Scalar& offset);
// Maps I onto [0, 1].
AffineMap cylinder_map(const Interval& I);

enum class TangentMode { weak, generalized, pseudo };

std::string to_string(TangentMode m);
TangentMode parse_tangent_mode(const std::string& s);

struct TangentSequence {
  std::vector<AffineMap> maps;
  TangentMode mode = TangentMode::weak;
  double k_max = 16;  // bound on b_k / a_k

  // b_k nondecreasing (strictly increasing in generalized mode), a_k > 0, ratio bound, one dimension.
  void validate() const;
};

// Image under T, intersected with [0,1]^d.
IntervalSet1D magnify(const IntervalSet1D& s, const AffineMap& T);
PointSet1D magnify(const PointSet1D& s, const AffineMap& T);
PointSet2D magnify(const PointSet2D& s, const AffineMap& T);
Set1D magnify(const Set1D& s, const AffineMap& T);

IntervalSet1D as_intervals(const Set1D& s);

// Every point of a two-ended construction lies within half a basic length of the limit set.
Scalar truncation_bound(const IntervalSet1D& s);

enum class TangentClass { finite_set, interval, other };

std::string to_string(TangentClass c);

struct GapStats {
  std::size_t components = 0;
  Scalar diameter, max_gap, min_gap, max_component;
};

struct Classification {
  TangentClass kind = TangentClass::other;
  GapStats stats;
};

// finite-set: at most 64 components, each shorter than tol * diam, gaps equal within tol * diam.
// interval: largest gap below tol * diam.  Checked in that order.
Classification classify_tangent_1d(const Set1D& p, double tol);

struct IntervalWitness {
  std::vector<Scalar> z;  // z_0 < ... < z_n
  Scalar span;
  Scalar max_step;
};

// Smallest-span run of consecutive components (at least k + 1 of them, at most
// max(64, 8k)) whose largest gap is below span / k.
std::optional<IntervalWitness> interval_tangent_witness(const Set1D& s, int k);

struct TangentOptions {
  Scalar set_truncation = 0;        // dist_H(approximation, limit) for S
  Scalar candidate_truncation = 0;  // same for the candidate
  double eps_fast = 0.25;           // fitted order needed to call the tangent fast
  double converged_tol = 1e-3;
  double classify_tol = 0.05;
};

struct TangentVerdict {
  std::vector<Scalar> raw;        // distance between T_k(S) ∩ X and the candidate
  std::vector<Scalar> allowance;  // b_k * set_truncation + candidate_truncation
  std::vector<Scalar> distances;  // max(0, raw - allowance)
  std::vector<Scalar> b;
  double C = 0;
  std::optional<double> epsilon;  // empty: every fitted distance is 0 (unbounded order)
  bool fast = false;
  bool converged = false;
  Classification classification;  // of the last image
};

TangentVerdict tangent_converge(const Set1D& s, const TangentSequence& seq, const Set1D& candidate,
                                const TangentOptions& opt = {});

struct TangentBoundConfig {
  std::vector<Scalar> set_native_radii;  // radii for S's Target; empty: dyadic
  SweepConfig set_sweep;        // qA / qL of S
  SweepConfig candidate_sweep;  // box counts of the candidate
  double delta = 0.1;
  double slack = 0.05;
  TangentOptions tangent;
};

enum class BoundStatus { pass, fail, not_applied };

std::string to_string(BoundStatus s);

struct TangentBoundReport {
  TangentVerdict verdict;
  double candidate_lbox = 0, candidate_ubox = 0;
  double set_qa = 0, set_ql = 0;
  bool interior_point = false;
  BoundStatus lower_box_vs_qa = BoundStatus::not_applied;  // lower box of tangent <= dim_qA S, fast tangents
  BoundStatus ql_vs_upper_box = BoundStatus::not_applied;  // dim_qL S <= upper box of tangent, interior point
  std::vector<std::string> notes;
  bool pass = true;
};

TangentBoundReport tangent_bound_check(const Set1D& s, const TangentSequence& seq, const Set1D& candidate,
                                       const TangentBoundConfig& config);

}  // namespace qadim
