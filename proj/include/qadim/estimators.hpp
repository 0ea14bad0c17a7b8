#pragma once

#include "qadim/exactdims.hpp"
#include "qadim/generators.hpp"
#include "qadim/setcore.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qadim {

// 1-D centres use y = 0.
using Center = Point2;

// A generated set together with the radii its construction is built from.
class Target {
 public:
  using Shape = std::variant<IntervalSet1D, PointSet1D, PointSet2D, CantorApprox>;

  // Empty native radii fall back to dyadic 2^-k between the resolution and the diameter.
  explicit Target(Shape shape, std::vector<Scalar> native_radii = {});

  const Shape& shape() const { return shape_; }
  int ambient_dim() const;
  Scalar diameter() const;
  // Smallest radius at which counts still see the set as generated:
  // min length for interval sets (floored where 240-bit positions stop resolving),
  // half the minimal spacing for point sets.
  Scalar resolution() const;
  const std::vector<Scalar>& native_radii() const { return native_; }  // decreasing

  std::uint64_t cover(const Scalar& r) const;
  std::uint64_t local(const Center& x, const Scalar& R, const Scalar& r) const;
  std::vector<Center> centers(const CenterPolicy& policy) const;

 private:
  Shape shape_;
  std::vector<Scalar> native_;
};

// Radii natural to each generator.
std::vector<Scalar> native_radii(const CantorApprox& c);
std::vector<Scalar> native_radii(const FAlphaApprox& f);  // level lengths and half-gaps
std::vector<Scalar> native_radii(const SimilarityIFS1D& ifs, std::size_t depth);
std::vector<Scalar> dyadic_radii(int kmin, int kmax);  // 2^-k, k = kmin..kmax

struct SweepConfig {
  std::vector<Scalar> R_grid;  // empty: native radii in [resolution, R_max]
  std::vector<Scalar> r_grid;  // box scales and delta = 0 pairs; empty: native radii
  std::vector<double> s_multipliers{1, 2, 4};
  double lambda_min = 8;       // log2(R/r) floor for every two-scale record
  double lambda_max = 32;      // ceiling for delta = 0 grid pairs only
  double R_max_fraction = 0.25;
  std::optional<Scalar> resolution;  // overrides Target::resolution()
  double delta_floor = 0.05;
  double theta_max = 0.95;
  CenterPolicy centers;
  std::vector<Center> extra_centers;
  std::vector<std::pair<Scalar, Scalar>> extra_pairs;  // (R, r)
  unsigned threads = 1;
};

struct SweepRecord {
  Scalar R, r;
  double s = 0;       // r = R^{1+s}
  double lambda = 0;  // log2(R/r)
  std::uint64_t count_max = 0, count_min = 0;
  Center center_max, center_min;
  double slope_max = 0, slope_min = 0;
};

struct DimensionReport {
  std::string kind;  // lowerA, qL, lbox, ubox, qA, A, spectrum
  double estimate = 0;
  std::vector<std::pair<double, double>> curve;  // (delta or theta, value)
  std::optional<SweepRecord> witness;
  double scale_span = 0;  // smallest log2(R/r) (or log2 r-ratio for box) among used records
  double regression = 0;  // least-squares slope of log N on log(R/r)
  std::size_t records = 0;
  bool converged = false;
};

struct BoxReport {
  DimensionReport lower, upper;
  std::vector<std::pair<Scalar, std::uint64_t>> counts;  // (r, N_r)
};

// Shared record pool: every sweep is a filter over the same evaluated pairs, so
// h_upper is nonincreasing and h_lower nondecreasing in delta by construction.
class Sweeper {
 public:
  Sweeper(const Target& target, SweepConfig config);

  void add_grid_pairs();
  void add_quasi_pairs(double delta);
  void add_spectrum_pairs(double theta);
  void add_extra_pairs();
  // Evaluates every pending record (parallel over records, deterministic).
  void evaluate();

  BoxReport box() const;
  DimensionReport h_upper(double delta) const;
  DimensionReport h_lower(double delta) const;
  DimensionReport spectrum(double theta) const;

  const std::vector<SweepRecord>& records() const { return records_; }
  const std::vector<Center>& centers() const { return centers_; }
  const std::vector<Scalar>& R_grid() const { return R_grid_; }
  const std::vector<Scalar>& r_grid() const { return r_grid_; }
  const Target& target() const { return target_; }
  const Scalar& resolution() const { return res_; }

 private:
  struct Tag {
    bool grid = false, quasi = false, extra = false;
    std::vector<double> thetas;
  };
  void add_pair(const Scalar& R, const Scalar& r, double s, const Tag& tag);
  DimensionReport fold(const std::string& kind, bool upper, double delta, const std::vector<std::size_t>& use) const;

  const Target& target_;
  SweepConfig config_;
  Scalar res_;
  std::vector<Scalar> R_grid_, r_grid_;
  std::vector<Center> centers_;
  std::vector<SweepRecord> records_;
  std::vector<Tag> tags_;
  std::vector<bool> done_;
};

BoxReport estimate_box(const Target& S, const SweepConfig& config);
DimensionReport h_upper_sweep(const Target& S, double delta, const SweepConfig& config);
DimensionReport h_lower_sweep(const Target& S, double delta, const SweepConfig& config);
DimensionReport estimate_qa(const Target& S, const std::vector<double>& delta_grid, const SweepConfig& config);
DimensionReport estimate_ql(const Target& S, const std::vector<double>& delta_grid, const SweepConfig& config);

struct SpectrumReport {
  std::vector<DimensionReport> per_theta;
  double sup = 0;
};

SpectrumReport assouad_spectrum(const Target& S, const std::vector<double>& theta_grid, const SweepConfig& config);

struct ChainReport {
  DimensionReport lowerA, qL, lbox, ubox, qA, A;
  OrderingResult ordering;
};

ChainReport verify_chain(const Target& S, double delta, const SweepConfig& config, double slack);

struct ProjectionBoundCase {
  Point2 center;
  int s = 0, t = 0;
  std::uint64_t count = 0;
  double bound = 0;
};

struct ProjectionBoundReport {
  bool pass = true;
  std::size_t checked = 0;
  std::vector<ProjectionBoundCase> violations;
  ProjectionBoundCase tightest;  // largest count / bound
};

// Grid-local counts of E at R = 2^-2s, r = 2^-2t (t > s) against 4((t+1)2^{t-s} + 2^{t-s+1}).
ProjectionBoundReport projection_bound_check(int jmax, std::size_t samples, std::uint64_t seed = 0);

// "center,R,r,count,slope" per record (upper witness of each pair), exact decimals.
void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records);
// Two columns "x value" per curve point.
void write_curve(std::ostream& os, const DimensionReport& report);

struct ReplayResult {
  std::size_t lines = 0;
  std::vector<std::string> mismatches;
};

// Recomputes every record of a CSV written by write_records_csv; "#" lines are skipped.
ReplayResult replay_records(const Target& S, std::istream& csv);

std::string center_text(const Center& c, int ambient_dim);

}  // namespace qadim
