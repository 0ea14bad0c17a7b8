#include "qadim/estimators.hpp"

#include "qadim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace qadim {

namespace {

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

constexpr double kLambdaEps = 1e-9;
constexpr double kDeltaEps = 1e-12;

void sort_desc_unique(std::vector<Scalar>& v) {
  std::sort(v.begin(), v.end(), [](const Scalar& a, const Scalar& b) { return a > b; });
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// 2^e, with e snapped to an integer when it is one up to rounding of the inputs
Scalar radius_at(long double e) {
  long double k = std::round(e);
  return std::abs(e - k) < 1e-9L ? pow2i(static_cast<long long>(k)) : exp2_of(e);
}

double slope_of(std::uint64_t count, double lambda) {
  return count <= 1 ? 0.0 : std::log2(static_cast<double>(count)) / lambda;
}

bool better_center(const Center& a, const Center& b) { return a < b; }

}  // namespace

// ---------------------------------------------------------------- Target

Target::Target(Shape shape, std::vector<Scalar> native_radii)
    : shape_(std::move(shape)), native_(std::move(native_radii)) {
  if (native_.empty()) {
    Scalar diam = diameter(), res = resolution();
    if (diam > 0) {
      int kmin = static_cast<int>(std::floor(-log2_of(diam)));
      int kmax = res > 0 ? static_cast<int>(std::ceil(-log2_of(res))) : kmin + 40;
      native_ = dyadic_radii(std::max(kmin, 0), kmax);
    }
  }
  for (const auto& r : native_)
    if (!(r > 0)) throw DomainError("native radii must be positive");
  sort_desc_unique(native_);
}

int Target::ambient_dim() const { return std::holds_alternative<PointSet2D>(shape_) ? 2 : 1; }

Scalar Target::diameter() const {
  return std::visit([](const auto& s) -> Scalar { return s.diameter(); }, shape_);
}

namespace {

// Endpoints carry 256 bits; below this relative floor positions stop being exact.
constexpr int kPositionBits = 240;

Scalar positional_floor(const Scalar& lo, const Scalar& hi) {
  return std::max(abs(lo), abs(hi)) * pow2i(-kPositionBits);
}

}  // namespace

Scalar Target::resolution() const {
  return std::visit(overloaded{
                        [](const IntervalSet1D& s) -> Scalar {
                          return s.empty() ? Scalar(0) : std::max(s.min_len(), positional_floor(s.lo(), s.hi()));
                        },
                        [](const PointSet1D& s) -> Scalar { return s.size() < 2 ? Scalar(0) : s.min_gap() / 2; },
                        [](const PointSet2D& s) -> Scalar { return s.size() < 2 ? Scalar(0) : s.min_distance() / 2; },
                        [](const CantorApprox& c) -> Scalar {
                          return std::max(c.min_len(), positional_floor(Scalar(0), c.diameter()));
                        },
                    },
                    shape_);
}

std::uint64_t Target::cover(const Scalar& r) const {
  return std::visit(overloaded{
                        [&](const IntervalSet1D& s) { return covering_number_1d(s, r); },
                        [&](const PointSet1D& s) { return covering_number_1d(s, r); },
                        [&](const PointSet2D& s) { return box_count_2d(s, r); },
                        [&](const CantorApprox& c) { return c.covering_count(r); },
                    },
                    shape_);
}

std::uint64_t Target::local(const Center& x, const Scalar& R, const Scalar& r) const {
  return std::visit(overloaded{
                        [&](const IntervalSet1D& s) { return local_covering_number(s, x.x, R, r); },
                        [&](const PointSet1D& s) { return local_covering_number(s, x.x, R, r); },
                        [&](const PointSet2D& s) { return local_box_count(s, x, R, r); },
                        [&](const CantorApprox& c) { return c.local_count(x.x, R, r); },
                    },
                    shape_);
}

std::vector<Center> Target::centers(const CenterPolicy& policy) const {
  std::vector<Center> out;
  auto lift = [&](const std::vector<Scalar>& xs) {
    for (const auto& x : xs) out.push_back({x, Scalar(0)});
  };
  std::visit(overloaded{
                 [&](const IntervalSet1D& s) {
                   auto los = select_centers(s, policy);
                   lift(los);
                   // interior points of long members, where a ball sees both sides
                   const bool small = s.size() * 2 <= policy.cap;
                   const Scalar min_len = s.min_len();
                   for (const auto& lo : los) {
                     auto it = std::lower_bound(s.intervals().begin(), s.intervals().end(), lo,
                                                [](const Interval& v, const Scalar& t) { return v.lo < t; });
                     if (it == s.intervals().end()) continue;
                     if (small || it->length() >= 2 * min_len) out.push_back({(it->lo + it->hi) / 2, Scalar(0)});
                   }
                 },
                 [&](const PointSet1D& s) { lift(select_centers(s, policy)); },
                 [&](const PointSet2D& s) { out = select_centers(s, policy); },
                 [&](const CantorApprox& c) {
                   std::size_t k = 0;
                   while (k < c.depth() && k < 62 && (std::uint64_t{1} << k) < policy.cap) ++k;
                   if (c.materialized() && (policy.exhaustive || c.intervals().size() <= policy.cap)) {
                     lift(select_centers(c.intervals(), policy));
                   } else {
                     lift(c.sample_left_endpoints(k, policy.cap));
                   }
                 },
             },
             shape_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Scalar> native_radii(const CantorApprox& c) {
  std::vector<Scalar> out;
  for (std::size_t k = 0; k <= c.depth(); ++k) out.push_back(c.level_length(k));
  return out;
}

std::vector<Scalar> native_radii(const FAlphaApprox& f) {
  std::vector<Scalar> out(f.level_lengths.begin(), f.level_lengths.end());
  for (std::size_t k = 1; k < f.level_gaps.size(); ++k)
    if (f.level_gaps[k] > 0) out.push_back(f.level_gaps[k] / 2);
  return out;
}

std::vector<Scalar> native_radii(const SimilarityIFS1D& ifs, std::size_t depth) {
  std::vector<Scalar> ratios;
  for (const auto& m : ifs.maps()) ratios.push_back(abs(m.ratio));
  sort_desc_unique(ratios);
  // all products of `depth` or fewer ratios, capped to keep the list short
  std::vector<Scalar> level{ifs.base().length()}, out = level;
  for (std::size_t k = 1; k <= depth; ++k) {
    std::vector<Scalar> next;
    for (const auto& l : level)
      for (const auto& q : ratios) next.push_back(l * q);
    sort_desc_unique(next);
    if (next.size() > 64) {
      std::vector<Scalar> thin;
      for (std::size_t i = 0; i < next.size(); i += next.size() / 32) thin.push_back(next[i]);
      thin.push_back(next.back());
      next = std::move(thin);
      sort_desc_unique(next);
    }
    out.insert(out.end(), next.begin(), next.end());
    level = std::move(next);
  }
  sort_desc_unique(out);
  return out;
}

std::vector<Scalar> dyadic_radii(int kmin, int kmax) {
  std::vector<Scalar> out;
  for (int k = kmin; k <= kmax; ++k) out.push_back(pow2i(-k));
  return out;
}

// ---------------------------------------------------------------- Sweeper

Sweeper::Sweeper(const Target& target, SweepConfig config) : target_(target), config_(std::move(config)) {
  if (config_.lambda_min <= 0) throw DomainError("lambda_min must be positive");
  if (config_.lambda_max < config_.lambda_min) throw DomainError("lambda_max below lambda_min");
  if (config_.s_multipliers.empty()) throw DomainError("no s multipliers");
  for (double m : config_.s_multipliers)
    if (!(m >= 1)) throw DomainError("s multipliers must be >= 1");
  res_ = config_.resolution ? *config_.resolution : target_.resolution();
  const Scalar& res = res_;
  const Scalar R_max = target_.diameter() * Scalar(config_.R_max_fraction);
  auto pick = [&](const std::vector<Scalar>& given) {
    std::vector<Scalar> g;
    if (!given.empty()) {
      g = given;
      for (const auto& v : g)
        if (!(v > 0)) throw DomainError("scale grids must be positive");
    } else {
      for (const auto& v : target_.native_radii())
        if (v >= res && v <= R_max) g.push_back(v);
    }
    sort_desc_unique(g);
    return g;
  };
  R_grid_ = pick(config_.R_grid);
  r_grid_ = pick(config_.r_grid);
  centers_ = target_.centers(config_.centers);
  centers_.insert(centers_.end(), config_.extra_centers.begin(), config_.extra_centers.end());
  std::sort(centers_.begin(), centers_.end());
  centers_.erase(std::unique(centers_.begin(), centers_.end()), centers_.end());
  if (centers_.empty()) throw DomainError("no centres: the set is empty");
}

void Sweeper::add_pair(const Scalar& R, const Scalar& r, double s, const Tag& tag) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].R == R && records_[i].r == r) {
      auto& t = tags_[i];
      t.grid |= tag.grid;
      t.quasi |= tag.quasi;
      t.extra |= tag.extra;
      t.thetas.insert(t.thetas.end(), tag.thetas.begin(), tag.thetas.end());
      records_[i].s = std::max(records_[i].s, s);
      return;
    }
  }
  SweepRecord rec;
  rec.R = R;
  rec.r = r;
  rec.s = s;
  rec.lambda = log2_of(R) - log2_of(r);
  records_.push_back(std::move(rec));
  tags_.push_back(tag);
  done_.push_back(false);
}

void Sweeper::add_grid_pairs() {
  const Scalar& res = res_;
  for (const auto& R : R_grid_)
    for (const auto& r : r_grid_) {
      if (!(r < R) || r < res) continue;
      double lam = log2_of(R) - log2_of(r);
      if (lam < config_.lambda_min - kLambdaEps || lam > config_.lambda_max + kLambdaEps) continue;
      double lR = log2_of(R);
      double s = lR < 0 ? log2_of(r) / lR - 1 : 0;
      Tag t;
      t.grid = true;
      add_pair(R, r, std::max(0.0, s), t);
    }
}

void Sweeper::add_quasi_pairs(double delta) {
  if (!(delta > 0)) throw DomainError("quasi sweeps need delta > 0");
  if (delta < config_.delta_floor - kDeltaEps)
    throw DomainError("delta below the floor " + std::to_string(config_.delta_floor) +
                      "; lower the floor only with a deeper generation");
  const Scalar& res = res_;
  for (const auto& R : R_grid_) {
    double lR = log2_of(R);
    if (!(lR < 0)) continue;
    for (double m : config_.s_multipliers) {
      double s = m * delta;
      Scalar r = radius_at(static_cast<long double>(lR) * (1 + s));
      if (r < res) continue;
      if (-lR * s < config_.lambda_min - kLambdaEps) continue;
      Tag t;
      t.quasi = true;
      add_pair(R, r, s, t);
    }
  }
}

void Sweeper::add_spectrum_pairs(double theta) {
  if (!(theta > 0 && theta < 1)) throw DomainError("theta must lie in (0, 1)");
  if (theta > config_.theta_max + kDeltaEps)
    throw DomainError("theta above the ceiling " + std::to_string(config_.theta_max));
  const Scalar& res = res_;
  for (const auto& R : R_grid_) {
    double lR = log2_of(R);
    if (!(lR < 0)) continue;
    Scalar r = radius_at(static_cast<long double>(lR) / theta);
    if (r < res) continue;  // below resolution: skipped
    double s = 1 / theta - 1;
    if (-lR * s < config_.lambda_min - kLambdaEps) continue;
    Tag t;
    t.thetas.push_back(theta);
    add_pair(R, r, s, t);
  }
}

void Sweeper::add_extra_pairs() {
  for (const auto& [R, r] : config_.extra_pairs) {
    if (!(r > 0 && r < R && R < 1)) throw DomainError("extra pairs need 0 < r < R < 1");
    Tag t;
    t.extra = true;
    add_pair(R, r, log2_of(r) / log2_of(R) - 1, t);
  }
}

void Sweeper::evaluate() {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < records_.size(); ++i)
    if (!done_[i]) pending.push_back(i);
  parallel_for(pending.size(), config_.threads, [&](std::size_t j) {
    auto& rec = records_[pending[j]];
    bool first = true;
    for (const auto& c : centers_) {
      std::uint64_t n = target_.local(c, rec.R, rec.r);
      if (first || n > rec.count_max) rec.count_max = n, rec.center_max = c;
      if (first || n < rec.count_min) rec.count_min = n, rec.center_min = c;
      first = false;
    }
    rec.slope_max = slope_of(rec.count_max, rec.lambda);
    rec.slope_min = slope_of(rec.count_min, rec.lambda);
  });
  for (auto i : pending) done_[i] = true;
}

DimensionReport Sweeper::fold(const std::string& kind, bool upper, double delta,
                              const std::vector<std::size_t>& use) const {
  if (use.empty()) {
    std::ostringstream msg;
    msg << "no admissible (R, r) pair for " << kind << " with log2(R/r) >= " << config_.lambda_min
        << " at resolution 2^" << (res_ > 0 ? log2_of(res_) : -1e9);
    if (delta > 0) msg << "; delta = " << delta << " needs resolution about 2^-"
                       << config_.lambda_min * (1 + delta) / delta << ", generate deeper";
    throw DomainError(msg.str());
  }
  auto slope = [&](std::size_t i) { return upper ? records_[i].slope_max : records_[i].slope_min; };
  auto center = [&](std::size_t i) -> const Center& {
    return upper ? records_[i].center_max : records_[i].center_min;
  };
  auto pick = [&](const std::vector<std::size_t>& idx) {
    std::size_t best = idx.front();
    for (auto i : idx) {
      double a = slope(i), b = slope(best);
      bool wins = upper ? a > b : a < b;
      if (!wins && a == b) {
        if (better_center(center(i), center(best))) wins = true;
        else if (center(i) == center(best) && records_[i].R > records_[best].R) wins = true;
      }
      if (wins) best = i;
    }
    return best;
  };
  DimensionReport rep;
  rep.kind = kind;
  std::size_t best = pick(use);
  rep.estimate = slope(best);
  rep.witness = records_[best];
  rep.records = use.size();
  rep.scale_span = records_[use.front()].lambda;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto i : use) {
    const auto& rec = records_[i];
    rep.scale_span = std::min(rep.scale_span, rec.lambda);
    double y = std::log2(static_cast<double>(std::max<std::uint64_t>(1, upper ? rec.count_max : rec.count_min)));
    sx += rec.lambda, sy += y, sxx += rec.lambda * rec.lambda, sxy += rec.lambda * y;
  }
  const double n = static_cast<double>(use.size());
  const double var = sxx - sx * sx / n;
  rep.regression = var > 1e-12 ? (sxy - sx * sy / n) / var : rep.estimate;
  // stability: the same fold over the finer half of the radii used
  std::vector<Scalar> Rs;
  for (auto i : use) Rs.push_back(records_[i].R);
  sort_desc_unique(Rs);
  if (Rs.size() >= 2) {
    const Scalar& cut = Rs[Rs.size() / 2];
    std::vector<std::size_t> fine;
    for (auto i : use)
      if (records_[i].R <= cut) fine.push_back(i);
    rep.converged = !fine.empty() && std::abs(slope(pick(fine)) - rep.estimate) < 0.02;
  }
  return rep;
}

DimensionReport Sweeper::h_upper(double delta) const {
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!done_[i] || records_[i].lambda < config_.lambda_min - kLambdaEps) continue;
    const auto& t = tags_[i];
    if (delta > 0 && !((t.quasi || t.extra || !t.thetas.empty()) && records_[i].s >= delta - kDeltaEps)) continue;
    use.push_back(i);
  }
  auto rep = fold(delta > 0 ? "qA" : "A", true, delta, use);
  rep.curve.emplace_back(delta, rep.estimate);
  return rep;
}

DimensionReport Sweeper::h_lower(double delta) const {
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!done_[i] || records_[i].lambda < config_.lambda_min - kLambdaEps) continue;
    const auto& t = tags_[i];
    if (delta > 0 && !((t.quasi || t.extra || !t.thetas.empty()) && records_[i].s >= delta - kDeltaEps)) continue;
    use.push_back(i);
  }
  auto rep = fold(delta > 0 ? "qL" : "lowerA", false, delta, use);
  rep.curve.emplace_back(delta, rep.estimate);
  return rep;
}

DimensionReport Sweeper::spectrum(double theta) const {
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!done_[i] || records_[i].lambda < config_.lambda_min - kLambdaEps) continue;
    for (double t : tags_[i].thetas)
      if (std::abs(t - theta) < kDeltaEps) {
        use.push_back(i);
        break;
      }
  }
  auto rep = fold("spectrum", true, 1 / theta - 1, use);
  rep.curve.emplace_back(theta, rep.estimate);
  return rep;
}

BoxReport Sweeper::box() const {
  const auto& g = r_grid_;
  if (g.size() < 6) throw DomainError("box grid too coarse: " + std::to_string(g.size()) + " scales, need 6");
  const Scalar diam = target_.diameter();
  if (diam > 0 && g.front() > diam / 4) throw DomainError("largest box scale exceeds diam/4");
  BoxReport out;
  std::vector<std::uint64_t> counts(g.size());
  parallel_for(g.size(), config_.threads, [&](std::size_t i) { counts[i] = target_.cover(g[i]); });
  std::vector<double> lr;
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.counts.emplace_back(g[i], counts[i]);
    lr.push_back(-log2_of(g[i]));
  }
  out.upper.kind = "ubox";
  out.lower.kind = "lbox";
  double hi = -1, lo = 1e300, span = 1e300;
  for (std::size_t i = 1; i < g.size(); ++i) {
    double dx = lr[i] - lr[i - 1];
    double sec = (std::log2(static_cast<double>(counts[i])) - std::log2(static_cast<double>(counts[i - 1]))) / dx;
    out.upper.curve.emplace_back(lr[i], sec);
    out.lower.curve.emplace_back(lr[i], sec);
    hi = std::max(hi, sec);
    lo = std::min(lo, sec);
    span = std::min(span, dx);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double y = std::log2(static_cast<double>(counts[i]));
    sx += lr[i], sy += y, sxx += lr[i] * lr[i], sxy += lr[i] * y;
  }
  double reg = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  for (auto* rep : {&out.upper, &out.lower}) {
    rep->regression = reg;
    rep->scale_span = span;
    rep->records = g.size();
  }
  out.upper.estimate = hi;
  out.lower.estimate = lo;
  // secants over the finer half agree with the full fold
  auto tail = [&](bool upper) {
    double v = upper ? -1 : 1e300;
    for (std::size_t i = out.upper.curve.size() / 2; i < out.upper.curve.size(); ++i)
      v = upper ? std::max(v, out.upper.curve[i].second) : std::min(v, out.upper.curve[i].second);
    return v;
  };
  out.upper.converged = std::abs(tail(true) - hi) < 0.02;
  out.lower.converged = std::abs(tail(false) - lo) < 0.02;
  return out;
}

// ---------------------------------------------------------------- free functions

BoxReport estimate_box(const Target& S, const SweepConfig& config) { return Sweeper(S, config).box(); }

DimensionReport h_upper_sweep(const Target& S, double delta, const SweepConfig& config) {
  if (delta < 0) throw DomainError("delta must be nonnegative");
  Sweeper sw(S, config);
  if (delta == 0) sw.add_grid_pairs(); else sw.add_quasi_pairs(delta);
  sw.add_extra_pairs();
  sw.evaluate();
  return sw.h_upper(delta);
}

DimensionReport h_lower_sweep(const Target& S, double delta, const SweepConfig& config) {
  if (delta < 0) throw DomainError("delta must be nonnegative");
  Sweeper sw(S, config);
  if (delta == 0) sw.add_grid_pairs(); else sw.add_quasi_pairs(delta);
  sw.add_extra_pairs();
  sw.evaluate();
  return sw.h_lower(delta);
}

namespace {

void check_delta_grid(const std::vector<double>& g) {
  if (g.empty()) throw DomainError("empty delta grid");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(g[i] > 0)) throw DomainError("delta grid entries must be positive");
    if (i && !(g[i] < g[i - 1])) throw DomainError("delta grid must be strictly decreasing");
  }
}

DimensionReport quasi_curve(const Target& S, const std::vector<double>& grid, const SweepConfig& config, bool upper) {
  check_delta_grid(grid);
  Sweeper sw(S, config);
  for (double d : grid) sw.add_quasi_pairs(d);
  sw.add_extra_pairs();
  sw.evaluate();
  DimensionReport last;
  std::vector<std::pair<double, double>> curve;
  for (double d : grid) {
    last = upper ? sw.h_upper(d) : sw.h_lower(d);
    curve.emplace_back(d, last.estimate);
  }
  last.curve = curve;
  last.converged = curve.size() >= 2 && std::abs(curve.back().second - curve[curve.size() - 2].second) < 0.02;
  return last;
}

}  // namespace

DimensionReport estimate_qa(const Target& S, const std::vector<double>& delta_grid, const SweepConfig& config) {
  return quasi_curve(S, delta_grid, config, true);
}

DimensionReport estimate_ql(const Target& S, const std::vector<double>& delta_grid, const SweepConfig& config) {
  return quasi_curve(S, delta_grid, config, false);
}

SpectrumReport assouad_spectrum(const Target& S, const std::vector<double>& theta_grid, const SweepConfig& config) {
  if (theta_grid.empty()) throw DomainError("empty theta grid");
  Sweeper sw(S, config);
  for (double t : theta_grid) sw.add_spectrum_pairs(t);
  sw.evaluate();
  SpectrumReport out;
  for (double t : theta_grid) {
    out.per_theta.push_back(sw.spectrum(t));
    out.sup = std::max(out.sup, out.per_theta.back().estimate);
  }
  return out;
}

ChainReport verify_chain(const Target& S, double delta, const SweepConfig& config, double slack) {
  Sweeper sw(S, config);
  sw.add_grid_pairs();
  sw.add_quasi_pairs(delta);
  sw.add_extra_pairs();
  sw.evaluate();
  ChainReport c;
  auto box = sw.box();
  c.lbox = box.lower;
  c.ubox = box.upper;
  c.A = sw.h_upper(0);
  c.lowerA = sw.h_lower(0);
  c.qA = sw.h_upper(delta);
  c.qL = sw.h_lower(delta);
  c.ordering = ordering_check(Scalar(c.lowerA.estimate), Scalar(c.qL.estimate), Scalar(c.lbox.estimate),
                              Scalar(c.ubox.estimate), Scalar(c.qA.estimate), Scalar(c.A.estimate), Scalar(slack));
  return c;
}

ProjectionBoundReport projection_bound_check(int jmax, std::size_t samples, std::uint64_t seed) {
  if (jmax < 1 || jmax > 14) throw DomainError("projection bound check needs 1 <= jmax <= 14");
  const PointSet2D E = projection_example(jmax).set();
  const auto centers = select_centers(E, CenterPolicy{samples, false, seed});
  ProjectionBoundReport rep;
  double worst = -1;
  for (const auto& c : centers)
    for (int s = 0; s < jmax; ++s)
      for (int t = s + 1; t <= jmax; ++t)
        for (int Rk : {2 * s, 2 * s + 1})
          for (int rk : {2 * t - 2, 2 * t - 1}) {
            // R in (2^{-2(s+1)}, 2^{-2s}], r in (2^{-2t}, 2^{-2(t-1)}], r < R
            if (rk <= Rk) continue;
            std::uint64_t n = local_box_count(E, c, pow2i(-Rk), pow2i(-rk));
            double bound = 4.0 * ((t + 1) * std::ldexp(1.0, t - s) + std::ldexp(1.0, t - s + 1));
            ProjectionBoundCase cs{c, s, t, n, bound};
            ++rep.checked;
            if (static_cast<double>(n) > bound) {
              rep.pass = false;
              rep.violations.push_back(cs);
            }
            if (static_cast<double>(n) / bound > worst) worst = static_cast<double>(n) / bound, rep.tightest = cs;
          }
  return rep;
}

std::string center_text(const Center& c, int ambient_dim) {
  return ambient_dim == 2 ? to_decimal(c.x) + ";" + to_decimal(c.y) : to_decimal(c.x);
}

void write_records_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "center,R,r,count,slope\n";
  for (const auto& rec : records) {
    bool two_d = rec.center_max.y != 0;
    os << center_text(rec.center_max, two_d ? 2 : 1) << ',' << to_decimal(rec.R) << ',' << to_decimal(rec.r) << ','
       << rec.count_max << ',' << to_decimal(Scalar(rec.slope_max), 17) << '\n';
  }
}

void write_curve(std::ostream& os, const DimensionReport& report) {
  for (const auto& [x, v] : report.curve) os << to_decimal(Scalar(x), 17) << ' ' << to_decimal(Scalar(v), 17) << '\n';
}

ReplayResult replay_records(const Target& S, std::istream& csv) {
  ReplayResult out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(csv, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line.rfind("center", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 5) throw DomainError("replay line " + std::to_string(lineno) + ": expected 5 fields");
    Center c;
    if (auto semi = f[0].find(';'); semi != std::string::npos) {
      c = {parse_scalar(f[0].substr(0, semi)), parse_scalar(f[0].substr(semi + 1))};
    } else {
      c = {parse_scalar(f[0]), Scalar(0)};
    }
    std::uint64_t want = std::stoull(f[3]);
    std::uint64_t got = S.local(c, parse_scalar(f[1]), parse_scalar(f[2]));
    ++out.lines;
    if (got != want)
      out.mismatches.push_back("line " + std::to_string(lineno) + ": stored " + f[3] + ", recomputed " +
                               std::to_string(got));
  }
  return out;
}

}  // namespace qadim
