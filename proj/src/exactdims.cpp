#include "qadim/exactdims.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace qadim {

namespace {

constexpr std::size_t kMinTable = 16;

void check_table(const LogLengthTable& T) {
  if (T.size() < kMinTable) throw DomainError("log-length table too short (N = " + std::to_string(T.size()) + " < 16)");
}

std::size_t tail_start(std::size_t N, const FormulaOptions& opt) {
  if (!(opt.tail_fraction > 0 && opt.tail_fraction <= 1)) throw DomainError("tail fraction must lie in (0, 1]");
  auto ts = static_cast<std::size_t>(std::ceil(opt.tail_fraction * static_cast<double>(N)));
  return std::max<std::size_t>(1, std::min(ts, N));
}

void check_grid(const std::vector<std::size_t>& grid, std::size_t N) {
  if (grid.empty()) throw DomainError("empty n grid");
  for (auto n : grid)
    if (n == 0 || n > N) throw DomainError("n grid entry " + std::to_string(n) + " outside [1, N]");
}

void check_delta(const LogLengthTable& T, const Scalar& delta) {
  if (!(delta > 0)) throw DomainError("delta must be positive");
  if (!T.inf_positive()) throw DomainError("quasi formulas need inf r_k > 0; the schedule declares no lower bound");
}

struct Best {
  long double n = 0, d = 1;  // ratio n / d
  std::size_t wn = 0, wk = 0;
  bool set = false;
  void offer_max(std::size_t nn, std::size_t k, long double dd) {
    if (!set || static_cast<long double>(nn) * d > n * dd) *this = {static_cast<long double>(nn), dd, nn, k, true};
  }
  void offer_min(std::size_t nn, std::size_t k, long double dd) {
    if (!set || static_cast<long double>(nn) * d < n * dd) *this = {static_cast<long double>(nn), dd, nn, k, true};
  }
  FormulaResult result(std::size_t ts) const {
    FormulaResult r;
    r.value = Scalar(n) / Scalar(d);
    r.witness_n = wn;
    r.witness_k = wk;
    r.tail_start = ts;
    return r;
  }
};

// Box windows k = 0, n in [ts, N].
std::pair<Best, Best> box_scan(const LogLengthTable& T, std::size_t ts) {
  Best hi, lo;
  for (std::size_t n = ts; n <= T.size(); ++n) {
    hi.offer_max(n, 0, T[n]);
    lo.offer_min(n, 0, T[n]);
  }
  return {hi, lo};
}

struct Scan {
  Best A, L;
  std::vector<Best> qA, qL;
};

// One pass over windows (k, k + n], k in [ts, N - n], for every n in the grid.
// All extremes start from the box windows, which are admissible for every delta.
Scan window_scan(const LogLengthTable& T, const std::vector<std::size_t>& grid, const std::vector<long double>& deltas,
                 std::size_t ts) {
  auto [hi, lo] = box_scan(T, ts);
  Scan s{hi, lo, std::vector<Best>(deltas.size(), hi), std::vector<Best>(deltas.size(), lo)};
  const auto& L = T.values();
  const std::size_t N = T.size();
  std::vector<long double> dmin(deltas.size()), dmax(deltas.size());
  std::vector<std::size_t> kmin(deltas.size()), kmax(deltas.size());
  std::vector<char> any(deltas.size());
  for (std::size_t n : grid) {
    if (n > N || ts > N - n) continue;
    long double amin = L[ts + n] - L[ts], amax = amin;
    std::size_t akmin = ts, akmax = ts;
    std::fill(any.begin(), any.end(), 0);
    for (std::size_t k = ts; k + n <= N; ++k) {
      long double d = L[k + n] - L[k];
      if (d < amin) amin = d, akmin = k;
      if (d > amax) amax = d, akmax = k;
      for (std::size_t j = 0; j < deltas.size(); ++j) {
        if (d < deltas[j] * L[k]) continue;
        if (!any[j]) {
          any[j] = 1, dmin[j] = dmax[j] = d, kmin[j] = kmax[j] = k;
          continue;
        }
        if (d < dmin[j]) dmin[j] = d, kmin[j] = k;
        if (d > dmax[j]) dmax[j] = d, kmax[j] = k;
      }
    }
    s.A.offer_max(n, akmin, amin);
    s.L.offer_min(n, akmax, amax);
    for (std::size_t j = 0; j < deltas.size(); ++j) {
      if (!any[j]) continue;
      s.qA[j].offer_max(n, kmin[j], dmin[j]);
      s.qL[j].offer_min(n, kmax[j], dmax[j]);
    }
  }
  return s;
}

std::vector<std::size_t> sorted_grid(std::vector<std::size_t> grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace

LogLengthTable LogLengthTable::from_schedule(const RatioSchedule& schedule, std::size_t N) {
  if (N > schedule.length()) throw DomainError("schedule shorter than " + std::to_string(N) + " steps");
  LogLengthTable t;
  t.rho0_ = schedule.rho0();
  t.L_.reserve(N + 1);
  t.L_.push_back(0);
  Scalar acc = 0;
  if (schedule.rule_based()) {
    for (std::size_t k = 1; k <= N; ++k) {
      acc += schedule.exponent(k);
      t.L_.push_back(acc.convert_to<long double>());
    }
    return t;
  }
  for (const auto& seg : schedule.segments()) {
    std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(seg.count, N - (t.L_.size() - 1)));
    const Scalar base = acc;
    for (std::size_t i = 1; i <= take; ++i) t.L_.push_back((base + seg.exponent * i).convert_to<long double>());
    acc = base + seg.exponent * take;
    if (t.L_.size() == N + 1) break;
  }
  return t;
}

LogLengthTable LogLengthTable::from_exponents(const std::vector<Scalar>& exponents, std::optional<Scalar> rho0) {
  LogLengthTable t;
  t.rho0_ = std::move(rho0);
  std::optional<Scalar> emax;
  if (t.rho0_) {
    if (!(*t.rho0_ > 0 && *t.rho0_ <= Scalar(1) / 2)) throw DomainError("rho0 must lie in (0, 1/2]");
    emax = -log(*t.rho0_) / log(Scalar(2));
  }
  t.L_.reserve(exponents.size() + 1);
  t.L_.push_back(0);
  Scalar acc = 0;
  for (const auto& e : exponents) {
    if (!(e >= 1)) throw DomainError("exponent below 1 (ratio above 1/2)");
    if (emax && e > *emax * (1 + Scalar(1e-30))) throw DomainError("exponent exceeds |log2 rho0|");
    acc += e;
    t.L_.push_back(acc.convert_to<long double>());
  }
  return t;
}

LogLengthTable LogLengthTable::prefix(std::size_t n) const {
  if (n > size()) throw DomainError("prefix longer than the table");
  LogLengthTable t;
  t.rho0_ = rho0_;
  t.L_.assign(L_.begin(), L_.begin() + static_cast<std::ptrdiff_t>(n + 1));
  return t;
}

LogLengthTable LogLengthTable::scaled(long double lambda) const {
  if (!(lambda > 0)) throw DomainError("scale factor must be positive");
  LogLengthTable t;
  if (rho0_) t.rho0_ = exp2_of(log2_of(*rho0_) * lambda);
  t.L_.reserve(L_.size());
  for (auto v : L_) t.L_.push_back(v * lambda);
  return t;
}

std::vector<std::size_t> default_n_grid(std::size_t N) {
  std::set<std::size_t> g;
  for (long double p = 1; std::ceil(p) <= static_cast<long double>(N / 2); p *= 1.15L)
    g.insert(static_cast<std::size_t>(std::ceil(p)));
  return {g.begin(), g.end()};
}

FormulaResult upper_box_formula(const LogLengthTable& T, const FormulaOptions& opt) {
  check_table(T);
  auto ts = tail_start(T.size(), opt);
  return box_scan(T, ts).first.result(ts);
}

FormulaResult lower_box_formula(const LogLengthTable& T, const FormulaOptions& opt) {
  check_table(T);
  auto ts = tail_start(T.size(), opt);
  return box_scan(T, ts).second.result(ts);
}

FormulaResult assouad_formula(const LogLengthTable& T, const std::vector<std::size_t>& n_grid,
                              const FormulaOptions& opt) {
  check_table(T);
  check_grid(n_grid, T.size());
  auto ts = tail_start(T.size(), opt);
  return window_scan(T, sorted_grid(n_grid), {}, ts).A.result(ts);
}

FormulaResult lower_assouad_formula(const LogLengthTable& T, const std::vector<std::size_t>& n_grid,
                                    const FormulaOptions& opt) {
  check_table(T);
  check_grid(n_grid, T.size());
  auto ts = tail_start(T.size(), opt);
  return window_scan(T, sorted_grid(n_grid), {}, ts).L.result(ts);
}

FormulaResult quasi_assouad_formula(const LogLengthTable& T, const Scalar& delta,
                                    const std::vector<std::size_t>& n_grid, const FormulaOptions& opt) {
  check_table(T);
  check_delta(T, delta);
  check_grid(n_grid, T.size());
  auto ts = tail_start(T.size(), opt);
  auto r = window_scan(T, sorted_grid(n_grid), {delta.convert_to<long double>()}, ts).qA[0].result(ts);
  r.delta = delta;
  return r;
}

FormulaResult quasi_lower_formula(const LogLengthTable& T, const Scalar& delta, const std::vector<std::size_t>& n_grid,
                                  const FormulaOptions& opt) {
  check_table(T);
  check_delta(T, delta);
  check_grid(n_grid, T.size());
  auto ts = tail_start(T.size(), opt);
  auto r = window_scan(T, sorted_grid(n_grid), {delta.convert_to<long double>()}, ts).qL[0].result(ts);
  r.delta = delta;
  return r;
}

QaCurve qa_curve(const LogLengthTable& T, const std::vector<Scalar>& delta_grid, double tol,
                 const FormulaOptions& opt) {
  if (delta_grid.size() < 3) throw DomainError("delta grid needs at least 3 entries");
  for (std::size_t i = 1; i < delta_grid.size(); ++i)
    if (!(delta_grid[i] < delta_grid[i - 1])) throw DomainError("delta grid must be strictly decreasing");
  check_table(T);
  for (const auto& d : delta_grid) check_delta(T, d);
  auto ts = tail_start(T.size(), opt);
  std::vector<long double> ds;
  for (const auto& d : delta_grid) ds.push_back(d.convert_to<long double>());
  auto scan = window_scan(T, default_n_grid(T.size()), ds, ts);
  QaCurve c;
  for (std::size_t j = 0; j < ds.size(); ++j) {
    auto r = scan.qA[j].result(ts);
    r.delta = delta_grid[j];
    c.points.emplace_back(delta_grid[j], r);
  }
  c.limit = c.points.back().second.value;
  c.converged = abs(c.limit - c.points[c.points.size() - 2].second.value) < tol;
  for (auto& p : c.points) p.second.converged = c.converged;
  return c;
}

FormulaBundle formula_bundle(const LogLengthTable& T, const std::vector<Scalar>& deltas, std::size_t reference_n,
                             double tol, const FormulaOptions& opt) {
  check_table(T);
  if (reference_n < kMinTable || reference_n > T.size()) throw DomainError("reference length outside [16, N]");
  std::vector<long double> ds;
  for (const auto& d : deltas) {
    check_delta(T, d);
    ds.push_back(d.convert_to<long double>());
  }
  auto eval = [&](const LogLengthTable& t) {
    auto ts = tail_start(t.size(), opt);
    auto grid = default_n_grid(t.size());
    auto s = window_scan(t, grid, ds, ts);
    FormulaBundle b;
    b.N = t.size();
    b.assouad = s.A.result(ts);
    b.lower_assouad = s.L.result(ts);
    auto [hi, lo] = box_scan(t, ts);
    b.upper_box = hi.result(ts);
    b.lower_box = lo.result(ts);
    for (std::size_t j = 0; j < ds.size(); ++j) {
      b.quasi_assouad.push_back(s.qA[j].result(ts));
      b.quasi_assouad.back().delta = deltas[j];
      b.quasi_lower.push_back(s.qL[j].result(ts));
      b.quasi_lower.back().delta = deltas[j];
    }
    return b;
  };
  FormulaBundle main = eval(T);
  FormulaBundle ref = eval(reference_n == T.size() ? T : T.prefix(reference_n));
  auto mark = [tol](FormulaResult& a, const FormulaResult& b) { a.converged = abs(a.value - b.value) < tol; };
  mark(main.assouad, ref.assouad);
  mark(main.lower_assouad, ref.lower_assouad);
  mark(main.upper_box, ref.upper_box);
  mark(main.lower_box, ref.lower_box);
  for (std::size_t j = 0; j < ds.size(); ++j) {
    mark(main.quasi_assouad[j], ref.quasi_assouad[j]);
    mark(main.quasi_lower[j], ref.quasi_lower[j]);
  }
  main.reference_n = reference_n;
  return main;
}

ProductBounds product_bounds(const Scalar& qLX, const Scalar& qAX, const Scalar& qLY, const Scalar& qAY) {
  return {qLX + qAY, qAX + qAY, qLX + qLY, qLX + qAY};
}

OrderingResult ordering_check(const Scalar& dL, const Scalar& dqL, const Scalar& lbox, const Scalar& ubox,
                              const Scalar& dqA, const Scalar& dA, const Scalar& slack) {
  if (slack < 0) throw DomainError("slack must be nonnegative");
  const Scalar* v[] = {&dL, &dqL, &lbox, &ubox, &dqA, &dA};
  const char* names[] = {"dim_L", "dim_qL", "lower box", "upper box", "dim_qA", "dim_A"};
  for (std::size_t i = 0; i + 1 < 6; ++i)
    if (*v[i] > *v[i + 1] + slack) return {false, std::string(names[i]) + " <= " + names[i + 1]};
  return {};
}

}  // namespace qadim
