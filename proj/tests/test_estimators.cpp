#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qadim/estimators.hpp"

#include <cmath>
#include <sstream>

using namespace qadim;

namespace {

CantorApprox quarters(std::size_t depth) { return cantor_step(RatioSchedule::constant(Scalar(2)), depth); }

Target quarters_target(std::size_t depth) {
  auto c = quarters(depth);
  return Target(c.intervals(), native_radii(c));
}

Target unit_interval() { return Target(IntervalSet1D({{Scalar(0), Scalar(1)}}), dyadic_radii(2, 30)); }

SweepConfig fine_unit_config() {
  SweepConfig cfg;
  cfg.resolution = pow2i(-40);
  return cfg;
}

std::vector<Scalar> powers_of_four(int lo, int hi) {
  std::vector<Scalar> out;
  for (int k = lo; k <= hi; ++k) out.push_back(pow2i(-2 * k));
  return out;
}

StrictSchedule strict_instance(std::size_t blocks) {
  StrictParams p{Scalar(1), parse_scalar("1.25"), parse_scalar("1.5"), Scalar(2), parse_scalar("2.5"), Scalar(3)};
  p.blocks = blocks;
  return example_strict_schedule(p);
}

}  // namespace

TEST_CASE("box counting on simple sets") {
  SweepConfig cfg;
  cfg.r_grid = powers_of_four(2, 12);
  Target point(PointSet1D({parse_scalar("0.3")}), {});
  auto b = estimate_box(point, cfg);
  CHECK(b.lower.estimate == 0);
  CHECK(b.upper.estimate == 0);

  auto q = estimate_box(quarters_target(14), cfg);
  CHECK(q.lower.estimate == doctest::Approx(0.5).epsilon(0.03));
  CHECK(q.upper.estimate == doctest::Approx(0.5).epsilon(0.03));
  for (std::size_t k = 0; k < q.counts.size(); ++k) CHECK(q.counts[k].second == std::uint64_t{1} << (k + 2));

  SweepConfig dec;
  for (int h = 6; h <= 14; ++h) dec.r_grid.push_back(pow(Scalar(10), -Scalar(h) / 2));
  auto inv = estimate_box(Target(decreasing_gap_points(rule_inverse, 10000)), dec);
  CHECK(std::abs(inv.upper.estimate - 0.5) <= 0.05);

  SweepConfig coarse;
  coarse.r_grid = powers_of_four(2, 5);
  CHECK_THROWS_AS(estimate_box(quarters_target(14), coarse), DomainError);
}

TEST_CASE("unit interval sweeps") {
  auto T = unit_interval();
  auto cfg = fine_unit_config();
  for (double d : {0.0, 0.1, 0.5}) {
    CHECK(h_upper_sweep(T, d, cfg).estimate == doctest::Approx(1).epsilon(0.02));
    // an endpoint centre sees half a ball: count R/2r, slope 1 - 1/lambda
    auto lower = h_lower_sweep(T, d, cfg);
    CHECK(lower.estimate >= 1 - 1 / cfg.lambda_min - 1e-12);
    CHECK(lower.regression == doctest::Approx(1).epsilon(0.02));
  }
  CHECK(estimate_ql(T, {0.4, 0.2, 0.1}, cfg).estimate >= 1 - 1 / cfg.lambda_min - 1e-12);
  auto chain = verify_chain(T, 0.1, cfg, 0.05);
  CHECK(chain.ordering.pass);
  CHECK(chain.A.estimate == doctest::Approx(1).epsilon(0.05));
  CHECK(chain.lowerA.estimate >= 1 - 1 / cfg.lambda_min - 1e-12);
}

TEST_CASE("no admissible pair is a domain error") {
  auto T = unit_interval();
  CHECK_THROWS_AS(h_upper_sweep(T, 0.1, SweepConfig{}), DomainError);
  auto cfg = fine_unit_config();
  CHECK_THROWS_AS(h_upper_sweep(T, 0.01, cfg), DomainError);
  CHECK_THROWS_AS(assouad_spectrum(T, {0.99}, cfg), DomainError);
  CHECK_THROWS_AS(estimate_qa(T, {0.1, 0.2, 0.3}, cfg), DomainError);
}

TEST_CASE("homogeneous Cantor set") {
  auto T = quarters_target(14);
  SweepConfig cfg;
  cfg.centers.cap = 256;
  // R = 4^-4k with s a multiple of 1/4 keeps every r a level length
  cfg.R_grid = {pow2i(-4), pow2i(-8), pow2i(-16)};
  auto lower = h_lower_sweep(T, 0.25, cfg);
  CHECK(std::abs(lower.estimate - 0.5) < 0.01);
  auto qa = estimate_qa(T, {1, 0.5, 0.25}, cfg);
  for (auto& [d, v] : qa.curve) CHECK(std::abs(v - 0.5) < 0.01);
  CHECK(qa.converged);
  auto ql = estimate_ql(T, {1, 0.5, 0.25}, cfg);
  CHECK(std::abs(ql.estimate - 0.5) < 0.01);
  auto sp = assouad_spectrum(T, {0.25, 1.0 / 3, 0.5}, cfg);
  for (auto& r : sp.per_theta) CHECK(std::abs(r.estimate - 0.5) < 0.01);

  SweepConfig native;
  native.centers.cap = 256;
  auto chain = verify_chain(T, 0.1, native, 0.0);
  CHECK(chain.ordering.pass);
  for (auto* r : {&chain.lowerA, &chain.qL, &chain.lbox, &chain.ubox, &chain.qA, &chain.A})
    CHECK(std::abs(r->estimate - 0.5) < 0.01);
}

TEST_CASE("witness records re-evaluate") {
  auto T = quarters_target(12);
  SweepConfig cfg;
  cfg.centers.cap = 64;
  auto r = h_upper_sweep(T, 0.2, cfg);
  REQUIRE(r.witness);
  const auto& w = *r.witness;
  CHECK(T.local(w.center_max, w.R, w.r) == w.count_max);
  CHECK(w.slope_max == doctest::Approx(std::log2(double(w.count_max)) / w.lambda));
  CHECK(r.estimate == w.slope_max);
  CHECK(w.lambda >= cfg.lambda_min);
}

TEST_CASE("strict set lower sweep against the exact formula") {
  auto s = strict_instance(4);
  auto c = cantor_step(s.schedule, s.schedule.length());
  Target T(c, native_radii(c));
  SweepConfig cfg;
  cfg.s_multipliers = {1};
  for (int k = 80; k <= 300; k += 10) cfg.R_grid.push_back(pow2i(-k));
  cfg.centers.cap = 64;
  auto est = h_lower_sweep(T, 0.1, cfg);
  auto table = LogLengthTable::from_schedule(s.schedule, s.schedule.length());
  auto exact = quasi_lower_formula(table, 0.1, default_n_grid(table.size()), FormulaOptions{1.0 / 16});
  CHECK(std::abs(est.estimate - exact.value.convert_to<double>()) <= 0.05);
  CHECK(std::abs(est.estimate - 0.4) <= 0.05);
}

TEST_CASE("F_alpha separates Assouad from quasi-Assouad") {
  std::vector<double> assouad;
  for (std::size_t depth : {5, 6}) {
    auto f = f_alpha_step(Scalar(1) / 2, depth);
    Target T(f.intervals, native_radii(f));
    // depth-6 Assouad witnesses span 7 bits; delta = 0.25 keeps the default floor of 8
    SweepConfig cfg;
    cfg.lambda_min = 7;
    Sweeper sw(T, cfg);
    sw.add_grid_pairs();
    sw.evaluate();
    assouad.push_back(sw.h_upper(0).estimate);
    auto q = h_upper_sweep(T, 0.25, SweepConfig{});
    CHECK(q.estimate <= 0.65);
    CHECK(q.estimate < assouad.back());
  }
  CHECK(assouad[1] > assouad[0]);
  CHECK(assouad[1] > 0.8);
}

TEST_CASE("F_alpha chain at depth 6") {
  auto f = f_alpha_step(Scalar(1) / 2, 6);
  Target T(f.intervals, native_radii(f));
  SweepConfig cfg;
  for (int k = 2; k <= 42; k += 8) cfg.r_grid.push_back(pow2i(-k));
  auto chain = verify_chain(T, 0.25, cfg, 0.05);
  CHECK_MESSAGE(chain.ordering.pass, chain.ordering.violation);
}

TEST_CASE("decreasing sequence spectrum") {
  Target T(decreasing_gap_points(rule_inverse, 100000));
  SweepConfig cfg;
  cfg.lambda_min = 3;
  for (int k = 2; k <= 34; ++k) cfg.R_grid.push_back(pow2i(-k));
  auto sp = assouad_spectrum(T, {1.0 / 3, 0.6}, cfg);
  CHECK(std::abs(sp.per_theta[0].estimate - 0.75) <= 0.1);
  CHECK(std::abs(sp.per_theta[1].estimate - 1) <= 0.1);
  CHECK(sp.sup == std::max(sp.per_theta[0].estimate, sp.per_theta[1].estimate));
}

TEST_CASE("shared pool invariants") {
  auto ifs = SimilarityIFS1D::uniform(Scalar(1) / 3, {Scalar(0), parse_scalar("0.301"), Scalar(2) / 3});
  Target T(ifs_attractor(ifs, 12), native_radii(ifs, 12));
  SweepConfig cfg;
  cfg.lambda_min = 6;
  cfg.lambda_max = 16;
  cfg.s_multipliers = {1, 2, 4, 8};
  cfg.centers.cap = 64;
  Sweeper sw(T, cfg);
  const std::vector<double> deltas{0.05, 0.1, 0.2, 0.4};
  const std::vector<double> thetas{0.3, 0.4, 0.5, 0.6};
  sw.add_grid_pairs();
  for (double d : deltas) sw.add_quasi_pairs(d);
  for (double t : thetas) sw.add_spectrum_pairs(t);
  sw.evaluate();
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    CHECK(sw.h_upper(deltas[i]).estimate <= sw.h_upper(deltas[i - 1]).estimate + 1e-12);
    CHECK(sw.h_lower(deltas[i]).estimate >= sw.h_lower(deltas[i - 1]).estimate - 1e-12);
  }
  CHECK(sw.h_upper(deltas[0]).estimate <= sw.h_upper(0).estimate + 1e-12);
  double sup = 0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    double v = sw.spectrum(thetas[i]).estimate;
    sup = std::max(sup, v);
    if (i > 0) CHECK(sw.spectrum(thetas[i - 1]).estimate <= v + 0.02);
  }
  CHECK(sw.h_upper(deltas[0]).estimate >= sup - 1e-12);
  for (const auto& r : sw.records()) {
    CHECK(r.count_min >= 1);
    CHECK(r.count_min <= r.count_max);
    CHECK(r.slope_min >= 0);
    CHECK(r.count_max <= (r.R / r.r).convert_to<double>() + 1);
  }
}

TEST_CASE("records are identical across thread counts and replay exactly") {
  auto f = f_alpha_step(Scalar(1) / 2, 5);
  Target T(f.intervals, native_radii(f));
  auto run = [&](unsigned threads) {
    SweepConfig cfg;
    cfg.lambda_min = 7;
    cfg.threads = threads;
    Sweeper sw(T, cfg);
    sw.add_grid_pairs();
    sw.add_quasi_pairs(0.2);
    sw.evaluate();
    std::ostringstream os;
    write_records_csv(os, sw.records());
    return os.str();
  };
  const std::string one = run(1), eight = run(8), again = run(8);
  CHECK(one == eight);
  CHECK(eight == again);
  std::istringstream in(eight);
  auto replay = replay_records(T, in);
  CHECK(replay.lines > 10);
  CHECK(replay.mismatches.empty());

  std::string tampered = eight;
  auto line_end = tampered.find('\n', tampered.find('\n') + 1);
  auto comma = tampered.rfind(',', line_end);
  auto count_pos = tampered.rfind(',', comma - 1) + 1;
  tampered.replace(count_pos, comma - count_pos, "999999");
  std::istringstream bad(tampered);
  CHECK(replay_records(T, bad).mismatches.size() == 1);
}

TEST_CASE("two-dimensional records and csv centers") {
  auto ex = projection_example(8);
  Target T(ex.set());
  SweepConfig cfg;
  cfg.centers.cap = 32;
  Sweeper sw(T, cfg);
  sw.add_quasi_pairs(0.5);
  sw.evaluate();
  REQUIRE(!sw.records().empty());
  for (const auto& r : sw.records()) {
    double side = std::ceil((2 * r.R / r.r).convert_to<double>()) + 1;
    CHECK(r.count_max <= side * side);
  }
  std::ostringstream os;
  write_records_csv(os, sw.records());
  CHECK(os.str().find(';') != std::string::npos);
  std::istringstream in(os.str());
  CHECK(replay_records(T, in).mismatches.empty());
}

TEST_CASE("projection counting bound") {
  auto small = projection_bound_check(8, 32, 1);
  CHECK(small.pass);
  CHECK(small.checked > 0);
  auto full = projection_bound_check(10, 64);
  CHECK(full.pass);
  CHECK(full.violations.empty());
  CHECK(full.tightest.count <= full.tightest.bound);
  CHECK_THROWS_AS(projection_bound_check(15, 8), DomainError);
}

TEST_CASE("curve output") {
  auto T = quarters_target(10);
  SweepConfig cfg;
  cfg.centers.cap = 32;
  auto qa = estimate_qa(T, {0.4, 0.2, 0.1}, cfg);
  std::ostringstream os;
  write_curve(os, qa);
  std::istringstream in(os.str());
  double x, y;
  std::size_t n = 0;
  while (in >> x >> y) ++n;
  CHECK(n == 3);
  CHECK_THROWS_AS(estimate_qa(T, {0.1, 0.2}, cfg), DomainError);
}
