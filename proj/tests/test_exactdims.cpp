#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qadim/exactdims.hpp"

#include <random>

using namespace qadim;

namespace {

double val(const FormulaResult& r) { return r.value.convert_to<double>(); }

StrictSchedule strict_instance(std::size_t blocks) {
  StrictParams p{Scalar(1), parse_scalar("1.25"), parse_scalar("1.5"), Scalar(2), parse_scalar("2.5"), Scalar(3)};
  p.blocks = blocks;
  return example_strict_schedule(p);
}

LogLengthTable strict_table(std::size_t blocks) {
  auto s = strict_instance(blocks);
  return LogLengthTable::from_schedule(s.schedule, s.schedule.length());
}

const FormulaOptions kStrictTail{1.0 / 16};

}  // namespace

TEST_CASE("log-length table") {
  auto t = LogLengthTable::from_schedule(RatioSchedule::from_segments({{3, Scalar(1)}, {2, Scalar(3)}}), 5);
  REQUIRE(t.size() == 5);
  CHECK(t[0] == 0);
  CHECK(t[3] == 3);
  CHECK(t[5] == 9);
  CHECK(t.inf_positive());
  CHECK(t.prefix(4)[4] == 6);
  CHECK_THROWS_AS(LogLengthTable::from_schedule(RatioSchedule::from_segments({{3, Scalar(1)}}), 4), DomainError);
  CHECK_THROWS_AS(LogLengthTable::from_exponents({Scalar(1), parse_scalar("0.5")}, std::nullopt), DomainError);
  CHECK_THROWS_AS(LogLengthTable::from_exponents({Scalar(3)}, parse_scalar("1/4")), DomainError);
}

TEST_CASE("n grid") {
  auto g = default_n_grid(100);
  CHECK(g.front() == 1);
  CHECK(g.back() <= 50);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
  CHECK(std::find(g.begin(), g.end(), 2) != g.end());
}

TEST_CASE("constant schedules give 1/e for all six formulas") {
  for (int e = 1; e <= 5; ++e) {
    auto t = LogLengthTable::from_schedule(RatioSchedule::constant(Scalar(e)), 400);
    auto g = default_n_grid(t.size());
    Scalar want = Scalar(1) / e;
    CHECK(upper_box_formula(t).value == want);
    CHECK(lower_box_formula(t).value == want);
    CHECK(assouad_formula(t, g).value == want);
    CHECK(lower_assouad_formula(t, g).value == want);
    for (const char* d : {"0.01", "0.3", "2"}) {
      CHECK(quasi_assouad_formula(t, parse_scalar(d), g).value == want);
      CHECK(quasi_lower_formula(t, parse_scalar(d), g).value == want);
    }
  }
}

TEST_CASE("errors") {
  auto shortt = LogLengthTable::from_schedule(RatioSchedule::constant(Scalar(2)), 15);
  CHECK_THROWS_AS(upper_box_formula(shortt), DomainError);
  auto t = LogLengthTable::from_schedule(RatioSchedule::constant(Scalar(2)), 64);
  CHECK_THROWS_AS(assouad_formula(t, {}), DomainError);
  CHECK_THROWS_AS(assouad_formula(t, {0}), DomainError);
  auto g = default_n_grid(64);
  CHECK_THROWS_AS(quasi_assouad_formula(t, Scalar(0), g), DomainError);
  CHECK_THROWS_AS(quasi_lower_formula(t, Scalar(-1), g), DomainError);
  auto rule = RatioSchedule::from_rule([](std::uint64_t k) { return Scalar(1) / (k + 2); }, 100, std::nullopt);
  auto tr = LogLengthTable::from_schedule(rule, 64);
  CHECK_THROWS_AS(quasi_assouad_formula(tr, parse_scalar("0.1"), g), DomainError);
  CHECK_NOTHROW(assouad_formula(tr, g));
}

TEST_CASE("two long blocks separate lower and upper box") {
  auto t = LogLengthTable::from_schedule(
      RatioSchedule::from_segments({{1000, Scalar(1)}, {1000, Scalar(3)}, {1000, Scalar(1)}, {1000, Scalar(3)}}),
      4000);
  auto ub = upper_box_formula(t), lb = lower_box_formula(t);
  CHECK(lb.value < ub.value);
  // tail [2000, 4000]: L_2000 = 4000, L_3000 = 5000, L_4000 = 8000
  CHECK(ub.value == Scalar(3) / 5);
  CHECK(ub.witness_n == 3000);
  CHECK(lb.value == Scalar(1) / 2);
  CHECK(lb.witness_n == 2000);
}

TEST_CASE("windowed evaluation equals the O(N^2) oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t N = std::uniform_int_distribution<std::size_t>(16, 512)(rng);
    std::vector<Scalar> ex;
    std::vector<long double> el;
    int runs = std::uniform_int_distribution<int>(1, 8)(rng);
    while (ex.size() < N) {
      int e8 = std::uniform_int_distribution<int>(8, 40)(rng);
      std::size_t len = std::uniform_int_distribution<std::size_t>(1, N / runs + 1)(rng);
      for (std::size_t i = 0; i < len && ex.size() < N; ++i) {
        ex.push_back(Scalar(e8) / 8);
        el.push_back(e8 / 8.0L);
      }
    }
    auto t = LogLengthTable::from_exponents(ex, parse_scalar("1/32"));
    auto g = default_n_grid(N);
    double f = trial % 3 == 0 ? 1.0 / 16 : 0.5;
    FormulaOptions opt{f};
    long double delta = std::uniform_real_distribution<double>(0.01, 1.5)(rng);
    auto ts = upper_box_formula(t, opt).tail_start;
    auto w = oracle::brute_windows(el, g, ts, delta);
    Scalar d = Scalar(delta);
    CHECK(val(upper_box_formula(t, opt)) == doctest::Approx(double(w.ubox)).epsilon(1e-14));
    CHECK(val(lower_box_formula(t, opt)) == doctest::Approx(double(w.lbox)).epsilon(1e-14));
    CHECK(val(assouad_formula(t, g, opt)) == doctest::Approx(double(w.A)).epsilon(1e-14));
    CHECK(val(lower_assouad_formula(t, g, opt)) == doctest::Approx(double(w.L)).epsilon(1e-14));
    CHECK(val(quasi_assouad_formula(t, d, g, opt)) == doctest::Approx(double(w.qA)).epsilon(1e-14));
    CHECK(val(quasi_lower_formula(t, d, g, opt)) == doctest::Approx(double(w.qL)).epsilon(1e-14));
  }
}

TEST_CASE("ordering and monotonicity invariants on random tables") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t N = std::uniform_int_distribution<std::size_t>(64, 3000)(rng);
    std::vector<Scalar> ex;
    while (ex.size() < N) {
      Scalar e = Scalar(std::uniform_int_distribution<int>(4, 20)(rng)) / 4;
      std::size_t len = std::uniform_int_distribution<std::size_t>(1, 200)(rng);
      for (std::size_t i = 0; i < len && ex.size() < N; ++i) ex.push_back(e);
    }
    auto t = LogLengthTable::from_exponents(ex, parse_scalar("1/32"));
    auto g = default_n_grid(N);
    auto A = assouad_formula(t, g).value, L = lower_assouad_formula(t, g).value;
    auto ub = upper_box_formula(t).value, lb = lower_box_formula(t).value;
    CHECK(lb <= ub);
    CHECK(ub <= A);
    CHECK(L <= lb);
    Scalar prev_qa = A, prev_ql = L;
    for (const char* ds : {"0.001", "0.01", "0.05", "0.2", "0.6", "1.5"}) {
      auto qa = quasi_assouad_formula(t, parse_scalar(ds), g).value;
      auto ql = quasi_lower_formula(t, parse_scalar(ds), g).value;
      CHECK(qa <= prev_qa);
      CHECK(ql >= prev_ql);
      CHECK(qa >= ub);
      CHECK(ql <= lb);
      prev_qa = qa;
      prev_ql = ql;
    }
  }
}

TEST_CASE("scale invariance") {
  std::vector<Scalar> ex;
  for (int i = 0; i < 700; ++i) ex.push_back(Scalar(1 + (i / 50) % 3));
  auto t = LogLengthTable::from_exponents(ex, parse_scalar("1/8"));
  auto g = default_n_grid(t.size());
  for (long double lam : {1.5L, 2.0L, 3.25L}) {
    auto s = t.scaled(lam);
    auto pair = [&](const FormulaResult& a, const FormulaResult& b) {
      CHECK(val(b) * double(lam) == doctest::Approx(val(a)).epsilon(1e-12));
    };
    pair(upper_box_formula(t), upper_box_formula(s));
    pair(lower_box_formula(t), lower_box_formula(s));
    pair(assouad_formula(t, g), assouad_formula(s, g));
    pair(lower_assouad_formula(t, g), lower_assouad_formula(s, g));
    pair(quasi_assouad_formula(t, parse_scalar("0.1"), g), quasi_assouad_formula(s, parse_scalar("0.1"), g));
    pair(quasi_lower_formula(t, parse_scalar("0.1"), g), quasi_lower_formula(s, parse_scalar("0.1"), g));
  }
}

TEST_CASE("large delta excludes a late anomalous block") {
  // e = 2 except ten steps of e = 1 at k = 901..910
  auto t = LogLengthTable::from_schedule(
      RatioSchedule::from_segments({{900, Scalar(2)}, {10, Scalar(1)}, {90, Scalar(2)}}), 1000);
  auto g = default_n_grid(1000);
  CHECK(assouad_formula(t, g).value == 1);
  CHECK(quasi_assouad_formula(t, parse_scalar("0.001"), g).value == 1);
  auto big = quasi_assouad_formula(t, Scalar(1), g);
  CHECK(big.value == upper_box_formula(t).value);
  CHECK(big.witness_k == 0);
}

TEST_CASE("qa_curve") {
  std::vector<Scalar> grid{parse_scalar("0.4"), parse_scalar("0.2"), parse_scalar("0.1"), parse_scalar("0.05")};
  auto flat = qa_curve(LogLengthTable::from_schedule(RatioSchedule::constant(Scalar(3)), 300), grid);
  CHECK(flat.converged);
  for (const auto& [d, r] : flat.points) CHECK(r.value == Scalar(1) / 3);
  CHECK(flat.limit == Scalar(1) / 3);

  auto t = LogLengthTable::from_schedule(
      RatioSchedule::from_segments({{900, Scalar(2)}, {10, Scalar(1)}, {90, Scalar(2)}}), 1000);
  auto c = qa_curve(t, {parse_scalar("0.1"), parse_scalar("0.01"), parse_scalar("0.001")});
  CHECK_FALSE(c.converged);
  for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].second.value >= c.points[i - 1].second.value);

  CHECK_THROWS_AS(qa_curve(t, {Scalar(1), parse_scalar("0.5")}), DomainError);
  CHECK_THROWS_AS(qa_curve(t, {parse_scalar("0.1"), parse_scalar("0.2"), parse_scalar("0.05")}), DomainError);
}

TEST_CASE("strict instance truncations at 8 blocks") {
  auto t = strict_table(8);
  auto g = default_n_grid(t.size());
  CHECK(val(assouad_formula(t, g, kStrictTail)) == doctest::Approx(1.0).epsilon(0.05));
  CHECK(val(upper_box_formula(t, kStrictTail)) == doctest::Approx(2.0 / 3).epsilon(0.05));
  CHECK(val(lower_box_formula(t, kStrictTail)) == doctest::Approx(0.5).epsilon(0.05));
  CHECK(val(lower_assouad_formula(t, g, kStrictTail)) == doctest::Approx(1.0 / 3).epsilon(0.05));
  auto curve = qa_curve(t, {parse_scalar("0.4"), parse_scalar("0.2"), parse_scalar("0.1"), parse_scalar("0.05")}, 0.02,
                        kStrictTail);
  CHECK(curve.converged);
  CHECK(std::abs(curve.limit.convert_to<double>() - 0.8) < 0.05);
  for (std::size_t i = 1; i < curve.points.size(); ++i)
    CHECK(curve.points[i].second.value >= curve.points[i - 1].second.value);
  CHECK(std::abs(val(quasi_lower_formula(t, parse_scalar("0.05"), g, kStrictTail)) - 0.4) < 0.05);
}

TEST_CASE("formula bundle convergence and ordering on the strict instance") {
  auto t10 = strict_table(10);
  auto n8 = strict_instance(8).schedule.length();
  auto b = formula_bundle(t10, {parse_scalar("0.05")}, n8, 0.02, kStrictTail);
  CHECK(b.N == t10.size());
  CHECK(b.reference_n == n8);
  CHECK(b.assouad.converged);
  CHECK(b.upper_box.converged);
  CHECK(b.lower_box.converged);
  CHECK(b.lower_assouad.converged);
  CHECK(b.quasi_assouad[0].converged);
  CHECK(b.quasi_lower[0].converged);
  auto o = ordering_check(b.lower_assouad.value, b.quasi_lower[0].value, b.lower_box.value, b.upper_box.value,
                          b.quasi_assouad[0].value, b.assouad.value, parse_scalar("0.05"));
  CHECK(o.pass);
}

TEST_CASE("product bounds") {
  Scalar h = parse_scalar("0.5");
  auto p = product_bounds(h, h, h, h);
  CHECK(p.qa_lower == 1);
  CHECK(p.qa_upper == 1);
  CHECK(p.ql_lower == 1);
  CHECK(p.ql_upper == 1);
  auto b = product_bounds(parse_scalar("0.3"), parse_scalar("0.5"), parse_scalar("0.2"), parse_scalar("0.6"));
  CHECK(abs(b.qa_lower - parse_scalar("0.9")) < 1e-70);
  CHECK(abs(b.qa_upper - parse_scalar("1.1")) < 1e-70);
  CHECK(abs(b.ql_lower - parse_scalar("0.5")) < 1e-70);
  CHECK(abs(b.ql_upper - parse_scalar("0.9")) < 1e-70);
  // self-similar factors: qL = qA = dim_H, so both bounds equal the sum
  Scalar dF = log(Scalar(2)) / log(Scalar(3)), dG = Scalar(1) / 2;
  auto s = product_bounds(dF, dF, dG, dG);
  CHECK(s.qa_lower == s.qa_upper);
  CHECK(s.qa_upper == dF + dG);
}

TEST_CASE("ordering check") {
  Scalar h = parse_scalar("0.5"), z = 0;
  CHECK(ordering_check(h, h, h, h, h, h, z).pass);
  auto bad = ordering_check(parse_scalar("0.1"), parse_scalar("0.2"), parse_scalar("0.6"), parse_scalar("0.5"),
                            parse_scalar("0.7"), parse_scalar("0.9"), z);
  CHECK_FALSE(bad.pass);
  CHECK(bad.violation == "lower box <= upper box");
  CHECK(ordering_check(parse_scalar("0.1"), parse_scalar("0.2"), parse_scalar("0.52"), parse_scalar("0.5"),
                       parse_scalar("0.7"), parse_scalar("0.9"), parse_scalar("0.05"))
            .pass);
  CHECK_THROWS_AS(ordering_check(h, h, h, h, h, h, Scalar(-1)), DomainError);
}
