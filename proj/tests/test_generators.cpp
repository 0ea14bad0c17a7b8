#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"
#include "qadim/generators.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace qadim;

namespace {

Scalar q(const char* s) { return parse_scalar(s); }

// Recursive expansion of the two-branch rule, kept separate from the library.
void expand(const Scalar& lo, const Scalar& len, std::size_t k, std::size_t n, const RatioSchedule& s,
            std::vector<Interval>& out) {
  if (k == n) {
    out.push_back({lo, lo + len});
    return;
  }
  Scalar child = len * s.ratio(k + 1);
  expand(lo, child, k + 1, n, s, out);
  expand(lo + len - child, child, k + 1, n, s, out);
}

}  // namespace

TEST_CASE("cantor_step examples") {
  auto c1 = cantor_step(RatioSchedule::constant(Scalar(2)), 1);
  REQUIRE(c1.intervals().size() == 2);
  CHECK(c1.intervals().intervals()[0] == Interval{Scalar(0), q("1/4")});
  CHECK(c1.intervals().intervals()[1] == Interval{q("3/4"), Scalar(1)});

  auto c2 = cantor_step(RatioSchedule::constant(Scalar(2)), 2);
  std::vector<Scalar> los;
  for (const auto& iv : c2.intervals().intervals()) {
    CHECK(iv.length() == q("1/16"));
    los.push_back(iv.lo);
  }
  CHECK(los == std::vector<Scalar>{Scalar(0), q("3/16"), q("3/4"), q("15/16")});

  auto mixed = RatioSchedule::from_segments({{1, Scalar(1)}, {1, Scalar(2)}});
  auto c3 = cantor_step(mixed, 2);
  CHECK(c3.members().size() == 4);
  for (const auto& iv : c3.members()) CHECK(iv.length() == q("1/8"));
  CHECK(c3.intervals().size() == 3);  // ratio 1/2 makes the two middle members touch

  CHECK_THROWS_AS(RatioSchedule::constant(q("0.9")), DomainError);
  CHECK_THROWS_AS(cantor_step(mixed, 3), DomainError);
}

TEST_CASE("cantor_step matches recursive expansion, nests, and keeps exact lengths") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> e(5, 12);  // ratio strictly below 1/2 keeps children apart
  for (int t = 0; t < 20; ++t) {
    std::vector<RatioSchedule::Segment> segs;
    for (int i = 0; i < 10; ++i) segs.push_back({1, Scalar(e(rng)) / 4});
    auto s = RatioSchedule::from_segments(segs);
    std::size_t n = 1 + t % 10;
    auto c = cantor_step(s, n);
    std::vector<Interval> ref;
    expand(Scalar(0), Scalar(1), 0, n, s, ref);
    REQUIRE(c.intervals().size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(abs(c.intervals().intervals()[i].lo - ref[i].lo) < 1e-70);
      CHECK(abs(c.intervals().intervals()[i].hi - ref[i].hi) < 1e-70);
    }
    if (n > 1) {
      auto parent = cantor_step(s, n - 1);
      for (const auto& iv : c.intervals().intervals()) {
        int hosts = 0;
        for (const auto& p : parent.intervals().intervals()) hosts += p.lo - 1e-70 <= iv.lo && iv.hi <= p.hi + 1e-70;
        CHECK(hosts == 1);
      }
    }
  }
  auto dyadic = RatioSchedule::from_segments({{5, Scalar(2)}, {5, Scalar(3)}, {kUnbounded, Scalar(1)}});
  auto c = cantor_step(dyadic, 14);
  Scalar prod = 1;
  for (std::size_t k = 1; k <= 14; ++k) prod *= dyadic.ratio(k);
  for (const auto& iv : c.members()) CHECK(iv.length() == prod);
}

TEST_CASE("implicit tree counts equal counts on the materialised intervals") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  auto s = RatioSchedule::from_segments({{3, Scalar(2)}, {4, Scalar(1)}, {kUnbounded, q("2.5")}});
  auto c = cantor_step(s, 12);
  for (int t = 0; t < 300; ++t) {
    Scalar x(u(rng)), R = exp2_of(-u(rng) * 10), r = R * exp2_of(-u(rng) * 20);
    CHECK(c.local_count(x, R, r) == local_covering_number(c.intervals(), x, R, r));
  }
  for (int k = 1; k < 40; ++k) CHECK(c.covering_count(pow2i(-k)) == covering_number_1d(c.intervals(), pow2i(-k)));
  auto lv = c.level_left_endpoints(5);
  CHECK(lv.size() == 32);
  CHECK(std::is_sorted(lv.begin(), lv.end()));
  for (const auto& x : lv) CHECK(c.intervals().contains(x));
}

TEST_CASE("deep Cantor trees count without materialising") {
  auto c = cantor_step(RatioSchedule::constant(Scalar(2)), 60);
  CHECK(!c.materialized());
  CHECK_THROWS_AS(c.intervals(), DomainError);
  CHECK(c.covering_count(pow2i(-40)) == (std::uint64_t{1} << 20));
  CHECK(c.local_count(Scalar(0), pow2i(-20), pow2i(-50)) == (std::uint64_t{1} << 15));
  CHECK(c.local_count(Scalar(0), pow2i(-20), pow2i(-50)) == c.local_count(pow2i(-21), pow2i(-21), pow2i(-50)));
}

TEST_CASE("precision rounding") {
  auto s = RatioSchedule::constant(Scalar(1) / 3 + 2);
  auto hi = cantor_step(s, 3, 256), lo = cantor_step(s, 3, 53);
  CHECK(lo.min_len() != hi.min_len());
  CHECK(lo.min_len() == Scalar(hi.min_len().convert_to<double>()));
  CHECK_THROWS_AS(cantor_step(s, 3, 40), DomainError);
  CHECK_THROWS_AS(cantor_step(s, 3, 300), DomainError);
}

TEST_CASE("moran_cut on middle thirds and a mixed-ratio system") {
  auto thirds = SimilarityIFS1D::uniform(q("1/3"), {Scalar(0), q("2/3")});
  auto cut = moran_cut(thirds, q("1/9") + pow2i(-100));
  REQUIRE(cut.words.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(cut.words[i].size() == 2);
    CHECK(abs(cut.intervals[i].length() - q("1/9")) < 1e-70);
  }
  CHECK(cut.D == 3);

  SimilarityIFS1D mixed({{q("1/2"), Scalar(0)}, {q("1/4"), q("3/4")}});
  auto m = moran_cut(mixed, q("1/4"));
  // reference: enumerate all words to depth 6 and keep the first drops below r
  std::set<Word> expect;
  std::vector<Word> frontier{{}};
  for (int d = 0; d < 6; ++d) {
    std::vector<Word> next;
    for (const auto& w : frontier)
      for (std::uint16_t i = 0; i < 2; ++i) {
        Word c = w;
        c.push_back(i);
        if (mixed.cylinder(c).length() < q("1/4")) expect.insert(c); else next.push_back(c);
      }
    frontier = next;
  }
  CHECK(std::set<Word>(m.words.begin(), m.words.end()) == expect);
  std::set<std::size_t> depths;
  for (std::size_t i = 0; i < m.words.size(); ++i) {
    depths.insert(m.words[i].size());
    CHECK(m.intervals[i].length() < m.r);
    CHECK(m.r <= m.D * m.intervals[i].length());
  }
  CHECK(depths.size() > 1);

  auto top = moran_cut(thirds, Scalar(1) / 2);
  CHECK(top.words.size() == 2);
  CHECK_THROWS_AS(moran_cut(thirds, Scalar(0)), DomainError);
  CHECK_THROWS_AS(moran_cut(thirds, Scalar(2)), DomainError);
}

TEST_CASE("validate_moran") {
  auto thirds = SimilarityIFS1D::uniform(q("1/3"), {Scalar(0), q("2/3")});
  auto rep = validate_moran(thirds, 4);
  CHECK(rep.m1);
  CHECK(rep.m2);
  CHECK(rep.m5);
  CHECK(abs(rep.d_m3 - 1) < 1e-70);
  CHECK(abs(rep.d - 3) < 1e-70);

  auto halves = SimilarityIFS1D::uniform(q("1/2"), {Scalar(0), q("1/4")});
  auto h = validate_moran(halves, 4);
  CHECK(h.m1);
  CHECK(h.m5);  // similarities are injective, so disjoint images force disjoint preimages
  CHECK(h.violations.empty());

  SimilarityIFS1D single({{q("1/3"), Scalar(0)}});
  auto s = validate_moran(single, 3);
  CHECK(s.m1);
  CHECK(s.m5);
  CHECK(single.base() == Interval{Scalar(0), Scalar(1)});
  CHECK_THROWS_AS(validate_moran(thirds, 1), DomainError);
}

TEST_CASE("subshift constraints") {
  std::vector<std::vector<int>> golden{{1, 1}, {1, 0}};
  SimilarityIFS1D ifs({{q("1/3"), Scalar(0)}, {q("1/3"), q("2/3")}}, golden);
  auto cut = moran_cut(ifs, q("1/30"));
  for (const auto& w : cut.words) {
    CHECK(ifs.admissible(w));
    for (std::size_t i = 0; i + 1 < w.size(); ++i) CHECK(!(w[i] == 1 && w[i + 1] == 1));
  }
  // admissible words of length n number Fibonacci(n + 2)
  CHECK(ifs_attractor(ifs, 4).size() <= 8);
  CHECK_THROWS_AS(SimilarityIFS1D({{q("1/3"), Scalar(0)}, {q("1/3"), q("2/3")}}, {{1, 1}, {0, 0}}), DomainError);
  CHECK_THROWS_AS(SimilarityIFS1D({{q("1/3"), Scalar(0)}}, {{2}}), DomainError);
  CHECK_THROWS_AS(SimilarityIFS1D({{Scalar(1), Scalar(0)}}), DomainError);
}

TEST_CASE("ifs_attractor merges overlapping cylinders") {
  auto ifs = SimilarityIFS1D::uniform(q("1/3"), {Scalar(0), q("0.25"), q("2/3")});
  auto a = ifs_attractor(ifs, 3);
  CHECK(a.size() < 27);
  CHECK(a.lo() == 0);
  CHECK(a.hi() == 1);
  auto m = moran_cut(ifs, pow2i(-5));
  for (const auto& iv : m.intervals) CHECK(iv.lo >= 0);
}

TEST_CASE("f_alpha placement") {
  auto f1 = f_alpha_step(q("1/2"), 1);
  REQUIRE(f1.intervals.size() == 2);
  CHECK(f1.intervals.intervals()[0] == Interval{Scalar(0), q("1/4")});
  CHECK(f1.intervals.intervals()[1] == Interval{q("3/4"), Scalar(1)});
  CHECK(f1.level_gaps[1] == q("1/2"));

  auto f2 = f_alpha_step(q("1/2"), 2);
  REQUIRE(f2.intervals.size() == 8);
  std::vector<Scalar> los;
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(f2.intervals.intervals()[i].length() == q("1/64"));
    los.push_back(f2.intervals.intervals()[i].lo);
  }
  CHECK(los == std::vector<Scalar>{Scalar(0), q("5/64"), q("10/64"), q("15/64")});

  auto f4 = f_alpha_step(q("1/2"), 4);
  CHECK(f4.intervals.size() == std::size_t{1} << (1 + 2 + 3 + 4));
  CHECK(f4.level_lengths[4] == pow2i(-20));

  CHECK_THROWS_AS(f_alpha_step(Scalar(1), 1), DomainError);
  CHECK_THROWS_AS(f_alpha_step(Scalar(0), 1), DomainError);
  auto near = f_alpha_step(q("0.99"), 1);
  CHECK(near.intervals.size() == 2);
  CHECK(2 * near.level_lengths[1] < 1);
}

TEST_CASE("f_alpha children per parent and total length") {
  auto f = f_alpha_step(q("0.7"), 3);
  auto parent = f_alpha_step(q("0.7"), 2);
  std::size_t idx = 0;
  for (const auto& p : parent.intervals.intervals()) {
    int kids = 0;
    Scalar total = 0;
    while (idx < f.intervals.size() && f.intervals.intervals()[idx].hi <= p.hi) {
      CHECK(f.intervals.intervals()[idx].lo >= p.lo);
      total += f.intervals.intervals()[idx].length();
      ++kids;
      ++idx;
    }
    CHECK(kids == 8);
    CHECK(total < p.length());
  }
}

TEST_CASE("strict schedule: collapsed phases alternate 3- and 2-blocks") {
  StrictParams p{Scalar(2), Scalar(2), Scalar(2), Scalar(3), Scalar(3), Scalar(3), 4, 4, 5};
  auto st = example_strict_schedule(p);
  for (std::size_t j = 1; j <= 5; ++j) CHECK(st.t[j] == st.s[j]);
  std::vector<Scalar> runs;
  for (const auto& seg : st.schedule.segments())
    if (runs.empty() || runs.back() != seg.exponent) runs.push_back(seg.exponent);
  CHECK(runs.size() >= 5);
  for (std::size_t i = 0; i < runs.size(); ++i) CHECK(runs[i] == (i % 2 == 0 ? 2 : 3));
}

TEST_CASE("strict schedule agrees with a per-step reading of the table") {
  StrictParams p{Scalar(1), q("1.25"), q("1.5"), Scalar(2), q("2.5"), Scalar(3), 4, 4, 8};
  auto st = example_strict_schedule(p);
  // t values: t_even = 3 s, t_odd = 2 s for these exponents
  for (std::size_t j = 1; j <= 8; ++j) CHECK(st.t[j] == (j % 2 == 0 ? 3 : 2) * st.s[j]);
  auto e = st.schedule.exponents(st.schedule.length());
  CHECK(st.schedule.length() == st.t[8] + 4);
  auto phase_of = [&](std::uint64_t k) -> Scalar {
    for (std::size_t m = 1; m <= 8; ++m) {
      std::uint64_t j = m % 2 ? (m - 1) / 2 : m / 2;
      std::uint64_t start = m == 1 ? 1 : (m % 2 ? st.t[m - 1] + j + 1 : st.t[m - 1] + j);
      if (k < start) continue;
      if (k <= st.s[m]) return m % 2 ? p.u : p.v;
      if (k <= st.t[m]) return m % 2 ? p.beta : p.alpha;
      if (k <= st.t[m] + j) return m % 2 ? p.b : p.a;
    }
    return Scalar(-1);
  };
  for (std::uint64_t k = 1; k <= e.size(); k += 97) CHECK(e[k - 1] == phase_of(k));
  CHECK(e.back() == p.a);

  StrictParams bad = p;
  bad.u = q("2.2");
  CHECK_THROWS_AS(example_strict_schedule(bad), DomainError);
  StrictParams eq = p;
  eq.alpha = eq.u;
  auto st2 = example_strict_schedule(eq);
  CHECK(st2.t[2] == st2.s[2]);
}

TEST_CASE("decreasing-gap sequences") {
  auto a = decreasing_gap_points(rule_inverse, 4);
  CHECK(std::vector<Scalar>(a.points().begin(), a.points().end()) ==
        std::vector<Scalar>{q("1/4"), q("1/3"), q("1/2"), Scalar(1)});
  auto b = decreasing_gap_points(rule_exp_neg_sqrt, 10);
  CHECK(b.size() == 10);
  CHECK(abs(b.points().back() - exp(Scalar(-1))) < 1e-18);
  auto c = decreasing_gap_points(rule_arithmetic(8), 8);
  CHECK(c.size() == 8);
  CHECK(c.points().front() == 0);
  auto bad = [](std::uint64_t k) { return k == 1 ? Scalar(1) : k == 2 ? q("0.9") : q("0.5"); };
  CHECK_THROWS_WITH_AS(decreasing_gap_points(bad, 3), "gaps not decreasing at k = 1", DomainError);
  auto flat = [](std::uint64_t) { return Scalar(1); };
  CHECK_THROWS_AS(decreasing_gap_points(flat, 3), DomainError);
  auto deep = decreasing_gap_points(rule_exp_neg_sqrt, 1000);
  CHECK(abs(log2_of(deep.points().front()) + std::sqrt(1000.0) / std::log(2.0)) < 1e-9);
}

TEST_CASE("projection example") {
  auto p1 = projection_example(1);
  auto e1 = p1.level(1);
  REQUIRE(e1.size() == 2);
  CHECK(e1.points()[0] == Point2{q("1/2"), q("1/4")});
  CHECK(e1.points()[1] == Point2{q("3/4"), q("3/4")});
  CHECK(projection_example(2).set().size() == 6);

  auto p = projection_example(8);
  std::set<Scalar> ys, xs;
  std::size_t total = 0;
  for (int j = 1; j <= 8; ++j) {
    auto lvl = p.level(j);
    CHECK(lvl.size() == std::size_t{1} << j);
    for (std::size_t i = 0; i < lvl.size(); ++i) {
      const auto& pt = lvl.points()[i];
      CHECK(pt.x >= pow2i(-j));
      CHECK(pt.x < pow2i(-j + 1));
      if (i > 0) CHECK(pt.x - lvl.points()[i - 1].x == pow2i(-2 * j));
      ys.insert(pt.y);
      xs.insert(pt.x);
    }
    total += lvl.size();
  }
  CHECK(ys.size() == total);
  CHECK(xs.size() == total);
  CHECK(p.x_projection().size() == total);
  // y-values at level j are the gap endpoints of the step-j Cantor construction
  auto cj = cantor_step(RatioSchedule::constant(Scalar(2)), 3);
  auto lvl3 = p.level(3);
  std::vector<Scalar> y3;
  for (const auto& pt : lvl3.points()) y3.push_back(pt.y);
  auto c2 = cantor_step(RatioSchedule::constant(Scalar(2)), 2);
  std::vector<Scalar> expect;
  for (const auto& iv : c2.intervals().intervals()) {
    expect.push_back(iv.lo + pow2i(-6));
    expect.push_back(iv.lo + 3 * pow2i(-6));
  }
  CHECK(y3 == expect);
  for (std::size_t i = 0; i < cj.intervals().size(); i += 2)
    CHECK(cj.intervals().intervals()[i].hi == expect[i]);
  CHECK_THROWS_AS(projection_example(0), DomainError);
}

TEST_CASE("product sets") {
  PointSet1D two({Scalar(0), Scalar(1)});
  CHECK(product_set(two, two).corners.size() == 4);
  auto c2 = cantor_step(RatioSchedule::constant(Scalar(2)), 2);
  auto axis = product_set(c2.intervals(), to_interval_set(PointSet1D({Scalar(0)})));
  CHECK(axis.cells.size() == 4);
  for (const auto& cell : axis.cells) CHECK(cell.second.length() == 0);
  auto c3 = cantor_step(RatioSchedule::constant(Scalar(2)), 3);
  CHECK(product_set(c3.intervals(), c3.intervals()).cells.size() == 64);
}

TEST_CASE("line export round-trips at full precision") {
  auto s = RatioSchedule::constant(Scalar(1) / 3 + 2);
  auto c = cantor_step(s, 4);
  std::ostringstream os;
  write_set(os, c.intervals());
  std::istringstream is(os.str());
  std::string lo, hi;
  for (const auto& iv : c.intervals().intervals()) {
    REQUIRE(static_cast<bool>(is >> lo >> hi));
    CHECK(parse_scalar(lo) == iv.lo);
    CHECK(parse_scalar(hi) == iv.hi);
  }
  std::ostringstream pts;
  write_set(pts, projection_example(1).set());
  CHECK(pts.str().find(' ') != std::string::npos);
}
