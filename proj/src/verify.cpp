#include "qadim/verify.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <sstream>

namespace qadim {

void CheckResult::expect(bool ok, const std::string& what) {
  if (!ok) {
    pass = false;
    failures.push_back(what);
  }
}

double CheckResult::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  throw DomainError("check " + name + " has no value '" + key + "'");
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// |v - target| <= tol, recorded under key
void near(CheckResult& c, const std::string& key, double v, double target, double tol) {
  c.record(key, v);
  c.expect(std::abs(v - target) <= tol, key + " = " + fmt(v) + ", expected " + fmt(target) + " +- " + fmt(tol));
}

void at_most(CheckResult& c, const std::string& key, double v, double bound) {
  c.record(key, v);
  c.expect(v <= bound, key + " = " + fmt(v) + " exceeds " + fmt(bound));
}

void at_least(CheckResult& c, const std::string& key, double v, double bound) {
  c.record(key, v);
  c.expect(v >= bound, key + " = " + fmt(v) + " below " + fmt(bound));
}

double dbl(const Scalar& x) { return x.convert_to<double>(); }

double tol_of(const VerifyOptions& opt, const std::string& name, double fallback) {
  auto it = opt.tolerances.find(name);
  return it == opt.tolerances.end() ? fallback : it->second;
}

SweepConfig base_config(const VerifyOptions& opt) {
  SweepConfig c;
  c.threads = opt.threads;
  c.centers.seed = opt.seed;
  return c;
}

CheckResult check_ordering(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "ordering";
  const double tol = tol_of(opt, c.name, 0.03);
  auto cantor = cantor_step(RatioSchedule::constant(Scalar(2)), 14);
  Target T(cantor.intervals(), native_radii(cantor));
  SweepConfig cfg = base_config(opt);
  cfg.centers.cap = 256;
  Sweeper sw(T, cfg);
  sw.add_grid_pairs();
  sw.add_quasi_pairs(0.1);
  sw.evaluate();
  auto box = sw.box();
  double L = sw.h_lower(0).estimate, qL = sw.h_lower(0.1).estimate;
  double qA = sw.h_upper(0.1).estimate, A = sw.h_upper(0).estimate;
  near(c, "lower_assouad", L, 0.5, tol);
  near(c, "quasi_lower", qL, 0.5, tol);
  near(c, "lower_box", box.lower.estimate, 0.5, tol);
  near(c, "upper_box", box.upper.estimate, 0.5, tol);
  near(c, "quasi_assouad", qA, 0.5, tol);
  near(c, "assouad", A, 0.5, tol);
  auto ord = ordering_check(Scalar(L), Scalar(qL), Scalar(box.lower.estimate), Scalar(box.upper.estimate), Scalar(qA),
                            Scalar(A), Scalar(tol));
  c.expect(ord.pass, "estimated chain: " + ord.violation);

  auto t = LogLengthTable::from_schedule(RatioSchedule::constant(Scalar(2)), 4096);
  auto g = default_n_grid(t.size());
  Scalar d = parse_scalar("0.1");
  Scalar half = Scalar(1) / 2;
  Scalar err = 0;
  for (const auto& r : {upper_box_formula(t), lower_box_formula(t), assouad_formula(t, g), lower_assouad_formula(t, g),
                        quasi_assouad_formula(t, d, g), quasi_lower_formula(t, d, g)})
    err = std::max(err, Scalar(abs(r.value - half)));
  at_most(c, "exact_max_error", dbl(err), 1e-12);
  return c;
}

struct SixValues {
  double A, qA, ubox, lbox, qL, L;
};

SixValues strict_values(std::size_t blocks, std::vector<double>* curve = nullptr) {
  StrictParams p{Scalar(1), parse_scalar("1.25"), parse_scalar("1.5"), Scalar(2), parse_scalar("2.5"), Scalar(3)};
  p.blocks = blocks;
  auto s = example_strict_schedule(p);
  auto t = LogLengthTable::from_schedule(s.schedule, s.schedule.length());
  auto g = default_n_grid(t.size());
  FormulaOptions tail{1.0 / 16};
  Scalar d = parse_scalar("0.05");
  if (curve) {
    auto qc = qa_curve(t, {parse_scalar("0.4"), parse_scalar("0.2"), parse_scalar("0.1"), d}, 0.02, tail);
    for (const auto& pt : qc.points) curve->push_back(dbl(pt.second.value));
  }
  return {dbl(assouad_formula(t, g, tail).value),      dbl(quasi_assouad_formula(t, d, g, tail).value),
          dbl(upper_box_formula(t, tail).value),       dbl(lower_box_formula(t, tail).value),
          dbl(quasi_lower_formula(t, d, g, tail).value), dbl(lower_assouad_formula(t, g, tail).value)};
}

CheckResult check_strict(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "strict-example";
  const double tol = tol_of(opt, c.name, 0.05);
  std::vector<double> curve;
  auto v8 = strict_values(8, &curve);
  auto v10 = strict_values(10);
  near(c, "assouad", v8.A, 1.0, tol);
  near(c, "quasi_assouad", v8.qA, 0.8, tol);
  near(c, "upper_box", v8.ubox, 2.0 / 3, tol);
  near(c, "lower_box", v8.lbox, 0.5, tol);
  near(c, "quasi_lower", v8.qL, 0.4, tol);
  near(c, "lower_assouad", v8.L, 1.0 / 3, tol);
  auto ord = ordering_check(Scalar(v8.L), Scalar(v8.qL), Scalar(v8.lbox), Scalar(v8.ubox), Scalar(v8.qA), Scalar(v8.A),
                            parse_scalar("0.05"));
  c.expect(ord.pass, "chain: " + ord.violation);
  const double a8[] = {v8.A, v8.qA, v8.ubox, v8.lbox, v8.qL, v8.L};
  const double a10[] = {v10.A, v10.qA, v10.ubox, v10.lbox, v10.qL, v10.L};
  double drift = 0;
  for (int i = 0; i < 6; ++i) drift = std::max(drift, std::abs(a8[i] - a10[i]));
  at_most(c, "block_drift", drift, 0.02);
  bool monotone = true;
  for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] >= curve[i - 1];
  c.expect(monotone, "qA curve not monotone in delta");
  return c;
}

CheckResult check_moran(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "moran-equality";
  const double tol = tol_of(opt, c.name, 0.1);
  const std::pair<const char*, Scalar> cases[] = {{"0.301", parse_scalar("0.301")},
                                                  {"1/pi", 1 / boost::math::constants::pi<Scalar>()},
                                                  {"0.25", parse_scalar("0.25")}};
  const std::size_t depth = 12;
  for (const auto& [label, lam] : cases) {
    auto ifs = SimilarityIFS1D::uniform(Scalar(1) / 3, {Scalar(0), lam, Scalar(2) / 3});
    Target T(ifs_attractor(ifs, depth), native_radii(ifs, depth));
    SweepConfig cfg = base_config(opt);
    cfg.centers.cap = 1024;
    cfg.lambda_min = 3;
    cfg.s_multipliers = {1, 2, 4, 8, 16};
    Sweeper sw(T, cfg);
    sw.add_quasi_pairs(0.05);
    sw.add_spectrum_pairs(0.8);
    sw.evaluate();
    std::string k = std::string("lambda=") + label + ".";
    double ub = sw.box().upper.estimate;
    c.record(k + "upper_box", ub);
    near(c, k + "quasi_assouad", sw.h_upper(0.05).estimate, ub, tol);
    near(c, k + "spectrum_0.8", sw.spectrum(0.8).estimate, ub, tol);
  }
  return c;
}

CheckResult check_falpha(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "falpha";
  double A[2];
  for (int i = 0; i < 2; ++i) {
    std::size_t depth = 5 + i;
    auto f = f_alpha_step(Scalar(1) / 2, depth);
    Target T(f.intervals, native_radii(f));
    SweepConfig cfg = base_config(opt);
    cfg.centers.cap = 4096;
    cfg.lambda_min = 7;
    Sweeper sw(T, cfg);
    sw.add_grid_pairs();
    sw.add_quasi_pairs(0.2);
    sw.evaluate();
    std::string k = "depth" + std::to_string(depth) + ".";
    A[i] = sw.h_upper(0).estimate;
    c.record(k + "assouad", A[i]);
    at_most(c, k + "quasi_assouad_0.2", sw.h_upper(0.2).estimate, 0.65);
  }
  c.expect(A[1] > A[0], "Assouad sweep does not increase with depth");
  c.expect(A[1] > 0.8, "depth-6 Assouad sweep " + fmt(A[1]) + " not above 0.8");
  return c;
}

CheckResult check_projection(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "projection";
  const int jmax = 12;
  auto ex = projection_example(jmax);
  {
    Target T(ex.x_projection());
    SweepConfig cfg = base_config(opt);
    for (int j = 1; j <= jmax; ++j) {
      cfg.extra_centers.push_back({pow2i(-j), Scalar(0)});
      cfg.extra_pairs.push_back({pow2i(-j), pow2i(-2 * j)});
    }
    auto r = estimate_qa(T, {0.4, 0.2, 0.1, 0.05}, cfg);
    at_least(c, "x_projection.quasi_assouad", r.estimate, 0.85);
    // the family x0 = R = 2^-j, r = 2^-2j by itself
    double family = 0;
    for (int j = 4; j <= jmax; ++j) {
      auto n = T.local({pow2i(-j), Scalar(0)}, pow2i(-j), pow2i(-2 * j));
      family = std::max(family, std::log2(static_cast<double>(n)) / j);
    }
    at_least(c, "x_projection.witness_family", family, 0.85);
  }
  {
    Target T(ex.set());
    SweepConfig cfg = base_config(opt);
    cfg.lambda_min = 12;
    cfg.centers.exhaustive = true;
    at_most(c, "set.quasi_assouad_0.5", estimate_qa(T, {0.5}, cfg).estimate, 0.62);
  }
  auto pb = projection_bound_check(10, 64, opt.seed);
  c.record("bound.checked", static_cast<double>(pb.checked));
  c.record("bound.tightest_ratio", pb.tightest.bound > 0 ? pb.tightest.count / pb.tightest.bound : 0);
  c.expect(pb.pass && pb.checked > 0, std::to_string(pb.violations.size()) + " counting-bound violations");
  return c;
}

CheckResult check_gaps(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "decreasing-gaps";
  {
    Target T(decreasing_gap_points(rule_exp_neg_sqrt, 1000000));
    SweepConfig cfg = base_config(opt);
    for (int k = 200; k <= 1000; k += 100) cfg.r_grid.push_back(pow2i(-k));
    for (int k = 250; k <= 600; k += 50) cfg.R_grid.push_back(pow2i(-k));
    Sweeper sw(T, cfg);
    sw.add_quasi_pairs(0.5);
    sw.evaluate();
    at_most(c, "exp_neg_sqrt.upper_box", sw.box().upper.estimate, 0.15);
    at_most(c, "exp_neg_sqrt.quasi_assouad_0.5", sw.h_upper(0.5).estimate, 0.15);
  }
  {
    Target T(decreasing_gap_points(rule_inverse, 100000));
    SweepConfig cfg = base_config(opt);
    cfg.lambda_min = 3;
    for (int k = 2; k <= 34; ++k) cfg.R_grid.push_back(pow2i(-k));
    auto sp = assouad_spectrum(T, {1.0 / 3, 0.8}, cfg);
    double a = sp.per_theta[0].estimate, b = sp.per_theta[1].estimate;
    c.record("inverse.spectrum_1/3", a);
    c.expect(a >= 0.65 && a <= 0.85, "spectrum at 1/3 = " + fmt(a) + ", expected in [0.65, 0.85]");
    at_least(c, "inverse.spectrum_0.8", b, 0.9);
  }
  return c;
}

// level-k basic intervals of F_alpha in address order
std::vector<Interval> falpha_level(const FAlphaApprox& f, std::size_t k) {
  std::vector<Interval> cur{{Scalar(0), f.level_lengths[0]}};
  for (std::size_t j = 1; j <= k; ++j) {
    std::vector<Interval> next;
    Scalar step = f.level_lengths[j] + f.level_gaps[j];
    for (const auto& I : cur)
      for (std::uint64_t i = 0; i < (std::uint64_t{1} << j); ++i) {
        Scalar lo = I.lo + Scalar(i) * step;
        next.push_back({lo, lo + f.level_lengths[j]});
      }
    cur = std::move(next);
  }
  return cur;
}

CheckResult check_tangents(const VerifyOptions& opt) {
  CheckResult c;
  c.name = "tangent-bounds";
  const double tol = 0.05;
  auto f = f_alpha_step(Scalar(1) / 2, 6);
  std::size_t finite = 0, interval = 0, other = 0;
  for (std::size_t level : {4, 5}) {
    auto parents = falpha_level(f, level);
    for (std::size_t i = 0; i < 50; ++i) {
      const auto& P = parents[i * parents.size() / 50];
      auto cls = classify_tangent_1d(Set1D(magnify(f.intervals, cylinder_map(P))), tol);
      if (cls.kind == TangentClass::finite_set)
        ++finite;
      else if (cls.kind == TangentClass::interval)
        ++interval;
      else
        ++other;
    }
  }
  c.record("images.finite_set", static_cast<double>(finite));
  c.record("images.interval", static_cast<double>(interval));
  c.record("images.other", static_cast<double>(other));
  c.expect(other == 0 && finite + interval == 100, std::to_string(other) + " images classified other");

  auto thirds = ifs_attractor(SimilarityIFS1D::uniform(Scalar(1) / 3, {Scalar(0), Scalar(2) / 3}), 10);
  bool none = !interval_tangent_witness(Set1D(thirds), 4).has_value();
  c.record("middle_thirds.witness", none ? 0 : 1);
  c.expect(none, "middle-thirds set has an interval witness at k = 4");
  auto w = interval_tangent_witness(Set1D(f.intervals), 8);
  c.record("falpha.witness", w ? 1 : 0);
  c.expect(w.has_value(), "no interval witness for F_1/2 at k = 8");

  auto cantor = cantor_step(RatioSchedule::constant(Scalar(2)), 14);
  const auto& s = cantor.intervals();
  TangentBoundConfig cfg;
  cfg.set_native_radii = native_radii(cantor);
  cfg.set_sweep = base_config(opt);
  cfg.set_sweep.centers.cap = 256;
  cfg.candidate_sweep = base_config(opt);
  for (int k = 2; k <= 12; ++k) cfg.candidate_sweep.r_grid.push_back(pow2i(-2 * k));
  cfg.tangent.set_truncation = truncation_bound(s);
  cfg.tangent.candidate_truncation = truncation_bound(s);
  cfg.slack = 0.05;
  TangentSequence seq;
  for (int k = 1; k <= 8; ++k) seq.maps.push_back(similarity_1d(pow2i(2 * k), Scalar(0)));
  auto rep = tangent_bound_check(Set1D(s), seq, Set1D(s), cfg);
  c.record("cantor.candidate_lower_box", rep.candidate_lbox);
  c.record("cantor.candidate_upper_box", rep.candidate_ubox);
  c.record("cantor.set_qa", rep.set_qa);
  c.record("cantor.set_ql", rep.set_ql);
  c.expect(rep.lower_box_vs_qa == BoundStatus::pass, "lower box of tangent <= qA: " + to_string(rep.lower_box_vs_qa));
  c.expect(rep.ql_vs_upper_box == BoundStatus::pass, "qL <= upper box of tangent: " + to_string(rep.ql_vs_upper_box));
  return c;
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names{"ordering",   "strict-example",  "moran-equality", "falpha",
                                              "projection", "decreasing-gaps", "tangent-bounds"};
  return names;
}

CheckResult run_check(const std::string& name, const VerifyOptions& opt) {
  if (name == "ordering") return check_ordering(opt);
  if (name == "strict-example") return check_strict(opt);
  if (name == "moran-equality") return check_moran(opt);
  if (name == "falpha") return check_falpha(opt);
  if (name == "projection") return check_projection(opt);
  if (name == "decreasing-gaps") return check_gaps(opt);
  if (name == "tangent-bounds") return check_tangents(opt);
  throw DomainError("unknown verify suite '" + name + "'");
}

Json to_json(const CheckResult& r) {
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  return {{"name", r.name}, {"pass", r.pass}, {"values", values}, {"failures", r.failures}};
}

}  // namespace qadim
