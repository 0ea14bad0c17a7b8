// qadim: generate sets, evaluate formulas, run estimator sweeps and verification suites.

#include "qadim/config.hpp"
#include "qadim/verify.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace qadim;

namespace {

constexpr int kOk = 0, kConfigError = 1, kCheckFailed = 2;

struct Flags {
  std::string config_path;
  std::string out = ".";
  unsigned threads = 0;
  std::string replay;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> suites;
  std::optional<int> jmax;
  std::optional<std::size_t> samples;
};

struct Run {
  std::string task;
  Json config = Json::object();
  std::string hash;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  int bits = 256;
  fs::path out;
};

void check_task_keys(const std::string& task, const Json& c) {
  if (task == "generate") check_keys(c, "", {"task", "seed", "threads", "precision_bits", "set"});
  if (task == "exact")
    check_keys(c, "", {"task", "seed", "threads", "precision_bits", "schedule", "N", "reference_n", "tail_fraction",
                       "tol", "slack", "deltas"});
  if (task == "estimate")
    check_keys(c, "", {"task", "seed", "threads", "precision_bits", "set", "sweep", "delta", "delta_grid", "slack"});
  if (task == "spectrum")
    check_keys(c, "", {"task", "seed", "threads", "precision_bits", "set", "sweep", "theta_grid", "delta"});
  if (task == "tangent") check_keys(c, "", {"task", "seed", "threads", "precision_bits", "set", "tangent", "bounds"});
  if (task == "verify") check_keys(c, "", {"task", "seed", "threads", "precision_bits", "suites", "tolerances"});
  if (task == "project-check") check_keys(c, "", {"task", "seed", "threads", "precision_bits", "jmax", "samples"});
}

Run load(const std::string& task, const Flags& f) {
  Run r;
  r.task = task;
  if (!f.config_path.empty()) {
    std::ifstream in(f.config_path);
    if (!in) throw ConfigError("", "cannot read " + f.config_path);
    try {
      r.config = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    if (!r.config.is_object()) throw ConfigError("", "expected a JSON object");
  }
  check_task_keys(task, r.config);
  if (r.config.contains("task") && string_at(r.config["task"], "task") != task)
    throw ConfigError("task", "config is for task '" + r.config["task"].get<std::string>() + "'");
  r.seed = f.seed ? *f.seed : r.config.contains("seed") ? count_at(r.config["seed"], "seed") : 0;
  r.threads = f.threads;
  if (r.threads == 0 && r.config.contains("threads")) r.threads = static_cast<unsigned>(count_at(r.config["threads"], "threads"));
  if (r.threads == 0) r.threads = std::max(1u, std::thread::hardware_concurrency());
  r.bits = default_precision_bits();
  if (r.config.contains("precision_bits")) {
    if (!r.config["precision_bits"].is_number_integer()) throw ConfigError("precision_bits", "expected an integer");
    r.bits = r.config["precision_bits"].get<int>();
    try {
      check_precision_bits(r.bits);
    } catch (const DomainError& e) {
      throw ConfigError("precision_bits", e.what());
    }
  }
  Json hashed = r.config;
  hashed.erase("threads");  // thread count never changes output bytes
  r.hash = hash_hex(config_hash(hashed));
  r.out = f.out;
  std::error_code ec;
  fs::create_directories(r.out, ec);
  if (ec) throw ConfigError("--out", "cannot create " + f.out + ": " + ec.message());
  return r;
}

std::string header(const Run& r, const std::string& set_name) {
  return "# qadim " + r.task + " set=" + set_name + " config=" + r.hash + " seed=" + std::to_string(r.seed) + "\n";
}

Json stamp(const Run& r) { return {{"task", r.task}, {"config_hash", r.hash}, {"seed", r.seed}}; }

void write_file(const Run& r, const std::string& name, const std::string& content) {
  std::ofstream os(r.out / name, std::ios::binary);
  if (!os) throw ConfigError("--out", "cannot write " + (r.out / name).string());
  os << content;
}

void write_json(const Run& r, const std::string& name, const Json& j) { write_file(r, name, j.dump(2) + "\n"); }

std::string plot(const Run& r, const std::string& set_name, const std::string& columns,
                 const std::vector<std::pair<double, double>>& curve) {
  std::ostringstream os;
  os << header(r, set_name) << "# " << columns << "\n";
  DimensionReport rep;
  rep.curve = curve;
  write_curve(os, rep);
  return os.str();
}

double option(const Json& cfg, const char* key, double fallback) {
  return cfg.contains(key) ? number_at(cfg[key], key) : fallback;
}

std::vector<double> grid_option(const Json& cfg, const char* key, std::vector<double> fallback) {
  return cfg.contains(key) ? parse_doubles(cfg[key], key) : fallback;
}

BuiltSet set_of(const Run& r) { return build_set(require(r.config, "set", ""), "set", r.bits); }

SweepConfig sweep_of(const Run& r) {
  SweepConfig c = parse_sweep(r.config.contains("sweep") ? r.config["sweep"] : Json(), "sweep");
  c.threads = r.threads;
  c.centers.seed = r.seed;
  return c;
}

int replay(const Run& r, const std::string& file) {
  if (r.task != "estimate" && r.task != "spectrum")
    throw ConfigError("--replay", "only estimate and spectrum records can be replayed");
  auto set = set_of(r);
  Target T = set.target();
  std::ifstream in(file);
  if (!in) throw ConfigError("--replay", "cannot read " + file);
  auto res = replay_records(T, in);
  std::cout << "replayed " << res.lines << " records, " << res.mismatches.size() << " mismatches\n";
  for (const auto& m : res.mismatches) std::cout << "  " << m << "\n";
  return res.mismatches.empty() && res.lines > 0 ? kOk : kCheckFailed;
}

int cmd_generate(const Run& r) {
  auto set = set_of(r);
  std::ostringstream os;
  os << header(r, set.family);
  write_shape(os, set.shape);
  write_file(r, "set.txt", os.str());
  Target T = set.target();
  Json j = stamp(r);
  j["family"] = set.family;
  j["ambient_dim"] = T.ambient_dim();
  j["diameter"] = to_decimal(T.diameter());
  j["resolution"] = to_decimal(T.resolution());
  j["truncation"] = to_decimal(set.truncation);
  j["precision_bits"] = set.precision_bits;
  j["native_radii"] = T.native_radii().size();
  j["elements"] = std::visit(
      [](const auto& s) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, CantorApprox>)
          return s.intervals().size();
        else
          return s.size();
      },
      set.shape);
  write_json(r, "generate.json", j);
  std::cout << set.family << ": " << j["elements"] << " elements, diameter " << j["diameter"].get<std::string>()
            << "\n";
  return kOk;
}

int cmd_exact(const Run& r) {
  const Json& cfg = r.config;
  ScheduleSpec spec = [&] {
    if (cfg.contains("schedule")) return parse_schedule(cfg["schedule"], "schedule");
    throw ConfigError("schedule", "missing field");
  }();
  const RatioSchedule& s = spec.schedule;
  std::size_t N = cfg.contains("N") ? count_at(cfg["N"], "N")
                  : s.length() == kUnbounded ? 4096
                                             : static_cast<std::size_t>(s.length());
  if (s.length() != kUnbounded && N > s.length()) throw ConfigError("N", "exceeds the schedule length");
  std::size_t ref = cfg.contains("reference_n") ? count_at(cfg["reference_n"], "reference_n") : N / 2;
  FormulaOptions fo{option(cfg, "tail_fraction", 0.5)};
  double tol = option(cfg, "tol", 0.02), slack = option(cfg, "slack", 0.05);
  std::vector<Scalar> deltas;
  if (cfg.contains("deltas")) {
    const Json& d = cfg["deltas"];
    if (!d.is_array() || d.empty()) throw ConfigError("deltas", "expected a nonempty array");
    for (std::size_t i = 0; i < d.size(); ++i) deltas.push_back(scalar_at(d[i], "deltas[" + std::to_string(i) + "]"));
  } else {
    for (const char* d : {"0.4", "0.2", "0.1", "0.05"}) deltas.push_back(parse_scalar(d));
  }

  auto T = LogLengthTable::from_schedule(s, N);
  auto b = formula_bundle(T, deltas, ref, tol, fo);
  Json j = stamp(r);
  j["N"] = b.N;
  j["reference_n"] = b.reference_n;
  j["assouad"] = to_json(b.assouad);
  j["upper_box"] = to_json(b.upper_box);
  j["lower_box"] = to_json(b.lower_box);
  j["lower_assouad"] = to_json(b.lower_assouad);
  j["quasi_assouad"] = Json::array();
  j["quasi_lower"] = Json::array();
  for (const auto& q : b.quasi_assouad) j["quasi_assouad"].push_back(to_json(q));
  for (const auto& q : b.quasi_lower) j["quasi_lower"].push_back(to_json(q));
  auto ord = ordering_check(b.lower_assouad.value, b.quasi_lower.back().value, b.lower_box.value, b.upper_box.value,
                            b.quasi_assouad.back().value, b.assouad.value, Scalar(slack));
  j["ordering"] = {{"pass", ord.pass}, {"violation", ord.violation}, {"slack", slack}};
  if (spec.strict) {
    Json res = Json::array();
    for (double x : spec.strict->t_residue) res.push_back(x);
    j["strict_t_residue"] = res;
  }
  write_json(r, "exact.json", j);

  std::vector<std::pair<double, double>> curve;
  if (deltas.size() >= 3) {
    auto qc = qa_curve(T, deltas, tol, fo);
    for (const auto& [d, fr] : qc.points) curve.emplace_back(d.convert_to<double>(), fr.value.convert_to<double>());
  }
  write_file(r, "qa_curve.txt", plot(r, "schedule", "delta quasi_assouad", curve));
  std::cout << "assouad " << j["assouad"]["value"] << " upper_box " << j["upper_box"]["value"] << " lower_box "
            << j["lower_box"]["value"] << " lower_assouad " << j["lower_assouad"]["value"] << " quasi_assouad "
            << j["quasi_assouad"].back()["value"] << " quasi_lower " << j["quasi_lower"].back()["value"] << "\n";
  std::cout << "ordering " << (ord.pass ? "pass" : "fail: " + ord.violation) << "\n";
  return ord.pass ? kOk : kCheckFailed;
}

std::string records_csv(const Run& r, const std::string& set_name, const Sweeper& sw) {
  std::ostringstream os;
  os << header(r, set_name);
  write_records_csv(os, sw.records());
  return os.str();
}

int cmd_estimate(const Run& r) {
  const Json& cfg = r.config;
  auto set = set_of(r);
  Target T = set.target();
  SweepConfig sc = sweep_of(r);
  double delta = option(cfg, "delta", 0.1), slack = option(cfg, "slack", 0.05);
  auto grid = grid_option(cfg, "delta_grid", {0.4, 0.2, 0.1, 0.05});
  Sweeper sw(T, sc);
  sw.add_grid_pairs();
  sw.add_quasi_pairs(delta);
  for (double d : grid) sw.add_quasi_pairs(d);
  sw.add_extra_pairs();
  sw.evaluate();

  int dim = T.ambient_dim();
  auto box = sw.box();
  auto A = sw.h_upper(0), L = sw.h_lower(0), qA = sw.h_upper(delta), qL = sw.h_lower(delta);
  std::vector<std::pair<double, double>> qa_curve, ql_curve;
  for (double d : grid) {
    qa_curve.emplace_back(d, sw.h_upper(d).estimate);
    ql_curve.emplace_back(d, sw.h_lower(d).estimate);
  }
  auto ord = ordering_check(Scalar(L.estimate), Scalar(qL.estimate), Scalar(box.lower.estimate),
                            Scalar(box.upper.estimate), Scalar(qA.estimate), Scalar(A.estimate), Scalar(slack));
  Json j = stamp(r);
  j["set"] = set.family;
  j["delta"] = delta;
  j["lower_box"] = to_json(box.lower, dim);
  j["upper_box"] = to_json(box.upper, dim);
  j["assouad"] = to_json(A, dim);
  j["lower_assouad"] = to_json(L, dim);
  j["quasi_assouad"] = to_json(qA, dim);
  j["quasi_lower"] = to_json(qL, dim);
  Json counts = Json::array();
  for (const auto& [rr, n] : box.counts) counts.push_back({to_decimal(rr), n});
  j["box_counts"] = counts;
  j["qa_curve"] = qa_curve;
  j["ql_curve"] = ql_curve;
  j["ordering"] = {{"pass", ord.pass}, {"violation", ord.violation}, {"slack", slack}};
  j["records"] = sw.records().size();
  write_json(r, "estimate.json", j);
  write_file(r, "records.csv", records_csv(r, set.family, sw));
  write_file(r, "qa_curve.txt", plot(r, set.family, "delta quasi_assouad", qa_curve));
  write_file(r, "ql_curve.txt", plot(r, set.family, "delta quasi_lower", ql_curve));
  std::cout << "lower_assouad " << L.estimate << " quasi_lower " << qL.estimate << " lower_box "
            << box.lower.estimate << " upper_box " << box.upper.estimate << " quasi_assouad " << qA.estimate
            << " assouad " << A.estimate << "\n";
  std::cout << "ordering " << (ord.pass ? "pass" : "fail: " + ord.violation) << "\n";
  return ord.pass ? kOk : kCheckFailed;
}

int cmd_spectrum(const Run& r) {
  const Json& cfg = r.config;
  auto set = set_of(r);
  Target T = set.target();
  auto thetas = grid_option(cfg, "theta_grid", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  std::optional<double> delta;
  if (cfg.contains("delta")) delta = number_at(cfg["delta"], "delta");
  Sweeper sw(T, sweep_of(r));
  for (double t : thetas) sw.add_spectrum_pairs(t);
  if (delta) sw.add_quasi_pairs(*delta);
  sw.evaluate();

  int dim = T.ambient_dim();
  Json j = stamp(r);
  j["set"] = set.family;
  j["per_theta"] = Json::array();
  std::vector<std::pair<double, double>> curve;
  std::optional<double> sup;
  for (double t : thetas) {
    try {
      auto rep = sw.spectrum(t);
      j["per_theta"].push_back({{"theta", t}, {"report", to_json(rep, dim)}});
      curve.emplace_back(t, rep.estimate);
      sup = std::max(sup.value_or(0.0), rep.estimate);
    } catch (const DomainError& e) {
      j["per_theta"].push_back({{"theta", t}, {"report", nullptr}, {"skipped", e.what()}});
      std::cerr << "warning: theta " << t << " skipped: " << e.what() << "\n";
    }
  }
  j["sup"] = sup ? Json(*sup) : Json(nullptr);
  if (delta) {
    auto qa = sw.h_upper(*delta);
    j["quasi_assouad"] = to_json(qa, dim);
    std::cout << "quasi_assouad(" << *delta << ") " << qa.estimate << "\n";
  }
  write_json(r, "spectrum.json", j);
  write_file(r, "records.csv", records_csv(r, set.family, sw));
  write_file(r, "spectrum.txt", plot(r, set.family, "theta spectrum", curve));
  for (const auto& [t, v] : curve) std::cout << "theta " << t << " spectrum " << v << "\n";
  return kOk;
}

int cmd_tangent(const Run& r) {
  auto set = set_of(r);
  Set1D s = set.as_set1d("set");
  const Json& tj = require(r.config, "tangent", "");
  TangentSequence seq = parse_tangent_sequence(tj, "tangent");
  auto cand = build_set(require(tj, "candidate", "tangent"), "tangent.candidate", r.bits);
  Set1D candidate = cand.as_set1d("tangent.candidate");
  TangentOptions opt;
  opt.set_truncation = set.truncation;
  opt.candidate_truncation = cand.truncation;
  opt.eps_fast = option(tj, "eps_fast", opt.eps_fast);
  opt.converged_tol = option(tj, "converged_tol", opt.converged_tol);
  opt.classify_tol = option(tj, "classify_tol", opt.classify_tol);

  Json j = stamp(r);
  int status = kOk;
  try {
    if (r.config.contains("bounds")) {
      const Json& bj = r.config["bounds"];
      check_keys(bj, "bounds", {"set_sweep", "candidate_sweep", "delta", "slack"});
      TangentBoundConfig bc;
      bc.set_native_radii = set.native;
      bc.set_sweep = parse_sweep(bj.contains("set_sweep") ? bj["set_sweep"] : Json(), "bounds.set_sweep");
      bc.candidate_sweep =
          parse_sweep(bj.contains("candidate_sweep") ? bj["candidate_sweep"] : Json(), "bounds.candidate_sweep");
      for (auto* sc : {&bc.set_sweep, &bc.candidate_sweep}) {
        sc->threads = r.threads;
        sc->centers.seed = r.seed;
      }
      bc.delta = option(bj, "delta", bc.delta);
      bc.slack = option(bj, "slack", bc.slack);
      bc.tangent = opt;
      auto rep = tangent_bound_check(s, seq, candidate, bc);
      j["verdict"] = to_json(rep.verdict);
      j["bounds"] = to_json(rep);
      j["bounds"].erase("verdict");
      std::cout << "lower_box_vs_qa " << to_string(rep.lower_box_vs_qa) << " ql_vs_upper_box "
                << to_string(rep.ql_vs_upper_box) << "\n";
      if (!rep.pass) status = kCheckFailed;
    } else {
      j["verdict"] = to_json(tangent_converge(s, seq, candidate, opt));
    }
  } catch (const DomainError& e) {
    throw ConfigError("tangent", e.what());
  }
  j["mode"] = to_string(seq.mode);
  write_json(r, "tangent.json", j);
  const Json& v = j["verdict"];
  std::cout << "classification " << v["classification"]["kind"].get<std::string>() << " epsilon " << v["epsilon"]
            << " fast " << v["fast"] << " converged " << v["converged"] << "\n";
  return status;
}

int cmd_verify(const Run& r, const Flags& f) {
  std::vector<std::string> suites = f.suites;
  if (suites.empty() && r.config.contains("suites")) {
    const Json& sj = r.config["suites"];
    if (!sj.is_array()) throw ConfigError("suites", "expected an array");
    for (std::size_t i = 0; i < sj.size(); ++i) suites.push_back(string_at(sj[i], "suites[" + std::to_string(i) + "]"));
  }
  if (suites.empty()) suites = verify_suite_names();
  const auto& known = verify_suite_names();
  for (std::size_t i = 0; i < suites.size(); ++i)
    if (std::find(known.begin(), known.end(), suites[i]) == known.end())
      throw ConfigError("suites[" + std::to_string(i) + "]", "unknown suite '" + suites[i] + "'");

  VerifyOptions vo{r.threads, r.seed, {}};
  if (r.config.contains("tolerances")) {
    const Json& tj = r.config["tolerances"];
    if (!tj.is_object()) throw ConfigError("tolerances", "expected an object");
    for (const auto& [k, v] : tj.items()) {
      if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("tolerances." + k, "unknown suite");
      double t = number_at(v, "tolerances." + k);
      if (t < 0) throw ConfigError("tolerances." + k, "must be nonnegative");
      vo.tolerances[k] = t;
    }
  }
  Json j = stamp(r);
  j["checks"] = Json::array();
  bool all = true;
  for (const auto& name : suites) {
    auto res = run_check(name, vo);
    all = all && res.pass;
    j["checks"].push_back(to_json(res));
    std::cout << (res.pass ? "PASS " : "FAIL ") << name << "\n";
    for (const auto& msg : res.failures) std::cout << "  " << msg << "\n";
  }
  j["pass"] = all;
  write_json(r, "verify.json", j);
  return all ? kOk : kCheckFailed;
}

int cmd_project(const Run& r, const Flags& f) {
  int jmax = f.jmax ? *f.jmax : r.config.contains("jmax") ? static_cast<int>(count_at(r.config["jmax"], "jmax")) : 10;
  std::size_t samples =
      f.samples ? *f.samples : r.config.contains("samples") ? count_at(r.config["samples"], "samples") : 64;
  ProjectionBoundReport rep;
  try {
    rep = projection_bound_check(jmax, samples, r.seed);
  } catch (const DomainError& e) {
    throw ConfigError("jmax", e.what());
  }
  Json j = stamp(r);
  j["jmax"] = jmax;
  j["samples"] = samples;
  j["report"] = to_json(rep);
  write_json(r, "project.json", j);
  std::cout << (rep.pass ? "pass" : "fail") << ": " << rep.checked << " cases, " << rep.violations.size()
            << " violations, tightest " << rep.tightest.count << " / " << rep.tightest.bound << "\n";
  return rep.pass ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qadim: quasi-Assouad dimension toolkit"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<const char*, const char*>> tasks{
      {"generate", "Generate a set and export it"},
      {"exact", "Evaluate the closed-form Cantor schedule formulas"},
      {"estimate", "Scale-sweep estimates of the six dimensions"},
      {"spectrum", "Assouad spectrum sweep"},
      {"tangent", "Tangent convergence, classification and bounds"},
      {"verify", "Run named verification suites"},
      {"project-check", "Counting-bound check for the projection example"}};
  for (const auto& [name, desc] : tasks) {
    auto* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", f.config_path, "JSON run configuration");
    sub->add_option("--out", f.out, "Output directory");
    sub->add_option("--threads", f.threads, "Worker threads (default: machine parallelism)");
    sub->add_option("--replay", f.replay, "Records CSV to re-evaluate against the configured set");
    sub->add_option("--seed", f.seed, "Seed for centre sampling");
    if (std::string(name) == "verify") sub->add_option("--suite", f.suites, "Suite name (repeatable)");
    if (std::string(name) == "project-check") {
      sub->add_option("--jmax", f.jmax, "Largest construction level");
      sub->add_option("--samples", f.samples, "Sampled centres");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  const std::string task = app.get_subcommands().front()->get_name();
  try {
    Run r = load(task, f);
    if (!f.replay.empty()) return replay(r, f.replay);
    if (task == "generate") return cmd_generate(r);
    if (task == "exact") return cmd_exact(r);
    if (task == "estimate") return cmd_estimate(r);
    if (task == "spectrum") return cmd_spectrum(r);
    if (task == "tangent") return cmd_tangent(r);
    if (task == "verify") return cmd_verify(r, f);
    return cmd_project(r, f);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
