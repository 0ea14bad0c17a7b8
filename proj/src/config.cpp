#include "qadim/config.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>

namespace qadim {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error((path.empty() ? std::string("config") : path) + ": " + message), path_(std::move(path)) {}

namespace {

std::string at_index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }
std::string at_key(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Scalar atom(const std::string& text) {
  std::string t = trim(text);
  if (t == "pi") return boost::math::constants::pi<Scalar>();
  if (t.rfind("log2(", 0) == 0 && t.back() == ')') {
    Scalar x = atom(t.substr(5, t.size() - 6));
    if (!(x > 0)) throw DomainError("log2 of a nonpositive number");
    return log(x) / log(Scalar(2));
  }
  return parse_scalar(t);
}

// -log2 r, exact for powers of two
Scalar exponent_of_ratio(const Scalar& r) {
  int e = 0;
  Scalar m = frexp(r, &e);
  if (m == Scalar(1) / 2) return Scalar(1 - e);
  return -log(r) / log(Scalar(2));
}

int bits_of(const Json& spec, const std::string& path, int fallback) {
  if (!spec.contains("precision_bits")) return fallback;
  const std::string p = at_key(path, "precision_bits");
  if (!spec["precision_bits"].is_number_integer()) throw ConfigError(p, "expected an integer");
  int bits = spec["precision_bits"].get<int>();
  try {
    check_precision_bits(bits);
  } catch (const DomainError& e) {
    throw ConfigError(p, e.what());
  }
  return bits;
}

PointSet1D rounded(const PointSet1D& p, int bits) {
  if (bits >= kMaxPrecisionBits) return p;
  std::vector<Scalar> v;
  for (const auto& x : p.points()) v.push_back(round_to_bits(x, bits));
  return PointSet1D(std::move(v));
}

PointSet2D rounded(const PointSet2D& p, int bits) {
  if (bits >= kMaxPrecisionBits) return p;
  std::vector<Point2> v;
  for (const auto& q : p.points()) v.push_back({round_to_bits(q.x, bits), round_to_bits(q.y, bits)});
  return PointSet2D(std::move(v));
}

Point2 point_at(const Json& j, const std::string& path) {
  if (j.is_array()) {
    if (j.size() != 2) throw ConfigError(path, "expected [x, y]");
    return {scalar_at(j[0], at_index(path, 0)), scalar_at(j[1], at_index(path, 1))};
  }
  return {scalar_at(j, path), Scalar(0)};
}

}  // namespace

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(at_key(path, k), "unknown field");
}

const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (!j.contains(key)) throw ConfigError(at_key(path, key), "missing field");
  return j.at(key);
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::uint64_t count_at(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    throw ConfigError(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

Scalar scalar_at(const Json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Scalar(j.get<long long>());
    if (j.is_number_unsigned()) return Scalar(j.get<unsigned long long>());
    if (j.is_number_float()) return parse_scalar(j.dump());
    if (j.is_string()) {
      std::string s = j.get<std::string>();
      auto slash = s.find('/');
      if (slash == std::string::npos) return atom(s);
      Scalar den = atom(s.substr(slash + 1));
      if (den == 0) throw DomainError("zero denominator");
      return atom(s.substr(0, slash)) / den;
    }
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  throw ConfigError(path, "expected a number or numeric string");
}

std::vector<double> parse_doubles(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(scalar_at(j[i], at_index(path, i)).convert_to<double>());
  return out;
}

StrictParams parse_strict_params(const Json& j, const std::string& path) {
  check_keys(j, path, {"a", "alpha", "u", "v", "beta", "b", "s1", "growth", "blocks"});
  StrictParams p;
  p.a = scalar_at(require(j, "a", path), at_key(path, "a"));
  p.alpha = scalar_at(require(j, "alpha", path), at_key(path, "alpha"));
  p.u = scalar_at(require(j, "u", path), at_key(path, "u"));
  p.v = scalar_at(require(j, "v", path), at_key(path, "v"));
  p.beta = scalar_at(require(j, "beta", path), at_key(path, "beta"));
  p.b = scalar_at(require(j, "b", path), at_key(path, "b"));
  if (j.contains("s1")) p.s1 = count_at(j["s1"], at_key(path, "s1"));
  if (j.contains("growth")) p.growth = count_at(j["growth"], at_key(path, "growth"));
  if (j.contains("blocks")) p.blocks = count_at(j["blocks"], at_key(path, "blocks"));
  return p;
}

ScheduleSpec parse_schedule(const Json& j, const std::string& path) {
  check_keys(j, path, {"ratio", "exponent", "segments", "strict"});
  if (j.size() != 1) throw ConfigError(path, "expected exactly one of ratio, exponent, segments, strict");
  try {
    if (j.contains("ratio")) {
      Scalar r = scalar_at(j["ratio"], at_key(path, "ratio"));
      if (!(r > 0)) throw ConfigError(at_key(path, "ratio"), "ratio must be positive");
      return {RatioSchedule::constant(exponent_of_ratio(r)), std::nullopt};
    }
    if (j.contains("exponent")) return {RatioSchedule::constant(scalar_at(j["exponent"], at_key(path, "exponent"))), {}};
    if (j.contains("strict")) {
      auto s = example_strict_schedule(parse_strict_params(j["strict"], at_key(path, "strict")));
      return {s.schedule, s};
    }
    const std::string sp = at_key(path, "segments");
    const Json& segs = j["segments"];
    if (!segs.is_array() || segs.empty()) throw ConfigError(sp, "expected a nonempty array");
    std::vector<RatioSchedule::Segment> out;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      std::string ip = at_index(sp, i);
      check_keys(segs[i], ip, {"count", "exponent", "ratio"});
      RatioSchedule::Segment s{kUnbounded, Scalar(0)};
      const Json& c = require(segs[i], "count", ip);
      if (!c.is_null()) s.count = count_at(c, at_key(ip, "count"));
      if (segs[i].contains("exponent") == segs[i].contains("ratio"))
        throw ConfigError(ip, "expected exactly one of exponent, ratio");
      s.exponent = segs[i].contains("exponent") ? scalar_at(segs[i]["exponent"], at_key(ip, "exponent"))
                                                : exponent_of_ratio(scalar_at(segs[i]["ratio"], at_key(ip, "ratio")));
      out.push_back(s);
    }
    return {RatioSchedule::from_segments(std::move(out)), std::nullopt};
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
}

Set1D BuiltSet::as_set1d(const std::string& path) const {
  if (auto p = std::get_if<IntervalSet1D>(&shape)) return *p;
  if (auto p = std::get_if<PointSet1D>(&shape)) return *p;
  if (auto p = std::get_if<CantorApprox>(&shape)) {
    if (!p->materialized()) throw ConfigError(path, "depth too large to magnify; use depth <= 20");
    return p->intervals();
  }
  throw ConfigError(path, "magnification supports 1-D sets only");
}

BuiltSet build_set(const Json& spec, const std::string& path, int default_bits) {
  if (!spec.is_object()) throw ConfigError(path, "expected a set-spec object");
  const std::string family = string_at(require(spec, "family", path), at_key(path, "family"));
  BuiltSet out;
  out.family = family;
  out.precision_bits = bits_of(spec, path, default_bits);
  const int bits = out.precision_bits;
  auto depth_at = [&](const char* key) {
    return static_cast<std::size_t>(count_at(require(spec, key, path), at_key(path, key)));
  };

  try {
    if (family == "cantor" || family == "strict") {
      RatioSchedule sched = RatioSchedule::constant(Scalar(1));
      std::size_t depth = 0;
      if (family == "cantor") {
        check_keys(spec, path, {"family", "schedule", "depth", "precision_bits"});
        sched = parse_schedule(require(spec, "schedule", path), at_key(path, "schedule")).schedule;
        depth = depth_at("depth");
      } else {
        check_keys(spec, path, {"family", "params", "depth", "precision_bits"});
        sched = example_strict_schedule(parse_strict_params(require(spec, "params", path), at_key(path, "params")))
                    .schedule;
        depth = spec.contains("depth") ? depth_at("depth") : static_cast<std::size_t>(sched.length());
      }
      CantorApprox c = cantor_step(sched, depth, bits);
      out.native = native_radii(c);
      out.truncation = c.min_len() / 2;
      out.schedule = sched;
      if (c.materialized())
        out.shape = c.intervals();
      else
        out.shape = std::move(c);
    } else if (family == "ifs") {
      check_keys(spec, path, {"family", "maps", "transition", "depth", "precision_bits"});
      const std::string mp = at_key(path, "maps");
      const Json& maps = require(spec, "maps", path);
      if (!maps.is_array() || maps.empty()) throw ConfigError(mp, "expected a nonempty array");
      std::vector<SimilarityMap> m;
      for (std::size_t i = 0; i < maps.size(); ++i) {
        std::string ip = at_index(mp, i);
        check_keys(maps[i], ip, {"ratio", "translation"});
        m.push_back({scalar_at(require(maps[i], "ratio", ip), at_key(ip, "ratio")),
                     scalar_at(require(maps[i], "translation", ip), at_key(ip, "translation"))});
      }
      std::vector<std::vector<int>> transition;
      if (spec.contains("transition")) {
        try {
          transition = spec["transition"].get<std::vector<std::vector<int>>>();
        } catch (const Json::exception&) {
          throw ConfigError(at_key(path, "transition"), "expected a 0/1 matrix");
        }
      }
      SimilarityIFS1D ifs(std::move(m), std::move(transition));
      std::size_t depth = depth_at("depth");
      auto att = ifs_attractor(ifs, depth, bits);
      out.native = native_radii(ifs, depth);
      out.truncation = att.max_len();
      out.shape = std::move(att);
    } else if (family == "falpha") {
      check_keys(spec, path, {"family", "alpha", "depth", "precision_bits"});
      auto f = f_alpha_step(scalar_at(require(spec, "alpha", path), at_key(path, "alpha")), depth_at("depth"), bits);
      out.native = native_radii(f);
      out.truncation = truncation_bound(f.intervals);
      out.shape = std::move(f.intervals);
    } else if (family == "sequence") {
      check_keys(spec, path, {"family", "rule", "n", "p", "precision_bits"});
      const std::string rule = string_at(require(spec, "rule", path), at_key(path, "rule"));
      std::uint64_t n = count_at(require(spec, "n", path), at_key(path, "n"));
      std::function<Scalar(std::uint64_t)> f;
      if (rule == "inverse")
        f = rule_inverse;
      else if (rule == "exp_neg_sqrt")
        f = rule_exp_neg_sqrt;
      else if (rule == "power")
        f = rule_power(scalar_at(require(spec, "p", path), at_key(path, "p")));
      else if (rule == "arithmetic")
        f = rule_arithmetic(n);
      else
        throw ConfigError(at_key(path, "rule"), "unknown rule '" + rule + "'");
      auto pts = rounded(decreasing_gap_points(f, n), bits);
      out.truncation = pts.empty() ? Scalar(0) : pts.points().front();
      out.shape = std::move(pts);
    } else if (family == "projection") {
      check_keys(spec, path, {"family", "jmax", "part", "precision_bits"});
      int jmax = static_cast<int>(depth_at("jmax"));
      std::string part = spec.contains("part") ? string_at(spec["part"], at_key(path, "part")) : "set";
      auto ex = projection_example(jmax);
      if (part == "set")
        out.shape = rounded(ex.set(), bits);
      else if (part == "x")
        out.shape = rounded(ex.x_projection(), bits);
      else
        throw ConfigError(at_key(path, "part"), "expected \"set\" or \"x\"");
    } else if (family == "product") {
      check_keys(spec, path, {"family", "a", "b", "precision_bits"});
      auto a = build_set(require(spec, "a", path), at_key(path, "a"), bits);
      auto b = build_set(require(spec, "b", path), at_key(path, "b"), bits);
      auto sa = a.as_set1d(at_key(path, "a")), sb = b.as_set1d(at_key(path, "b"));
      if (sa.index() != sb.index()) throw ConfigError(path, "factors must both be interval sets or both point sets");
      if (auto ia = std::get_if<IntervalSet1D>(&sa))
        out.shape = product_set(*ia, std::get<IntervalSet1D>(sb)).corners;
      else
        out.shape = product_set(std::get<PointSet1D>(sa), std::get<PointSet1D>(sb)).corners;
    } else if (family == "intervals") {
      check_keys(spec, path, {"family", "intervals", "precision_bits"});
      const std::string ip = at_key(path, "intervals");
      const Json& iv = require(spec, "intervals", path);
      if (!iv.is_array()) throw ConfigError(ip, "expected an array of [lo, hi]");
      std::vector<Interval> v;
      for (std::size_t i = 0; i < iv.size(); ++i) {
        if (!iv[i].is_array() || iv[i].size() != 2) throw ConfigError(at_index(ip, i), "expected [lo, hi]");
        Interval I{scalar_at(iv[i][0], at_index(at_index(ip, i), 0)), scalar_at(iv[i][1], at_index(at_index(ip, i), 1))};
        if (I.hi < I.lo) throw ConfigError(at_index(ip, i), "hi < lo");
        v.push_back(I);
      }
      out.shape = IntervalSet1D(std::move(v));
    } else if (family == "points") {
      check_keys(spec, path, {"family", "points", "precision_bits"});
      const std::string pp = at_key(path, "points");
      const Json& pts = require(spec, "points", path);
      if (!pts.is_array()) throw ConfigError(pp, "expected an array");
      bool planar = !pts.empty() && pts[0].is_array();
      std::vector<Scalar> v1;
      std::vector<Point2> v2;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].is_array() != planar) throw ConfigError(at_index(pp, i), "mixed 1-D and 2-D points");
        Point2 q = point_at(pts[i], at_index(pp, i));
        if (planar)
          v2.push_back(q);
        else
          v1.push_back(q.x);
      }
      if (planar)
        out.shape = rounded(PointSet2D(std::move(v2)), bits);
      else
        out.shape = rounded(PointSet1D(std::move(v1)), bits);
    } else {
      throw ConfigError(at_key(path, "family"), "unknown family '" + family + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return out;
}

void write_shape(std::ostream& os, const Target::Shape& shape) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CantorApprox>) {
          if (!s.materialized()) throw DomainError("depth exceeds the export limit of 20 steps");
          write_set(os, s.intervals());
        } else {
          write_set(os, s);
        }
      },
      shape);
}

std::vector<Scalar> parse_grid(const Json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      Scalar x = scalar_at(j[i], at_index(path, i));
      if (!(x > 0)) throw ConfigError(at_index(path, i), "scales must be positive");
      out.push_back(x);
    }
    return out;
  }
  check_keys(j, path, {"dyadic", "step"});
  const std::string dp = at_key(path, "dyadic");
  const Json& d = require(j, "dyadic", path);
  if (!d.is_array() || d.size() != 2 || !d[0].is_number_integer() || !d[1].is_number_integer())
    throw ConfigError(dp, "expected [kmin, kmax]");
  long long k0 = d[0].get<long long>(), k1 = d[1].get<long long>();
  long long step = j.contains("step") ? static_cast<long long>(count_at(j["step"], at_key(path, "step"))) : 1;
  if (step == 0 || k1 < k0) throw ConfigError(path, "empty dyadic range");
  if ((k1 - k0) / step > 100000) throw ConfigError(path, "grid too large");
  std::vector<Scalar> out;
  for (long long k = k0; k <= k1; k += step) out.push_back(pow2i(-k));
  return out;
}

SweepConfig parse_sweep(const Json& j, const std::string& path) {
  SweepConfig c;
  if (j.is_null()) return c;
  check_keys(j, path,
             {"R_grid", "r_grid", "s_multipliers", "lambda_min", "lambda_max", "R_max_fraction", "resolution",
              "delta_floor", "theta_max", "center_cap", "exhaustive_centers", "extra_centers", "extra_pairs"});
  auto num = [&](const char* key, double& dst) {
    if (j.contains(key)) dst = number_at(j[key], at_key(path, key));
  };
  if (j.contains("R_grid")) c.R_grid = parse_grid(j["R_grid"], at_key(path, "R_grid"));
  if (j.contains("r_grid")) c.r_grid = parse_grid(j["r_grid"], at_key(path, "r_grid"));
  if (j.contains("s_multipliers")) {
    c.s_multipliers = parse_doubles(j["s_multipliers"], at_key(path, "s_multipliers"));
    for (double m : c.s_multipliers)
      if (!(m > 0)) throw ConfigError(at_key(path, "s_multipliers"), "multipliers must be positive");
  }
  num("lambda_min", c.lambda_min);
  num("lambda_max", c.lambda_max);
  num("R_max_fraction", c.R_max_fraction);
  num("delta_floor", c.delta_floor);
  num("theta_max", c.theta_max);
  if (!(c.lambda_min > 0)) throw ConfigError(at_key(path, "lambda_min"), "must be positive");
  if (!(c.delta_floor > 0)) throw ConfigError(at_key(path, "delta_floor"), "must be positive");
  if (!(c.theta_max > 0 && c.theta_max < 1)) throw ConfigError(at_key(path, "theta_max"), "must lie in (0, 1)");
  if (j.contains("resolution")) c.resolution = scalar_at(j["resolution"], at_key(path, "resolution"));
  if (j.contains("center_cap")) c.centers.cap = count_at(j["center_cap"], at_key(path, "center_cap"));
  if (j.contains("exhaustive_centers")) {
    if (!j["exhaustive_centers"].is_boolean()) throw ConfigError(at_key(path, "exhaustive_centers"), "expected a boolean");
    c.centers.exhaustive = j["exhaustive_centers"].get<bool>();
  }
  if (j.contains("extra_centers")) {
    const std::string ep = at_key(path, "extra_centers");
    if (!j["extra_centers"].is_array()) throw ConfigError(ep, "expected an array");
    for (std::size_t i = 0; i < j["extra_centers"].size(); ++i)
      c.extra_centers.push_back(point_at(j["extra_centers"][i], at_index(ep, i)));
  }
  if (j.contains("extra_pairs")) {
    const std::string ep = at_key(path, "extra_pairs");
    const Json& pairs = j["extra_pairs"];
    if (!pairs.is_array()) throw ConfigError(ep, "expected an array of [R, r]");
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!pairs[i].is_array() || pairs[i].size() != 2) throw ConfigError(at_index(ep, i), "expected [R, r]");
      c.extra_pairs.push_back({scalar_at(pairs[i][0], at_index(at_index(ep, i), 0)),
                               scalar_at(pairs[i][1], at_index(at_index(ep, i), 1))});
    }
  }
  return c;
}

TangentSequence parse_tangent_sequence(const Json& j, const std::string& path) {
  check_keys(j, path, {"maps", "zoom", "mode", "k_max", "candidate", "eps_fast", "converged_tol", "classify_tol"});
  TangentSequence seq;
  if (j.contains("mode")) {
    try {
      seq.mode = parse_tangent_mode(string_at(j["mode"], at_key(path, "mode")));
    } catch (const DomainError& e) {
      throw ConfigError(at_key(path, "mode"), e.what());
    }
  }
  if (j.contains("k_max")) seq.k_max = number_at(j["k_max"], at_key(path, "k_max"));
  if (j.contains("maps") == j.contains("zoom")) throw ConfigError(path, "expected exactly one of maps, zoom");
  if (j.contains("maps")) {
    const std::string mp = at_key(path, "maps");
    const Json& maps = j["maps"];
    if (!maps.is_array()) throw ConfigError(mp, "expected an array");
    for (std::size_t i = 0; i < maps.size(); ++i) {
      std::string ip = at_index(mp, i);
      check_keys(maps[i], ip, {"scale", "offset"});
      AffineMap T;
      auto axis = [&](const char* key, std::vector<Scalar>& dst, bool needed) {
        if (!maps[i].contains(key)) {
          if (needed) throw ConfigError(at_key(ip, key), "missing field");
          return;
        }
        const Json& v = maps[i][key];
        if (v.is_array())
          for (std::size_t a = 0; a < v.size(); ++a) dst.push_back(scalar_at(v[a], at_index(at_key(ip, key), a)));
        else
          dst.push_back(scalar_at(v, at_key(ip, key)));
      };
      axis("scale", T.scale, true);
      axis("offset", T.offset, false);
      if (T.offset.empty()) T.offset.assign(T.scale.size(), Scalar(0));
      if (T.offset.size() != T.scale.size()) throw ConfigError(ip, "scale and offset differ in dimension");
      seq.maps.push_back(std::move(T));
    }
  } else {
    // T_k x = base^k (x - at), k = from..to
    const std::string zp = at_key(path, "zoom");
    const Json& z = j["zoom"];
    check_keys(z, zp, {"base", "from", "to", "at"});
    Scalar base = scalar_at(require(z, "base", zp), at_key(zp, "base"));
    Scalar at = z.contains("at") ? scalar_at(z["at"], at_key(zp, "at")) : Scalar(0);
    auto k0 = count_at(require(z, "from", zp), at_key(zp, "from"));
    auto k1 = count_at(require(z, "to", zp), at_key(zp, "to"));
    if (k1 < k0 || k1 - k0 > 4096) throw ConfigError(zp, "bad range");
    for (auto k = k0; k <= k1; ++k) {
      Scalar s = pow(base, static_cast<long long>(k));
      seq.maps.push_back(similarity_1d(s, -s * at));
    }
  }
  try {
    seq.validate();
  } catch (const DomainError& e) {
    throw ConfigError(path, e.what());
  }
  return seq;
}

std::uint64_t config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json to_json(const FormulaResult& r) {
  Json j{{"value", r.value.convert_to<double>()},
         {"witness_n", r.witness_n},
         {"witness_k", r.witness_k},
         {"converged", r.converged}};
  j["delta"] = r.delta ? Json(r.delta->convert_to<double>()) : Json(nullptr);
  return j;
}

Json to_json(const SweepRecord& r, int ambient_dim) {
  return {{"center", center_text(r.center_max, ambient_dim)},
          {"center_min", center_text(r.center_min, ambient_dim)},
          {"R", to_decimal(r.R)},
          {"r", to_decimal(r.r)},
          {"s", r.s},
          {"lambda", r.lambda},
          {"count", r.count_max},
          {"count_min", r.count_min},
          {"slope", r.slope_max},
          {"slope_min", r.slope_min}};
}

Json to_json(const DimensionReport& r, int ambient_dim) {
  Json curve = Json::array();
  for (const auto& [x, v] : r.curve) curve.push_back({x, v});
  Json j{{"kind", r.kind},           {"estimate", r.estimate}, {"curve", curve},
         {"scale_span", r.scale_span}, {"regression", r.regression}, {"records", r.records},
         {"converged", r.converged}};
  j["witness"] = r.witness ? to_json(*r.witness, ambient_dim) : Json(nullptr);
  return j;
}

Json to_json(const TangentVerdict& v) {
  auto list = [](const std::vector<Scalar>& xs) {
    Json a = Json::array();
    for (const auto& x : xs) a.push_back(x.convert_to<double>());
    return a;
  };
  const auto& st = v.classification.stats;
  return {{"distances", list(v.distances)},
          {"raw", list(v.raw)},
          {"allowance", list(v.allowance)},
          {"b", list(v.b)},
          {"C", v.C},
          {"epsilon", v.epsilon ? Json(*v.epsilon) : Json(nullptr)},
          {"fast", v.fast},
          {"converged", v.converged},
          {"classification",
           {{"kind", to_string(v.classification.kind)},
            {"components", st.components},
            {"diameter", st.diameter.convert_to<double>()},
            {"max_gap", st.max_gap.convert_to<double>()},
            {"min_gap", st.min_gap.convert_to<double>()},
            {"max_component", st.max_component.convert_to<double>()}}}};
}

Json to_json(const TangentBoundReport& r) {
  return {{"verdict", to_json(r.verdict)},
          {"candidate_lower_box", r.candidate_lbox},
          {"candidate_upper_box", r.candidate_ubox},
          {"set_qa", r.set_qa},
          {"set_ql", r.set_ql},
          {"interior_point", r.interior_point},
          {"lower_box_vs_qa", to_string(r.lower_box_vs_qa)},
          {"ql_vs_upper_box", to_string(r.ql_vs_upper_box)},
          {"notes", r.notes},
          {"pass", r.pass}};
}

Json to_json(const ProjectionBoundReport& r) {
  auto one = [](const ProjectionBoundCase& c) {
    return Json{{"center", center_text(c.center, 2)}, {"s", c.s}, {"t", c.t}, {"count", c.count}, {"bound", c.bound}};
  };
  Json v = Json::array();
  for (const auto& c : r.violations) v.push_back(one(c));
  return {{"pass", r.pass}, {"checked", r.checked}, {"violations", v}, {"tightest", one(r.tightest)}};
}

}  // namespace qadim
