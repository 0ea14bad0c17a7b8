#pragma once

#include "qadim/estimators.hpp"
#include "qadim/exactdims.hpp"
#include "qadim/tangents.hpp"

#include "json.hpp"

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qadim {

using Json = nlohmann::json;

// Schema violation at a field path such as "set.maps[2].ratio".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Numbers or strings: decimals, "a/b", "pi", "log2(x)", and quotients of those.
Scalar scalar_at(const Json& j, const std::string& path);

// {"ratio": r} | {"exponent": e} | {"segments": [{"count": n|null, "exponent": e}]} | {"strict": {...}}
struct ScheduleSpec {
  RatioSchedule schedule;
  std::optional<StrictSchedule> strict;
};

ScheduleSpec parse_schedule(const Json& j, const std::string& path);
StrictParams parse_strict_params(const Json& j, const std::string& path);

struct BuiltSet {
  std::string family;
  Target::Shape shape;
  std::vector<Scalar> native;  // empty: dyadic
  Scalar truncation = 0;       // Hausdorff distance to the limit set, where known
  int precision_bits = 256;
  std::optional<RatioSchedule> schedule;

  Target target() const { return Target(shape, native); }
  // 1-D view for magnification; throws ConfigError for planar sets.
  Set1D as_set1d(const std::string& path) const;
};

// Families: cantor, strict, ifs, falpha, sequence, projection, product, intervals, points.
BuiltSet build_set(const Json& spec, const std::string& path, int default_bits = default_precision_bits());

void write_shape(std::ostream& os, const Target::Shape& shape);

// Sweep parameters; grids are arrays of scalars or {"dyadic": [kmin, kmax], "step": s}.
SweepConfig parse_sweep(const Json& j, const std::string& path);
std::vector<Scalar> parse_grid(const Json& j, const std::string& path);
std::vector<double> parse_doubles(const Json& j, const std::string& path);

TangentSequence parse_tangent_sequence(const Json& j, const std::string& path);

// 64-bit FNV-1a over the canonical dump.
std::uint64_t config_hash(const Json& config);
std::string hash_hex(std::uint64_t h);

Json to_json(const FormulaResult& r);
Json to_json(const SweepRecord& r, int ambient_dim);
Json to_json(const DimensionReport& r, int ambient_dim);
Json to_json(const TangentVerdict& v);
Json to_json(const TangentBoundReport& r);
Json to_json(const ProjectionBoundReport& r);

// Typed field access with path-qualified errors.
void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed);
const Json& require(const Json& j, const std::string& key, const std::string& path);
double number_at(const Json& j, const std::string& path);
std::uint64_t count_at(const Json& j, const std::string& path);
std::string string_at(const Json& j, const std::string& path);

}  // namespace qadim
