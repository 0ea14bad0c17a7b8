#pragma once

#include "qadim/config.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace qadim {

struct CheckResult {
  std::string name;
  bool pass = true;
  std::vector<std::pair<std::string, double>> values;  // measured quantities, in evaluation order
  std::vector<std::string> failures;

  void record(const std::string& key, double v) { values.emplace_back(key, v); }
  // Records a failure message when `ok` is false.
  void expect(bool ok, const std::string& what);
  double value(const std::string& key) const;
};

struct VerifyOptions {
  unsigned threads = 1;
  std::uint64_t seed = 0;
  // Band half-width per check name for ordering, strict-example and moran-equality (0.03, 0.05, 0.1).
  std::map<std::string, double> tolerances;
};

// ordering, strict-example, moran-equality, falpha, projection, decreasing-gaps, tangent-bounds
const std::vector<std::string>& verify_suite_names();
CheckResult run_check(const std::string& name, const VerifyOptions& opt = {});

Json to_json(const CheckResult& r);

}  // namespace qadim
