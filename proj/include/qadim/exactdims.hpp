#pragma once

#include "qadim/generators.hpp"
#include "qadim/scalar.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qadim {

// Cumulative log lengths L_k = sum_{i<=k} |log2 r_i|, k = 0..N.  Sums are formed
// in Scalar and stored as long double; every formula is a ratio n / (L_{k+n} - L_k).
class LogLengthTable {
 public:
  static LogLengthTable from_schedule(const RatioSchedule& schedule, std::size_t N);
  static LogLengthTable from_exponents(const std::vector<Scalar>& exponents, std::optional<Scalar> rho0);

  std::size_t size() const { return L_.size() - 1; }  // N
  long double operator[](std::size_t k) const { return L_[k]; }
  const std::vector<long double>& values() const { return L_; }
  bool inf_positive() const { return rho0_.has_value(); }
  const std::optional<Scalar>& rho0() const { return rho0_; }
  // first n steps
  LogLengthTable prefix(std::size_t n) const;
  // every exponent multiplied by lambda
  LogLengthTable scaled(long double lambda) const;

 private:
  std::vector<long double> L_;
  std::optional<Scalar> rho0_;
};

struct FormulaResult {
  Scalar value;
  std::size_t witness_n = 0;
  std::size_t witness_k = 0;
  std::size_t tail_start = 0;
  std::optional<Scalar> delta;
  bool converged = false;
};

struct FormulaOptions {
  double tail_fraction = 0.5;  // limsup proxy: n (box) or k (windows) >= ceil(f N)
};

// {ceil(1.15^m)} intersected with [1, N/2]
std::vector<std::size_t> default_n_grid(std::size_t N);

FormulaResult upper_box_formula(const LogLengthTable& T, const FormulaOptions& opt = {});
FormulaResult lower_box_formula(const LogLengthTable& T, const FormulaOptions& opt = {});
FormulaResult assouad_formula(const LogLengthTable& T, const std::vector<std::size_t>& n_grid,
                              const FormulaOptions& opt = {});
FormulaResult lower_assouad_formula(const LogLengthTable& T, const std::vector<std::size_t>& n_grid,
                                    const FormulaOptions& opt = {});
FormulaResult quasi_assouad_formula(const LogLengthTable& T, const Scalar& delta,
                                    const std::vector<std::size_t>& n_grid, const FormulaOptions& opt = {});
FormulaResult quasi_lower_formula(const LogLengthTable& T, const Scalar& delta, const std::vector<std::size_t>& n_grid,
                                  const FormulaOptions& opt = {});

struct QaCurve {
  std::vector<std::pair<Scalar, FormulaResult>> points;
  Scalar limit;
  bool converged = false;
};

QaCurve qa_curve(const LogLengthTable& T, const std::vector<Scalar>& delta_grid, double tol = 0.02,
                 const FormulaOptions& opt = {});

// Six formulas on one table, with a convergence verdict against a reference prefix.
struct FormulaBundle {
  FormulaResult assouad, upper_box, lower_box, lower_assouad;
  std::vector<FormulaResult> quasi_assouad, quasi_lower;  // one per delta
  std::size_t N = 0, reference_n = 0;
};

FormulaBundle formula_bundle(const LogLengthTable& T, const std::vector<Scalar>& deltas, std::size_t reference_n,
                             double tol = 0.02, const FormulaOptions& opt = {});

struct ProductBounds {
  Scalar qa_lower, qa_upper;  // for dim_qA(X x Y)
  Scalar ql_lower, ql_upper;  // for dim_qL(X x Y)
};

ProductBounds product_bounds(const Scalar& qLX, const Scalar& qAX, const Scalar& qLY, const Scalar& qAY);

struct OrderingResult {
  bool pass = true;
  std::string violation;  // first failing link, e.g. "lower box <= upper box"
};

// dim_L <= dim_qL <= lower box <= upper box <= dim_qA <= dim_A, each link within slack
OrderingResult ordering_check(const Scalar& dL, const Scalar& dqL, const Scalar& lbox, const Scalar& ubox,
                              const Scalar& dqA, const Scalar& dA, const Scalar& slack);

}  // namespace qadim
