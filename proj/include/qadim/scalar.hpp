#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qadim {

// Fixed 256-bit mantissa; a run may round every generated value to fewer bits.
using Scalar = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>,
    boost::multiprecision::et_off>;

inline constexpr int kMinPrecisionBits = 53;
inline constexpr int kMaxPrecisionBits = 256;

// Invalid input to a public operation (bad parameters, broken preconditions).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Reads QADIM_PRECISION_BITS once; 256 when unset.
int default_precision_bits();
void check_precision_bits(int bits);

Scalar round_to_bits(const Scalar& x, int bits);

// log2 via exponent extraction; absolute error about 1e-16.
double log2_of(const Scalar& x);
// 2^e for a real exponent, relative error about 1e-18, any magnitude.
Scalar exp2_of(long double e);
Scalar pow2i(long long e);

Scalar parse_scalar(std::string_view text);
// Shortest round-trip decimal form at full mantissa width.
std::string to_decimal(const Scalar& x);
std::string to_decimal(const Scalar& x, int significant_digits);

}  // namespace qadim
