#include "qadim/scalar.hpp"

#include <cmath>
#include <cstdlib>
#include <ios>
#include <limits>

namespace qadim {

void check_precision_bits(int bits) {
  if (bits < kMinPrecisionBits || bits > kMaxPrecisionBits) {
    throw DomainError("precision_bits must lie in [" + std::to_string(kMinPrecisionBits) + ", " +
                      std::to_string(kMaxPrecisionBits) + "], got " + std::to_string(bits));
  }
}

int default_precision_bits() {
  static const int bits = [] {
    const char* env = std::getenv("QADIM_PRECISION_BITS");
    if (env == nullptr || *env == '\0') return kMaxPrecisionBits;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0') throw DomainError("QADIM_PRECISION_BITS is not an integer");
    check_precision_bits(static_cast<int>(v));
    return static_cast<int>(v);
  }();
  return bits;
}

Scalar round_to_bits(const Scalar& x, int bits) {
  check_precision_bits(bits);
  if (bits >= kMaxPrecisionBits || x == 0) return x;
  int e = 0;
  Scalar m = frexp(x, &e);  // |m| in [1/2, 1)
  m = ldexp(m, bits);
  m = round(m);
  return ldexp(m, e - bits);
}

double log2_of(const Scalar& x) {
  if (x <= 0) throw DomainError("log2 of a non-positive value");
  int e = 0;
  Scalar m = frexp(x, &e);
  return static_cast<double>(e) + std::log2(m.convert_to<double>());
}

Scalar pow2i(long long e) {
  return ldexp(Scalar(1), static_cast<int>(e));
}

Scalar exp2_of(long double e) {
  long double fl = std::floor(e);
  long double frac = e - fl;
  Scalar m(std::exp2(frac));
  return ldexp(m, static_cast<int>(fl));
}

Scalar parse_scalar(std::string_view text) {
  std::string s(text);
  if (auto slash = s.find('/'); slash != std::string::npos) {
    Scalar num = parse_scalar(s.substr(0, slash));
    Scalar den = parse_scalar(s.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    return num / den;
  }
  try {
    return Scalar(s);
  } catch (const std::exception&) {
    throw DomainError("cannot parse number '" + s + "'");
  }
}

std::string to_decimal(const Scalar& x) {
  return x.str(std::numeric_limits<Scalar>::max_digits10, std::ios_base::scientific);
}

std::string to_decimal(const Scalar& x, int significant_digits) {
  return x.str(significant_digits, std::ios_base::scientific);
}

}  // namespace qadim
