#ifndef QBFCHAN_RATIONAL_HPP
#define QBFCHAN_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace qbfchan {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow2(unsigned e) { return BigInt(1) << e; }

// 2^-e as an exact rational.
inline Rational pow2_inv(unsigned e) { return Rational(BigInt(1), pow2(e)); }

// Canonical "num/den" form, den always printed ("0/1", "1/4", ...).
std::string fraction_string(const Rational& r);

double to_double(const Rational& r);

// Smallest k/16384 that is >= log2(value), computed with integer
// arithmetic only (bit length of value^16384). value must be >= 1.
// Results are cached; thread safe.
Rational log2_upper_bound(long value);

// Parses "3/4", "0.25" or "7" into an exact rational. Throws
// std::invalid_argument on malformed input.
Rational parse_rational(const std::string& text);

}  // namespace qbfchan

#endif
