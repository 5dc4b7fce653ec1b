#include "qbfchan/rational.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace qbfchan {

std::string fraction_string(const Rational& r) {
  return numerator(r).str() + "/" + denominator(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational log2_upper_bound(long value) {
  if (value < 1) throw std::invalid_argument("log2_upper_bound: value must be >= 1");
  static std::mutex mu;
  static std::map<long, Rational> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(value);
  if (it != cache.end()) return it->second;

  constexpr unsigned kScale = 16384;
  Rational bound;
  if (value == 1) {
    bound = 0;
  } else if ((value & (value - 1)) == 0) {
    bound = Rational(msb(BigInt(value)), 1);  // exact for powers of two
  } else {
    // ceil(log2(v^s))/s; v odd factor > 1 means v^s is never a power of two.
    BigInt power = pow(BigInt(value), kScale);
    bound = Rational(msb(power) + 1, kScale);
  }
  cache.emplace(value, bound);
  return bound;
}

Rational parse_rational(const std::string& text) {
  try {
    auto slash = text.find('/');
    if (slash != std::string::npos) {
      BigInt num(text.substr(0, slash));
      BigInt den(text.substr(slash + 1));
      if (den == 0) throw std::invalid_argument("zero denominator");
      return Rational(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
      std::string head = text.substr(0, dot);
      std::string tail = text.substr(dot + 1);
      if (tail.find_first_not_of("0123456789") != std::string::npos || tail.empty())
        throw std::invalid_argument("bad decimal");
      bool negative = !head.empty() && head[0] == '-';
      BigInt ipart = head.empty() || head == "-" ? BigInt(0) : BigInt(head);
      BigInt scale = pow(BigInt(10), static_cast<unsigned>(tail.size()));
      BigInt frac(tail);
      BigInt num = abs(ipart) * scale + frac;
      Rational r(num, scale);
      return negative ? -r : r;
    }
    return Rational(BigInt(text), 1);
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse rational from '" + text + "'");
  }
}

}  // namespace qbfchan
