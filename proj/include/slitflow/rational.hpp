#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>

#include "slitflow/errors.hpp"

namespace slitflow {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int num(const Rat& r) { return numerator(r); }
inline Int den(const Rat& r) { return denominator(r); }

// Floor division, b > 0.
inline Int fdiv(const Int& a, const Int& b) {
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

inline Int floor_rat(const Rat& r) { return fdiv(num(r), den(r)); }

inline Int ceil_rat(const Rat& r) {
  Int f = floor_rat(r);
  return (Rat(f) == r) ? f : f + 1;
}

inline Rat abs_rat(const Rat& r) { return r < 0 ? Rat(-r) : r; }

inline Int pow2(unsigned bits) { return Int(1) << bits; }

// floor(sqrt(n)) for n >= 0.
inline Int isqrt(const Int& n) {
  if (n < 0) throw usage_error("isqrt of negative value");
  return boost::multiprecision::sqrt(n);
}

// Exact decimal rendering with directed rounding; `digits` decimal places
// after the point. Used for CSV and report output so certified bounds stay
// certified in serialized form.
inline std::string decimal_string(const Rat& r, unsigned digits, bool round_up) {
  Int scale = 1;
  for (unsigned i = 0; i < digits; ++i) scale *= 10;
  Rat scaled = r * scale;
  Int v = round_up ? ceil_rat(scaled) : floor_rat(scaled);
  bool neg = v < 0;
  Int a = neg ? Int(-v) : v;
  std::string s = a.str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  std::string out = s.substr(0, s.size() - digits);
  if (digits > 0) out += "." + s.substr(s.size() - digits);
  if (neg && a != 0) out = "-" + out;
  return out;
}

inline std::string rat_string(const Rat& r) {
  return num(r).str() + "/" + den(r).str();
}

// Parses "p/q", "p", or a plain decimal like "-0.25" into an exact rational.
inline Rat parse_rational(const std::string& s) {
  if (s.empty()) throw usage_error("empty rational literal");
  auto slash = s.find('/');
  try {
    if (slash != std::string::npos) {
      Int n(s.substr(0, slash));
      Int d(s.substr(slash + 1));
      if (d == 0) throw usage_error("zero denominator: " + s);
      return Rat(n, d);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));
    std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
    if (head.empty() || head == "-" || head == "+") head += "0";
    Int scale = 1;
    for (size_t i = 0; i < tail.size(); ++i) scale *= 10;
    Int whole(head);
    Int frac = tail.empty() ? Int(0) : Int(tail);
    bool neg = !s.empty() && s[0] == '-';
    Rat r = Rat(whole) + (neg ? Rat(-frac, scale) : Rat(frac, scale));
    return r;
  } catch (const std::exception&) {
    throw usage_error("cannot parse rational: " + s);
  }
}

// Stable 64-bit FNV-1a, used for config/cache keys (must not vary across
// platforms or runs, unlike std::hash).
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 1469598103934665603ull) {
  std::uint64_t h = seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace slitflow
