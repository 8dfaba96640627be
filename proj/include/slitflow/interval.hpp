#pragma once

#include <algorithm>
#include <optional>
#include <string>

#include "slitflow/rational.hpp"

namespace slitflow {

// Closed interval with exact rational endpoints. Every operation returns an
// enclosure of the exact image; there is no silent rounding anywhere in the
// certification path. Call rounded() explicitly to cap endpoint size.
struct Interval {
  Rat lo, hi;

  Interval() : lo(0), hi(0) {}
  explicit Interval(const Rat& v) : lo(v), hi(v) {}
  Interval(Rat l, Rat h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo > hi) throw usage_error("interval endpoints out of order");
  }

  static Interval hull(const Rat& a, const Rat& b) {
    return a <= b ? Interval(a, b) : Interval(b, a);
  }

  Rat width() const { return hi - lo; }
  Rat mid() const { return (lo + hi) / 2; }
  bool contains(const Rat& v) const { return lo <= v && v <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  bool intersects(const Interval& o) const { return !(hi < o.lo || o.hi < lo); }

  bool is_positive() const { return lo > 0; }
  bool is_negative() const { return hi < 0; }
  bool sign_definite() const { return is_positive() || is_negative(); }

  Interval operator-() const { return Interval(-hi, -lo); }

  Interval operator+(const Interval& o) const { return Interval(lo + o.lo, hi + o.hi); }
  Interval operator-(const Interval& o) const { return Interval(lo - o.hi, hi - o.lo); }

  Interval operator*(const Interval& o) const {
    Rat a = lo * o.lo, b = lo * o.hi, c = hi * o.lo, d = hi * o.hi;
    return Interval(std::min(std::min(a, b), std::min(c, d)),
                    std::max(std::max(a, b), std::max(c, d)));
  }

  Interval operator*(const Rat& s) const {
    return s >= 0 ? Interval(lo * s, hi * s) : Interval(hi * s, lo * s);
  }

  Interval operator+(const Rat& s) const { return Interval(lo + s, hi + s); }
  Interval operator-(const Rat& s) const { return Interval(lo - s, hi - s); }

  Interval operator/(const Interval& o) const {
    if (!o.sign_definite())
      throw precision_error("interval division by enclosure containing zero");
    Rat a = lo / o.lo, b = lo / o.hi, c = hi / o.lo, d = hi / o.hi;
    return Interval(std::min(std::min(a, b), std::min(c, d)),
                    std::max(std::max(a, b), std::max(c, d)));
  }

  Interval abs() const {
    if (lo >= 0) return *this;
    if (hi <= 0) return Interval(-hi, -lo);
    return Interval(Rat(0), std::max(Rat(-lo), hi));
  }

  Interval square() const {
    Interval a = abs();
    return Interval(a.lo * a.lo, a.hi * a.hi);
  }

  // Outward rounding to dyadic endpoints with denominator 2^bits; keeps
  // numerator growth in check inside long series evaluations.
  Interval rounded(unsigned bits) const {
    Int scale = pow2(bits);
    return Interval(Rat(fdiv(num(lo) * scale, den(lo)), scale),
                    Rat(fdiv(num(hi) * scale, den(hi)) + 1, scale));
  }

  // Certified comparisons: true only when the enclosures prove the relation.
  bool certainly_less(const Interval& o) const { return hi < o.lo; }
  bool certainly_leq(const Interval& o) const { return hi <= o.lo; }
  bool certainly_less(const Rat& v) const { return hi < v; }
  bool certainly_greater(const Rat& v) const { return lo > v; }
};

inline Interval operator*(const Rat& s, const Interval& i) { return i * s; }

// Enclosure of sqrt(x) for x.lo >= 0, endpoints dyadic at `bits`.
inline Interval sqrt_enclosure(const Interval& x, unsigned bits = 128) {
  if (x.lo < 0) throw usage_error("sqrt of interval with negative lower bound");
  Int scale = pow2(bits);
  Int s2 = scale * scale;
  // lower: floor(sqrt(floor(lo * 4^bits))) / 2^bits
  Int lo_scaled = fdiv(num(x.lo) * s2, den(x.lo));
  Int lroot = isqrt(lo_scaled);
  // upper: ceil side
  Int hi_scaled = fdiv(num(x.hi) * s2, den(x.hi)) + 1;
  Int hroot = isqrt(hi_scaled) + 1;
  return Interval(Rat(lroot, scale), Rat(hroot, scale));
}

inline std::string to_string(const Interval& i, unsigned digits = 12) {
  return "[" + decimal_string(i.lo, digits, false) + ", " +
         decimal_string(i.hi, digits, true) + "]";
}

}  // namespace slitflow
