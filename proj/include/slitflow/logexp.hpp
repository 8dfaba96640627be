#pragma once

#include <map>
#include <mutex>
#include <shared_mutex>

#include "slitflow/interval.hpp"

namespace slitflow {

namespace detail {

// atanh(z) = sum z^(2j+1)/(2j+1), with |tail| <= |z|^(2J+3)/((2J+3)(1-z^2)).
// Exact rational evaluation; callers pass dyadic z to keep digits bounded.
inline Rat atanh_partial(const Rat& z, unsigned terms) {
  Rat z2 = z * z;
  Rat p = z;
  Rat sum = 0;
  for (unsigned j = 0; j <= terms; ++j) {
    sum += p / Rat(2 * j + 1);
    p *= z2;
  }
  return sum;
}

inline Rat atanh_tail_bound(const Rat& zabs, unsigned terms) {
  Rat p = zabs;
  Rat z2 = zabs * zabs;
  for (unsigned j = 0; j < terms + 1; ++j) p *= z2;  // |z|^(2J+3)
  return p / (Rat(2 * terms + 3) * (Rat(1) - z2));
}

// atan(1/x) for integer x >= 2 via the alternating series; consecutive
// partial sums bracket the value.
inline Interval atan_inv(const Int& x, unsigned bits) {
  Rat invx2 = Rat(1, x * x);
  Rat term = Rat(1, x);
  Rat sum = 0;
  Interval out;
  // stop once the next term is below 2^-(bits+8)
  Rat eps = Rat(1, pow2(bits + 8));
  unsigned j = 0;
  Rat prev_lo = 0, prev_hi = 0;
  bool have = false;
  while (true) {
    Rat contrib = term / Rat(2 * j + 1);
    if (j % 2 == 0) sum += contrib; else sum -= contrib;
    term *= invx2;
    ++j;
    Rat next = term / Rat(2 * j + 1);
    if (next < eps) {
      // alternating: value between sum and sum -/+ next
      if (j % 2 == 0) out = Interval(sum, sum + next);
      else out = Interval(sum - next, sum);
      return out;
    }
    (void)prev_lo; (void)prev_hi; (void)have;
  }
}

}  // namespace detail

// Enclosure of ln 2, cached per precision.
inline Interval ln2_enclosure(unsigned bits) {
  static std::map<unsigned, Interval> cache;
  static std::shared_mutex mtx;
  {
    std::shared_lock rl(mtx);
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
  }
  // ln 2 = 2 atanh(1/3); term ratio 1/9.
  unsigned terms = static_cast<unsigned>(bits * 0.32) + 4;
  Rat z(1, 3);
  Rat s = detail::atanh_partial(z, terms);
  Rat tail = detail::atanh_tail_bound(z, terms);
  Interval r = Interval(2 * (s - tail), 2 * (s + tail)).rounded(bits + 16);
  std::unique_lock wl(mtx);
  cache.emplace(bits, r);
  return r;
}

inline Interval pi_enclosure(unsigned bits) {
  static std::map<unsigned, Interval> cache;
  static std::shared_mutex mtx;
  {
    std::shared_lock rl(mtx);
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
  }
  Interval a5 = detail::atan_inv(Int(5), bits);
  Interval a239 = detail::atan_inv(Int(239), bits);
  Interval r = (Rat(16) * a5 - Rat(4) * a239).rounded(bits + 16);
  std::unique_lock wl(mtx);
  cache.emplace(bits, r);
  return r;
}

// Enclosure of ln(x) for exact rational x > 0.
inline Interval log_enclosure(const Rat& x, unsigned bits = 128) {
  if (x <= 0) throw usage_error("log of non-positive rational");
  // Range-reduce x = 2^e * s with s in [3/4, 3/2).
  long e = 0;
  {
    Int n = num(x), d = den(x);
    long bn = static_cast<long>(msb(n)), bd = static_cast<long>(msb(d));
    e = bn - bd;
  }
  Rat s = (e >= 0) ? x / Rat(pow2(static_cast<unsigned>(e)))
                   : x * Rat(pow2(static_cast<unsigned>(-e)));
  while (s >= Rat(3, 2)) { s /= 2; ++e; }
  while (s < Rat(3, 4)) { s *= 2; --e; }
  // z = (s-1)/(s+1) in [-1/7, 1/5); dyadic-round z outward first.
  Rat z = (s - 1) / (s + 1);
  Int scale = pow2(bits + 32);
  Rat zlo(fdiv(num(z) * scale, den(z)), scale);
  Rat zhi = zlo + Rat(1, scale);
  unsigned terms = bits / 4 + 4;
  Rat zabs = std::max(abs_rat(zlo), abs_rat(zhi));
  Rat tail = detail::atanh_tail_bound(zabs, terms);
  Rat slo = 2 * (detail::atanh_partial(zlo, terms) - tail);
  Rat shi = 2 * (detail::atanh_partial(zhi, terms) + tail);
  Interval lns(slo, shi);
  Interval l2 = ln2_enclosure(bits);
  return (lns + l2 * Rat(e)).rounded(bits);
}

// Enclosure of ln over an interval (monotone).
inline Interval log_enclosure(const Interval& x, unsigned bits = 128) {
  if (x.lo <= 0) throw usage_error("log of enclosure touching zero");
  return Interval(log_enclosure(x.lo, bits).lo, log_enclosure(x.hi, bits).hi);
}

// Enclosure of exp over an interval. Reduces by multiples of ln 2, then the
// Taylor series on |u| <= 1.
inline Interval exp_enclosure(const Interval& t, unsigned bits = 128) {
  auto exp_point = [bits](const Rat& v, bool upper) -> Rat {
    Interval l2 = ln2_enclosure(bits + 16);
    Int k = floor_rat(v / l2.mid());
    Interval u = Interval(v) - l2 * Rat(k);  // v - k ln2, |u| <= ~0.7
    unsigned terms = bits / 3 + 8;
    // series at the directed endpoint of u
    Rat uu = upper ? u.hi : u.lo;
    Int sc = pow2(bits + 32);
    Rat ur(fdiv(num(uu) * sc, den(uu)) + (upper ? 1 : 0), sc);
    Rat term = 1, sum = 1;
    for (unsigned j = 1; j <= terms; ++j) {
      term = term * ur / Rat(j);
      sum += term;
    }
    // |tail| <= |u|^(J+1)/(J+1)! * 1/(1-|u|/(J+2)) <= 2^-(bits+...) by choice
    Rat tb = abs_rat(term) * 2;  // crude but safe: next term <= |term|*|u|/(J+1), |u|<1
    Rat val = upper ? sum + tb : sum - tb;
    // scale by 2^k
    long ke = k.convert_to<long>();
    if (ke >= 0) {
      val *= pow2(static_cast<unsigned>(ke));
    } else {
      val /= pow2(static_cast<unsigned>(-ke));
    }
    return val;
  };
  return Interval(exp_point(t.lo, false), exp_point(t.hi, true)).rounded(bits);
}

}  // namespace slitflow
