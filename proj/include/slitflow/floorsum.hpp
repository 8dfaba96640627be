#pragma once

#include "slitflow/interval.hpp"

namespace slitflow {

// sum_{i=0}^{n-1} floor((a + b*i)/c) for unbounded integers, c > 0, n >= 0.
// Euclidean-style recursion; cost is polylog in the magnitudes.
inline Int floor_sum_int(Int n, Int a, Int b, Int c) {
  if (c <= 0) throw usage_error("floor_sum: modulus must be positive");
  if (n <= 0) return 0;
  Int ans = 0;
  if (b < 0) {
    // substitute i -> n-1-i
    a += b * (n - 1);
    b = -b;
  }
  if (a < 0 || a >= c) {
    Int qa = fdiv(a, c);
    ans += n * qa;
    a -= qa * c;
  }
  if (b >= c) {
    Int qb = b / c;
    ans += qb * (n * (n - 1) / 2);
    b -= qb * c;
  }
  // 0 <= a < c, 0 <= b < c now. Count lattice points under the line:
  // sum_i floor((a+bi)/c) = sum_{j=1..ymax} #{i < n : a + b i >= j c}.
  Int ymax = (a + b * (n - 1)) / c;
  if (ymax == 0) return ans;
  ans += n * ymax;
  ans -= floor_sum_int(ymax, c - a + b - 1, c, b);
  return ans;
}

// sum_{i=1}^{J} floor(g + i*s) for exact rationals; reduces to the integer
// kernel over a common denominator.
inline Int floor_sum_rat(const Int& J, const Rat& g, const Rat& s) {
  if (J <= 0) return 0;
  Int D = den(g) * den(s) / gcd(den(g), den(s));
  Int A = num(g) * (D / den(g));
  Int B = num(s) * (D / den(s));
  // terms i=1..J: floor((A + B*i)/D) = floor(((A+B) + B*(i-1))/D)
  return floor_sum_int(J, A + B, B, D);
}

// Certified count of { i in [1, J] : frac(g + i*s) < x } for enclosed
// arguments, via two monotone floor sums: count = F(x) - F(0) where
// F(t) = sum_i floor(g + i*s) - floor(g + i*s - t). Both sums are monotone
// in their rational arguments, so endpoint evaluations sandwich the count.
// Returns the exact count once the sandwich pins it.
struct FracCount {
  Int lo, hi;
  bool exact() const { return lo == hi; }
};

inline FracCount count_frac_below(const Int& J, const Interval& g, const Interval& s,
                                  const Interval& x) {
  // #(frac < x) = sum_i [floor(u_i) - floor(u_i - x)] with u_i = g + i s.
  // Lower bound: minimize first sum, maximize second.
  Int f1_lo = floor_sum_rat(J, g.lo, s.lo);
  Int f1_hi = floor_sum_rat(J, g.hi, s.hi);
  Int f2_lo = floor_sum_rat(J, g.lo - x.hi, s.lo);
  Int f2_hi = floor_sum_rat(J, g.hi - x.lo, s.hi);
  FracCount out;
  out.lo = f1_lo - f2_hi;
  out.hi = f1_hi - f2_lo;
  if (out.lo < 0) out.lo = 0;
  if (out.hi > J) out.hi = J;
  return out;
}

}  // namespace slitflow
