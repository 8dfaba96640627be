#pragma once

#include <utility>

#include "slitflow/flatsurf.hpp"
#include "slitflow/floorsum.hpp"

namespace slitflow::flatsurf {

namespace detail {

// Certified sum of floor(c + s*n) over an integer row band [n1, n2] that lies
// entirely in n >= 1 or entirely in n <= -1 (monotonicity in the slope needs
// a fixed sign of the multiplier).
struct IntRange {
  Int lo, hi;
  bool exact() const { return lo == hi; }
};

inline IntRange banded_floor_sum(const Int& n1, const Int& n2, const Interval& c,
                                 const Interval& s) {
  IntRange r{0, 0};
  if (n1 > n2) return r;
  Int J = n2 - n1 + 1;
  if (n1 >= 1) {
    // term_i = floor(c + s*(n1-1) + s*i), i = 1..J, all multipliers positive
    r.lo = floor_sum_rat(J, c.lo + s.lo * Rat(n1 - 1), s.lo);
    r.hi = floor_sum_rat(J, c.hi + s.hi * Rat(n1 - 1), s.hi);
  } else if (n2 <= -1) {
    // substitute n = -n'': decreasing in s
    Int m1 = -n2, m2 = -n1;  // positive range
    r.lo = floor_sum_rat(m2 - m1 + 1, c.lo - s.hi * Rat(m1 - 1), -s.hi);
    r.hi = floor_sum_rat(m2 - m1 + 1, c.hi - s.lo * Rat(m1 - 1), -s.lo);
  } else {
    throw usage_error("banded_floor_sum: band must not straddle zero");
  }
  return r;
}

// Count of lattice points (m - n*alpha, n) in the open parallelogram
// { lambda*u - mu*v : lambda, mu in (0,1) } at a given refinement depth.
// Returns an integer range; the caller refines until it pins.
struct ParallelogramCounter {
  const Surface* s;
  CosetVec u, v;  // canonical: n >= 0; if n == 0 then xhat > 0

  IntRange count(long depth) const {
    Interval alpha = s->alpha(depth);
    Interval xu = s->xhat(u, depth), xv = s->xhat(v, depth);
    const Int &nu = u.n, &nv = v.n;

    if (nu == 0) {
      // rows n = -nv+1 .. -1; slice (n*xv/nv, n*xv/nv + xu) in m - n*alpha
      if (nv == 0) throw usage_error("parallel horizontal curves do not bound area");
      Interval slope = alpha + xv * Rat(1, nv);
      IntRange hiR = banded_floor_sum(1 - nv, Int(-1), xu, slope);
      IntRange loR = banded_floor_sum(1 - nv, Int(-1), Interval(Rat(0)), slope);
      return {hiR.lo - loR.hi, hiR.hi - loR.lo};
    }

    // Both strips vertical-ish: slice at height n is
    //   A(n) = max(E1, E3),  B(n) = min(E2, E4)
    // with the max/min switching exactly at heights 0 and nu - nv.
    Interval su = xu * Rat(1, nu);        // slope of u-direction edges
    Interval sv = xv * Rat(1, nv);        // slope of v-direction edges
    Interval e2off = su * Rat(nv) - xv;   // E2(n) = su*n + e2off
    Interval e4off = xu - sv * Rat(nu);   // E4(n) = sv*n + e4off

    Int hW = nu - nv;
    Int ytop = nu, ybot = -nv;

    // Row n in (ybot, ytop): A-edge is E3 (slope sv, offset 0) for n < 0,
    // E1 (slope su, offset 0) for n > 0. B-edge is E2 for n < hW, E4 for
    // n > hW. Special rows: 0 and hW.
    IntRange total{0, 0};
    auto add = [&](const IntRange& r, int sign) {
      if (sign > 0) {
        total.lo += r.lo;
        total.hi += r.hi;
      } else {
        total.lo -= r.hi;
        total.hi -= r.lo;
      }
    };

    auto band = [&](const Int& a, const Int& b) {
      // rows a..b, excluding special rows handled by the caller
      if (a > b) return;
      // B side: E2 below the W corner row, E4 above it
      if (b < hW) {
        add(banded_floor_sum(a, b, e2off, alpha + su), +1);
      } else if (a > hW) {
        add(banded_floor_sum(a, b, e4off, alpha + sv), +1);
      } else {
        throw usage_error("band straddles corner row");
      }
      // A side
      if (b < 0) {
        add(banded_floor_sum(a, b, Interval(Rat(0)), alpha + sv), -1);
      } else if (a > 0) {
        add(banded_floor_sum(a, b, Interval(Rat(0)), alpha + su), -1);
      } else {
        throw usage_error("band straddles origin row");
      }
    };

    // Split (ybot, ytop) at {0, hW} into maximal bands.
    std::vector<Int> cuts;
    cuts.push_back(Int(0));
    if (hW != 0) cuts.push_back(hW);
    std::sort(cuts.begin(), cuts.end());
    Int lo = ybot + 1;
    for (const Int& c : cuts) {
      if (c > ybot && c < ytop) {
        band(lo, c - 1);
        lo = c + 1;
      }
    }
    band(lo, ytop - 1);

    // Special row n = 0 (corner O at its left/right end): slice is
    // (0, min(E2,E4)(0)) so m runs over 1..floor(B(0)) exactly.
    {
      Interval B0 = (hW > 0) ? e2off : (hW < 0 ? e4off : e2off);
      if (hW == 0) {
        // both corners on this row: m in (0, m_u - m_v) exactly
        Int mW = u.m - v.m;
        Int cnt = mW - 1;
        if (cnt < 0) {
          // orientation with negative corner offset: m in (mW, 0)
          cnt = -mW - 1;
        }
        add(IntRange{cnt, cnt}, +1);
      } else {
        Int flo = floor_rat(B0.lo), fhi = floor_rat(B0.hi);
        IntRange r{flo < 0 ? Int(0) : flo, fhi < 0 ? Int(0) : fhi};
        add(r, +1);
      }
    }

    // Special row n = hW (corner W): slice is (A(hW), xhat_W) where the
    // right end is exactly the lattice point m_u - m_v; m runs over
    // floor(A(hW) + hW*alpha)+1 .. (m_u - m_v) - 1.
    if (hW != 0 && hW > ybot && hW < ytop) {
      Int mW = u.m - v.m;
      Interval A = (hW < 0) ? (alpha + sv) * Rat(hW) : (alpha + su) * Rat(hW);
      // count = (mW - 1) - floor(A)
      Int flo = floor_rat(A.lo), fhi = floor_rat(A.hi);
      add(IntRange{mW - 1 - fhi, mW - 1 - flo}, +1);
    }

    if (total.lo < 0) total.lo = 0;
    return total;
  }
};

}  // namespace detail

// Geometric intersection count of the closed curves obtained by doubling the
// stage connections zeta_j, zeta_k across the two sheets. Every transverse
// planar crossing of the underlying segments contributes exactly two
// crossings on the double cover (the sheet-matching pairs of the four copy
// combinations), so the result is twice the open-parallelogram lattice
// count. Crossings at the shared branch points are excluded by the open
// convention; the count may undercount the pointed minimal position by at
// most 2 there.
inline Int intersection_number(const Surface& s, long j, long k,
                               long dmax = Surface::kDepthMax) {
  if (j < 1 || k < 1) throw usage_error("curve indices must be >= 1");
  if (j == k) return 0;
  if (j > k) std::swap(j, k);

  auto canonical = [](CosetVec w) {
    if (w.n < 0 || (w.n == 0 && w.sigma < 0)) {
      w.sigma = -w.sigma;
      w.m = -w.m;
      w.n = -w.n;
    }
    return w;
  };
  CosetVec u = canonical(slit_curve(s, j).vec);
  CosetVec v = canonical(slit_curve(s, k).vec);

  // Orient so X = cross(u, v) = xu*nv - nu*xv > 0; a horizontal curve (only
  // zeta-type with n = 0, xhat = b_c > 0) already gives X > 0 as u.
  if (u.n != 0 && v.n == 0) std::swap(u, v);
  if (u.n != 0) {
    int xs = detail::certified_sign(
        [&](long d) {
          return s.xhat(u, d) * Rat(v.n) - s.xhat(v, d) * Rat(u.n);
        },
        Surface::kDepth0, dmax, "parallelogram orientation");
    if (xs == 0) throw precision_error("parallel slit curves have no transverse count");
    if (xs < 0) std::swap(u, v);
  }

  detail::ParallelogramCounter pc{&s, u, v};
  for (long d = 16; d <= dmax; d = d + (d < 32 ? 8 : d / 2)) {
    try {
      detail::IntRange r = pc.count(d);
      if (r.exact()) return 2 * r.lo;
    } catch (const precision_error&) {
    }
  }
  throw precision_error("intersection count not pinned within depth budget");
}

}  // namespace slitflow::flatsurf
