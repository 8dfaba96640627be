#pragma once

#include <algorithm>
#include <vector>

#include "slitflow/flatsurf.hpp"

namespace slitflow::dynamics {

using flatsurf::Surface;

// Z/2 skew product over the rotation x -> x + P/Q with flip interval
// J = [u, u + b_c). Orbit positions are exact integers modulo a fixed
// denominator; the build certifies that classifications against J agree
// with the true alpha-orbit over the whole horizon.
struct SkewSystem {
  Int P, Q;          // rotation approximant, a convergent of alpha
  long conv_index;   // which convergent (kept even: P/Q < alpha, so the
                     // true-orbit drift off grid points is positive)
  Rat u;             // left end of the flip interval
  Interval b_len;    // certified |J| enclosure
  Int horizon;       // N_max the certification covers
  Rat alpha_gap;     // upper bound for |alpha - P/Q|
  bool degenerate = false;  // empty flip interval (b_c = 0 control)
  const Surface* surface;
};

struct SkewState {
  Rat position;  // in [0,1)
  int sheet = 0;
};

struct Checkpoint {
  Int n;
  Int sheet_zero_count;  // for the control trace: count of observable hits
  Int flips;
};

struct BirkhoffTrace {
  SkewState start;
  Int total_steps;
  std::vector<Checkpoint> checkpoints;
  Int final_flips;

  Rat average_at(size_t i) const {
    return Rat(checkpoints[i].sheet_zero_count, checkpoints[i].n);
  }
};

// Default checkpoint schedule: stage times q_{2k+1} <= N, dyadics from 1024,
// and N itself.
inline std::vector<Int> default_checkpoints(const Surface& s, const Int& N) {
  std::vector<Int> cps;
  for (long k = 1;; ++k) {
    Int q = s.table().convergent(2 * k + 1).q;
    if (q > N) break;
    cps.push_back(q);
  }
  for (Int d = 1024; d <= N; d *= 2) cps.push_back(d);
  cps.push_back(N);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return cps;
}

// Picks a convergent deep enough that N_max * |alpha - P/Q| is far below the
// orbit's spacing scale; the per-orbit boundary check happens in iterate().
inline SkewSystem build_skew(const Surface& s, const Int& n_max,
                             long min_index = 0, bool degenerate = false) {
  if (n_max < 1) throw usage_error("horizon must be >= 1");
  const auto& tab = s.table();
  long idx = std::max<long>(2, min_index);
  for (;; ++idx) {
    if (idx > cfrac::ConvergentTable::kMaxDepth)
      throw precision_error("no convergent certifies the requested horizon");
    Rat gap(1, tab.convergent(idx).q * tab.convergent(idx + 1).q);
    if (idx % 2 == 0 && Rat(n_max) * gap < Rat(1, Int(1) << 60)) break;
  }
  SkewSystem sys;
  sys.conv_index = idx;
  sys.P = tab.convergent(idx).p;
  sys.Q = tab.convergent(idx).q;
  sys.u = 0;
  sys.horizon = n_max;
  sys.alpha_gap = Rat(1, tab.convergent(idx).q * tab.convergent(idx + 1).q);
  sys.degenerate = degenerate;
  sys.b_len = degenerate ? Interval(Rat(0)) : s.b_c(40);
  sys.surface = &s;
  return sys;
}

namespace detail {

// Solves c0 + i*step == target (mod D) for the smallest i in [1, N]; returns
// all such i (arithmetic progression) capped at a few entries.
inline std::vector<Int> hits_of_cell(const Int& c0, const Int& step, const Int& D,
                                     const Int& target, const Int& N) {
  Int g = gcd(step, D);
  Int diff = ((target - c0) % D + D) % D;
  std::vector<Int> out;
  if (diff % g != 0) return out;
  Int D1 = D / g;
  Int s1 = (step / g) % D1;
  Int d1 = (diff / g) % D1;
  // modular inverse of s1 mod D1 (gcd 1 by construction)
  Int t0 = 0, t1 = 1, r0 = D1, r1 = s1;
  while (r1 != 0) {
    Int q = r0 / r1;
    Int tmp = t0 - q * t1;
    t0 = t1; t1 = tmp;
    tmp = r0 - q * r1;
    r0 = r1; r1 = tmp;
  }
  Int inv = ((t0 % D1) + D1) % D1;
  Int i0 = (d1 * inv) % D1;
  if (i0 == 0) i0 = D1;
  for (Int i = i0; i <= N; i += D1) {
    out.push_back(i);
    if (out.size() > 8) break;
  }
  return out;
}

}  // namespace detail

// Exact orbit iteration with flip-before-step convention:
//   (x, s) -> (x + P/Q mod 1, s XOR [x in J]).
// Runs on integers modulo D = lcm(Q, den(u), den(start)); certifies that
// every classification matches the true alpha-rotation orbit, raising
// boundary_ambiguity_error (with the step index) when an orbit point lands
// inside the uncertainty band of the interval boundary.
inline BirkhoffTrace iterate(const SkewSystem& sys, const SkewState& start,
                             const Int& n_steps, std::vector<Int> checkpoints) {
  if (n_steps > sys.horizon)
    throw usage_error("step count exceeds the certified horizon");
  if (start.position < 0 || start.position >= 1)
    throw usage_error("start position must lie in [0,1)");

  Int D = lcm(lcm(sys.Q, den(sys.u)), den(start.position));
  Int step = sys.P * (D / sys.Q);
  Int c0 = num(start.position) * (D / den(start.position));
  Int uScaled = num(sys.u) * (D / den(sys.u));

  // Pin Kstar = floor(b_c * D) exactly, refining b if needed. J = [u, u+b)
  // scaled to the grid: flip iff (c - uD) mod D <= Kstar (b*D is irrational,
  // never on the grid). The degenerate control has an empty interval.
  Interval b = sys.b_len;
  Int Kstar = -1;
  if (!sys.degenerate) {
    long d = 40;
    while (true) {
      Interval bd = b * Rat(D);
      Int flo = floor_rat(bd.lo), fhi = floor_rat(bd.hi);
      if (flo == fhi) {
        Kstar = flo;
        break;
      }
      d += 16;
      if (d > cfrac::ConvergentTable::kMaxDepth)
        throw boundary_ambiguity_error("flip boundary not separable from the grid", 0);
      b = sys.surface->b_c(d);
    }
  }

  // Certify agreement with the true alpha-orbit: only steps whose position
  // lands in a cell adjacent to a boundary of J could classify differently;
  // check the exact circle distance there against N*|alpha - P/Q|. A point
  // exactly on the left boundary is safe: the even-index convergent makes
  // the true orbit drift into J.
  if (!sys.degenerate) {
    Rat eps = Rat(n_steps) * sys.alpha_gap;
    auto circle_dist = [](const Rat& a) {
      Rat f = a - Rat(floor_rat(a));
      return std::min(f, Rat(1) - f);
    };
    auto check_target = [&](const Int& cell) {
      for (const Int& i : detail::hits_of_cell(c0, step, D, ((cell % D) + D) % D, n_steps)) {
        Int ci = (c0 + i * step) % D;
        Rat x(ci, D);
        Rat du = circle_dist(x - sys.u);
        if (du != 0 && du <= eps * 2)
          throw boundary_ambiguity_error("orbit point within uncertainty of interval start",
                                         i.convert_to<unsigned long long>());
        Interval db = (Interval(x - sys.u) - b).abs();
        if (!(db.lo > eps * 2)) {
          Interval fine = sys.surface->b_c(96);
          Interval d2 = (Interval(x - sys.u) - fine).abs();
          if (!(d2.lo > eps * 2))
            throw boundary_ambiguity_error("orbit point within uncertainty of interval end",
                                           i.convert_to<unsigned long long>());
        }
      }
    };
    check_target(uScaled - 1);
    check_target(uScaled);
    check_target(uScaled + Kstar);
    check_target(uScaled + Kstar + 1);
  }

  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  BirkhoffTrace tr;
  tr.start = start;
  tr.total_steps = n_steps;

  // Hot loop in machine words when the modulus fits.
  bool fits64 = D < (Int(1) << 62) && n_steps < (Int(1) << 62);
  if (fits64) {
    using u64 = unsigned long long;
    u64 d = D.convert_to<u64>();
    u64 st = step.convert_to<u64>();
    u64 c = c0.convert_to<u64>();
    u64 lo = uScaled.convert_to<u64>();
    long long kst = Kstar.convert_to<long long>();
    u64 n = n_steps.convert_to<u64>();
    int sheet = start.sheet;
    u64 count0 = 0, flips = 0;
    size_t cp = 0;
    std::vector<u64> cps;
    cps.reserve(checkpoints.size());
    for (auto& q : checkpoints)
      if (q <= n_steps && q >= 1) cps.push_back(q.convert_to<u64>());
    for (u64 i = 1; i <= n; ++i) {
      u64 rel = c - lo;
      if (c < lo) rel = c + d - lo;
      if (kst >= 0 && rel <= static_cast<u64>(kst)) {
        sheet ^= 1;
        ++flips;
      }
      c += st;
      if (c >= d) c -= d;
      if (sheet == 0) ++count0;
      if (cp < cps.size() && i == cps[cp]) {
        tr.checkpoints.push_back({Int(i), Int(count0), Int(flips)});
        ++cp;
      }
    }
    tr.final_flips = Int(flips);
  } else {
    Int c = c0;
    int sheet = start.sheet;
    Int count0 = 0, flips = 0;
    size_t cp = 0;
    for (Int i = 1; i <= n_steps; ++i) {
      Int rel = (c - uScaled % D + D) % D;
      if (rel <= Kstar) {
        sheet ^= 1;
        ++flips;
      }
      c = (c + step) % D;
      if (sheet == 0) ++count0;
      if (cp < checkpoints.size() && i == checkpoints[cp]) {
        tr.checkpoints.push_back({i, count0, flips});
        ++cp;
      }
    }
    tr.final_flips = flips;
  }
  return tr;
}

// Control trace: same rotation orbit, observable = indicator of [0, 1/2),
// no sheets. Re-uses the Checkpoint layout with counts of observable hits.
inline BirkhoffTrace control_rotation(const SkewSystem& sys, const SkewState& start,
                                      const Int& n_steps, std::vector<Int> checkpoints) {
  if (n_steps > sys.horizon)
    throw usage_error("step count exceeds the certified horizon");
  Int D = lcm(lcm(sys.Q, den(sys.u)), den(start.position));
  // make the half-interval boundary exact on the grid
  if (D % 2 != 0) D *= 2;
  Int step = sys.P * (D / sys.Q);
  Int c0 = num(start.position) * (D / den(start.position));
  Int half = D / 2;

  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  BirkhoffTrace tr;
  tr.start = start;
  tr.total_steps = n_steps;
  tr.final_flips = 0;

  using u64 = unsigned long long;
  if (D < (Int(1) << 62)) {
    u64 d = D.convert_to<u64>(), st = step.convert_to<u64>(), c = c0.convert_to<u64>();
    u64 h = half.convert_to<u64>(), n = n_steps.convert_to<u64>();
    u64 cnt = 0;
    size_t cp = 0;
    std::vector<u64> cps;
    for (auto& q : checkpoints)
      if (q <= n_steps && q >= 1) cps.push_back(q.convert_to<u64>());
    for (u64 i = 1; i <= n; ++i) {
      if (c < h) ++cnt;
      c += st;
      if (c >= d) c -= d;
      if (cp < cps.size() && i == cps[cp]) {
        tr.checkpoints.push_back({Int(i), Int(cnt), Int(0)});
        ++cp;
      }
    }
  } else {
    Int c = c0, cnt = 0;
    size_t cp = 0;
    for (Int i = 1; i <= n_steps; ++i) {
      if (c < half) ++cnt;
      c = (c + step) % D;
      if (cp < checkpoints.size() && i == checkpoints[cp]) {
        tr.checkpoints.push_back({i, cnt, Int(0)});
        ++cp;
      }
    }
  }
  return tr;
}

struct OscillationStats {
  Rat max_avg, min_avg, amplitude;
  size_t used_checkpoints = 0;
  Rat control_amplitude;
  bool has_control = false;
};

// Max/min/amplitude of the running averages over post-burn-in checkpoints.
inline OscillationStats oscillation_stats(const BirkhoffTrace& trace, const Int& burn_in,
                                          const BirkhoffTrace* control = nullptr) {
  OscillationStats st;
  bool first = true;
  for (size_t i = 0; i < trace.checkpoints.size(); ++i) {
    if (trace.checkpoints[i].n < burn_in) continue;
    Rat a = trace.average_at(i);
    if (first) {
      st.max_avg = st.min_avg = a;
      first = false;
    } else {
      st.max_avg = std::max(st.max_avg, a);
      st.min_avg = std::min(st.min_avg, a);
    }
    ++st.used_checkpoints;
  }
  if (st.used_checkpoints < 3)
    throw usage_error("need at least 3 post-burn-in checkpoints for oscillation stats");
  st.amplitude = st.max_avg - st.min_avg;
  if (control) {
    Rat mx, mn;
    bool f2 = true;
    for (size_t i = 0; i < control->checkpoints.size(); ++i) {
      if (control->checkpoints[i].n < burn_in) continue;
      Rat a = control->average_at(i);
      if (f2) {
        mx = mn = a;
        f2 = false;
      } else {
        mx = std::max(mx, a);
        mn = std::min(mn, a);
      }
    }
    if (!f2) {
      st.control_amplitude = mx - mn;
      st.has_control = true;
    }
  }
  return st;
}

}  // namespace slitflow::dynamics
