#pragma once

#include <map>
#include <memory>

#include "slitflow/flatsurf.hpp"
#include "slitflow/threedist.hpp"

namespace slitflow::flatsurf {

namespace detail {

// Refinable enclosure of beta = alpha + xhat(w)/|n| (the base-circle step of
// the strand progression of w), with per-level memoization. Levels map to
// convergent depths 6, 10, 14, ...
inline RefinableReal strand_step(const Surface& s, const CosetVec& w) {
  Int nabs = w.n < 0 ? Int(-w.n) : w.n;
  auto cache = std::make_shared<std::map<int, Interval>>();
  return [&s, w, nabs, cache](int level) {
    auto it = cache->find(level);
    if (it != cache->end()) return it->second;
    long depth = 6 + 4L * level;
    if (depth > Surface::kDepthMax * 4)
      throw resource_error("strand step refinement exhausted");
    Interval xh = s.xhat(w, depth);
    if (w.n < 0) xh = -xh;
    Interval beta = s.alpha(depth) + xh / Rat(nabs);
    // normalize into (0,1); alpha is already there and the perturbation tiny
    if (beta.lo < 0 || beta.hi > 1) {
      Int k = floor_rat(beta.lo);
      beta = beta - Rat(k);
    }
    cache->emplace(level, beta);
    return beta;
  };
}

inline RefinableReal alpha_refinable(const Surface& s) {
  auto cache = std::make_shared<std::map<int, Interval>>();
  return [&s, cache](int level) {
    auto it = cache->find(level);
    if (it != cache->end()) return it->second;
    Interval a = s.alpha(6 + 4L * level);
    cache->emplace(level, a);
    return a;
  };
}

}  // namespace detail

// Maximum horizontal gap, at time t_observe, between the strands of the
// later curve zeta_j crossing the horizontal base circle. The crossing
// abscissae are the progression {i*beta mod 1 : 0 <= i <= |n_j|} scaled by
// the base-circle circumference q_{2*observe+1}; the maximum spacing comes
// from the exact three-distance census of that progression.
inline Interval horizontal_gap_max(const Surface& s, long observe_k, long curve_j,
                                   const Int& strand_cap = Int(1) << 200) {
  if (observe_k < 1) throw usage_error("observe stage must be >= 1");
  if (curve_j <= observe_k)
    throw usage_error("horizontal gaps need the near-vertical regime curve_j > observe_k");
  SaddleConnection zeta = slit_curve(s, curve_j);
  Int nabs = zeta.vec.n < 0 ? Int(-zeta.vec.n) : zeta.vec.n;
  if (nabs == 0) throw precision_error("curve has no vertical strands");
  if (nabs > strand_cap) throw resource_error("strand count exceeds configured limit");
  IntervalCF cf(detail::strand_step(s, zeta.vec));
  GapCensus census = gap_census(cf, nabs);
  Rat circumference(s.table().convergent(2 * observe_k + 1).q);
  return census.max_gap * circumference;
}

// Certified upper bound for the maximum vertical distance from any point of
// the surface at time t_observe to the earlier curve zeta_j: the first
// strand's horizontal shadow is an arc of length xhat/|n| (the full extent
// when the curve is horizontal); once the rotation orbit enters the arc the
// vertical line crosses the curve within one strip of height 1/r.
inline Interval vertical_gap_upper(const Surface& s, long curve_j, long observe_k,
                                   const Int& step_cap = Int(1) << 200) {
  if (curve_j < 1 || observe_k < 1) throw usage_error("stage indices must be >= 1");
  SaddleConnection zeta = slit_curve(s, curve_j);
  Int nabs = zeta.vec.n < 0 ? Int(-zeta.vec.n) : zeta.vec.n;

  // Shadow arc length (normalized): |xhat| / max(n,1).
  long d = 48;
  Interval xh = s.xhat(zeta.vec, d).abs();
  Interval arc = (nabs == 0) ? xh : xh * Rat(1, nabs);
  if (!(arc.lo > 0)) {
    d = 96;
    xh = s.xhat(zeta.vec, d).abs();
    arc = (nabs == 0) ? xh : xh * Rat(1, nabs);
  }
  Int cover_steps = min_points_for_gap(detail::alpha_refinable(s), arc, step_cap);
  Rat r(s.table().convergent(2 * observe_k + 1).q);
  Rat ub = Rat(cover_steps + 2) / r;
  return Interval(Rat(0), ub);
}

struct FillingEvidence {
  bool filled = false;
  bool checked = false;
  std::string note;
  Interval horizontal_gap;   // later curve, at the midpoint stage
  Interval vertical_gap;     // earlier curve, upper bound
  Interval systole_mid;
  Interval theta_diagnostic; // horizontal gap rescaled by e^{t_{k-1} - t_mid}
};

// Grid criterion for propfill: at the midpoint stage time, the maximum
// horizontal gap of the later curve plus the maximum vertical gap of the
// earlier curve must be less than half the systole; any essential loop
// avoiding both curves would have to fit inside one grid cell.
inline FillingEvidence filling_check(const Surface& s, long j, long k) {
  FillingEvidence ev;
  if (j == k) {
    ev.note = "same curve, self-gaps unbounded in one direction";
    ev.checked = true;
    return ev;
  }
  if (j > k) std::swap(j, k);
  long mid = (j + k) / 2;
  if (mid <= j || k <= mid) {
    ev.note = "stages too close for a midpoint grid";
    ev.checked = true;
    return ev;
  }
  ev.horizontal_gap = horizontal_gap_max(s, mid, k);
  ev.vertical_gap = vertical_gap_upper(s, j, mid);
  ev.systole_mid = systole(s, FlowTime::log_of(Rat(s.table().convergent(2 * mid + 1).q))).lattice;
  Interval sum = ev.horizontal_gap + ev.vertical_gap;
  ev.filled = sum.hi < ev.systole_mid.lo / 2;
  ev.checked = true;
  // Theta(1) diagnostic: undo the flow from the stage before the curve's own.
  Rat undo(s.table().convergent(2 * (k - 1) + 1).q, s.table().convergent(2 * mid + 1).q);
  ev.theta_diagnostic = ev.horizontal_gap * undo;
  return ev;
}

}  // namespace slitflow::flatsurf
