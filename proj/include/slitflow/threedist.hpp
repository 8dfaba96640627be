#pragma once

#include <functional>
#include <vector>

#include "slitflow/interval.hpp"

namespace slitflow {

// A real number in (0,1) given by a refinable enclosure: eval(level) must
// return nested (or at least shrinking) intervals as level grows. Levels are
// abstract; implementations map them to continued-fraction depths or series
// truncations.
using RefinableReal = std::function<Interval(int)>;

constexpr int kRefineMax = 64;

// Continued-fraction expansion of an enclosed irrational in (0,1): digits are
// extracted from the interval Gauss map, refining the input whenever a digit
// or a convergent is not yet determined.
class IntervalCF {
 public:
  explicit IntervalCF(RefinableReal x) : x_(std::move(x)) {}

  struct Conv {
    Int p, q;
  };

  // Convergents p_0/q_0 = 0/1 up to the first with q > limit. Also exposes
  // the virtual index -1 convergent (1, 0) used by gap formulas.
  const std::vector<Conv>& convergents_until_q_exceeds(const Int& limit) {
    while (convs_.back().q <= limit) step();
    return convs_;
  }

  // Certified |q x - p| for an entry of the convergents list (the virtual
  // (1,0) entry evaluates to exactly 1).
  Interval eta(size_t idx) {
    const Conv& c = convs_.at(idx);
    for (int lvl = level_; lvl <= kRefineMax; ++lvl) {
      Interval e = (value_at(lvl) * Rat(c.q) - Rat(c.p)).abs();
      level_ = lvl;
      if (e.lo > 0) return e;
    }
    throw precision_error("cannot certify eta for continued-fraction convergent");
  }

 private:
  Interval value_at(int lvl) { return x_(lvl); }

  void step() {
    // next digit a = floor(1/y) where y is the current Gauss-map tail
    for (int lvl = level_; lvl <= kRefineMax; ++lvl) {
      Interval y = tail_of(value_at(lvl));
      if (y.lo > 0) {
        Int flo = floor_rat(Rat(1) / y.hi);
        Int fhi = floor_rat(Rat(1) / y.lo);
        if (flo == fhi && flo >= 1) {
          digits_.push_back(flo);
          size_t n = convs_.size();
          Conv next{flo * convs_[n - 1].p + convs_[n - 2].p,
                    flo * convs_[n - 1].q + convs_[n - 2].q};
          convs_.push_back(next);
          level_ = lvl;
          return;
        }
      }
      level_ = lvl;
    }
    throw resource_error("continued-fraction digit not determined within refinement budget");
  }

  // Enclosure of the current Gauss-map tail from a fresh enclosure of x,
  // via the exact Mobius form tail = -(q_n x - p_n)/(q_{n-1} x - p_{n-1}).
  Interval tail_of(const Interval& x) {
    size_t n = convs_.size() - 1;
    Interval a = x * Rat(convs_[n].q) - Rat(convs_[n].p);
    Interval b = x * Rat(convs_[n - 1].q) - Rat(convs_[n - 1].p);
    if (!b.sign_definite()) return Interval(Rat(0), Rat(1));
    Interval t = -(a / b);
    if (t.lo < 0) t.lo = 0;
    if (t.hi > 1) t.hi = 1;
    return t;
  }

  RefinableReal x_;
  int level_ = 0;
  std::vector<Int> digits_;
  std::vector<Conv> convs_{{Int(1), Int(0)}, {Int(0), Int(1)}};  // virtual -1, then 0
};

// Three-distance census for the points {0, b, 2b, ..., Nb} mod 1. The circle
// splits into N+1 arcs of at most three certified lengths with exact integer
// multiplicities:
//   eta_m               x (N + 1 - q_m)
//   eta_{m-1} - c eta_m x (s + 1)
//   eta_{m-1} - (c-1) eta_m x (q_m - s - 1)
// where m is maximal with q_m + q_{m-1} <= N and N = c q_m + q_{m-1} + s.
struct GapCensus {
  struct Entry {
    Interval length;
    Int multiplicity;
  };
  std::vector<Entry> entries;
  Interval max_gap;
  Int m_index = 0;  // CF level used
};

inline GapCensus gap_census(IntervalCF& cf, const Int& N) {
  if (N < 1) throw usage_error("gap census needs N >= 1");
  const auto& convs = cf.convergents_until_q_exceeds(N);
  // Find largest real index m (list offset by 1 for the virtual entry) with
  // q_m + q_{m-1} <= N.
  size_t mi = 0;
  for (size_t i = convs.size() - 1; i >= 1; --i) {
    if (convs[i].q + convs[i - 1].q <= N) {
      mi = i;
      break;
    }
    if (i == 1) throw precision_error("gap census: no admissible convergent level");
  }
  const Int& qm = convs[mi].q;
  const Int& qm1 = convs[mi - 1].q;
  Int c = fdiv(N - qm1, qm);
  Int s = N - c * qm - qm1;
  if (c < 1 || s < 0 || s >= qm)
    throw precision_error("gap census decomposition failed");

  Interval em = cf.eta(mi);
  Interval em1 = cf.eta(mi - 1);

  GapCensus out;
  out.m_index = Int(static_cast<long>(mi));
  Int mult1 = N + 1 - qm;
  Int mult2 = s + 1;
  Int mult3 = qm - s - 1;
  if (mult1 > 0) out.entries.push_back({em, mult1});
  if (mult2 > 0) out.entries.push_back({em1 - em * Rat(c), mult2});
  if (mult3 > 0) out.entries.push_back({em1 - em * Rat(c - 1), mult3});
  Interval mx = out.entries.front().length;
  for (const auto& e : out.entries)
    if (e.length.hi > mx.hi) mx = e.length;
  // The reported max gap must CONTAIN the true maximum: lower endpoint is the
  // max of lower endpoints (the true max is at least the largest length's lo).
  Rat lo_best = out.entries.front().length.lo;
  for (const auto& e : out.entries) lo_best = std::max(lo_best, e.length.lo);
  out.max_gap = Interval(lo_best, mx.hi);
  return out;
}

// Smallest certified N with max_gap(N) <= ell.lo; any such N is a valid
// covering bound. Exponential bracket then binary search; the census is
// monotone (adding points never increases the max gap).
inline Int min_points_for_gap(const RefinableReal& beta, const Interval& ell,
                              const Int& n_cap) {
  if (!(ell.lo > 0)) throw usage_error("arc length must be certainly positive");
  IntervalCF cf(beta);
  auto covered = [&](const Int& N) {
    GapCensus g = gap_census(cf, N);
    return g.max_gap.hi <= ell.lo;
  };
  Int lo = 1, hi = 1;
  while (!covered(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > n_cap) throw resource_error("covering bound exceeds configured cap");
  }
  while (lo + 1 < hi) {
    Int mid = (lo + hi) / 2;
    if (covered(mid)) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace slitflow
