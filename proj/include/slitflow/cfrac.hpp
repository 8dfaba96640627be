#pragma once

#include <functional>
#include <mutex>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "slitflow/interval.hpp"
#include "slitflow/logexp.hpp"

namespace slitflow::cfrac {

// Partial-quotient rule a_k, k >= 1. The default is a_k = k^2; arbitrary
// rules are allowed for control experiments and must return values >= 1.
struct CoefficientSequence {
  std::string id;
  std::function<Int(long)> rule;

  static CoefficientSequence squares() {
    return {"squares", [](long k) { return Int(k) * k; }};
  }

  Int at(long k) const {
    if (k < 1) throw usage_error("coefficient index must be >= 1");
    Int a = rule(k);
    if (a < 1) throw usage_error("partial quotient a_k < 1 at k=" + std::to_string(k));
    return a;
  }
};

struct Convergent {
  long k = 0;
  Int p, q;
};

// Memoized convergent table for one coefficient sequence. Reads are shared,
// extension of the memo is serialized; results are value types so the table
// can be queried from any number of workers.
class ConvergentTable {
 public:
  explicit ConvergentTable(CoefficientSequence seq = CoefficientSequence::squares())
      : seq_(std::move(seq)) {
    memo_.push_back({0, Int(0), Int(1)});
    Int a1 = seq_.at(1);
    memo_.push_back({1, Int(1), a1});
  }

  const CoefficientSequence& sequence() const { return seq_; }

  Int coefficient(long k) const { return seq_.at(k); }

  Convergent convergent(long k) const {
    if (k < 0) throw usage_error("convergent index must be >= 0");
    {
      std::shared_lock rl(mtx_);
      if (static_cast<size_t>(k) < memo_.size()) return memo_[k];
    }
    std::unique_lock wl(mtx_);
    while (static_cast<size_t>(k) >= memo_.size()) {
      long n = static_cast<long>(memo_.size());
      Int a = seq_.at(n);
      const Convergent& c1 = memo_[n - 1];
      const Convergent& c2 = memo_[n - 2];
      memo_.push_back({n, a * c1.p + c2.p, a * c1.q + c2.q});
    }
    return memo_[k];
  }

  // Enclosure of alpha from consecutive convergents K, K+1; width bounded by
  // 1/(q_K q_{K+1}), and enclosures are nested in K.
  Interval alpha(long depth) const {
    if (depth < 1) throw usage_error("alpha enclosure needs depth >= 1");
    Convergent a = convergent(depth), b = convergent(depth + 1);
    return Interval::hull(Rat(a.p, a.q), Rat(b.p, b.q));
  }

  // Smallest depth whose enclosure width is <= target (q_k grows
  // super-exponentially, so this is always small).
  long depth_for_width(const Rat& target) const {
    if (target <= 0) throw usage_error("width target must be positive");
    for (long k = 1; k <= kMaxDepth; ++k) {
      if (Rat(1, convergent(k).q * convergent(k + 1).q) <= target) return k;
    }
    throw precision_error("no convergent depth reaches requested width");
  }

  // Certified enclosure of q_k alpha - p_k with determined sign.
  Interval signed_error(long k, long max_depth = kMaxDepth) const {
    if (k < 1) throw usage_error("signed_error index must be >= 1");
    for (long d = k + 1; d <= max_depth; d += 2) {
      Convergent c = convergent(k);
      Interval e = alpha(d) * Rat(c.q) - Rat(c.p);
      if (e.sign_definite()) return e;
    }
    throw precision_error("cannot separate q_k alpha - p_k from zero");
  }

  Interval eta(long k, long max_depth = kMaxDepth) const {
    return signed_error(k, max_depth).abs();
  }

  static constexpr long kMaxDepth = 400;

 private:
  CoefficientSequence seq_;
  mutable std::vector<Convergent> memo_;
  mutable std::shared_mutex mtx_;
};

// Weight pattern for the slit-constant family b_c. Weights are half-integers
// in {1/2, 1, 3/2} so every partial sum of the series stays in Z + Z*alpha;
// the first `heavy_prefix` terms carry 1 +/- 1/2 and the rest weight 1, with
// w_j(c) + w_j(-c) = 2 termwise. |c| = 1/2 marks the all-heavy pattern.
struct SlitWeights {
  Rat c = 0;
  Int heavy_prefix = 0;  // -1 means every term
  int direction = 0;     // +1 heavy (3/2), -1 light (1/2)

  static SlitWeights for_c(const Rat& c) {
    SlitWeights w;
    w.c = c;
    Rat a = abs_rat(c);
    if (a > Rat(1, 2)) throw usage_error("c outside representable family [-1/2, 1/2]");
    if (c == 0) return w;
    w.direction = (c > 0) ? 1 : -1;
    if (a == Rat(1, 2)) {
      w.heavy_prefix = -1;
    } else {
      w.heavy_prefix = floor_rat(Rat(1) / (Rat(1) - 2 * a));
    }
    return w;
  }

  Rat weight(long j) const {
    if (direction == 0) return Rat(1);
    bool in_prefix = (heavy_prefix < 0) || (Int(j) <= heavy_prefix);
    if (!in_prefix) return Rat(1);
    return direction > 0 ? Rat(3, 2) : Rat(1, 2);
  }

  // Weight of every term beyond any finite truncation (for tail bounds).
  Rat tail_weight() const { return heavy_prefix < 0 ? weight(1) : Rat(1); }
};

// Certified enclosure of b = 2 sum_j w_j |q_{2j+1} alpha - p_{2j+1}|.
struct BValue {
  Interval enclosure;
  long truncation_index = 0;  // J: terms j = 1..J summed exactly
  Rat tail_bound;             // >= 2 sum_{j>J} w_j |...|
};

inline BValue compute_b(const ConvergentTable& tab, const Rat& tolerance,
                        const SlitWeights& weights = SlitWeights{}) {
  if (tolerance <= 0) throw usage_error("tolerance must be positive");
  // Truncation: 2 sum_{j>J} w_j eta_{2j+1} <= 2*w*sum_{j>J} 1/q_{2j+2}
  // and the q's at least double, so the tail is < 4*w/q_{2J+4}.
  // J and the alpha depth are chosen by weight-independent rules (weight
  // capped at 3/2) so b_c and b_{-c} share J and the per-term enclosures;
  // the averaging identity then holds exactly at the interval level.
  long J = 1;
  if (weights.heavy_prefix >= 0)
    J = std::max<long>(J, weights.heavy_prefix.convert_to<long>());
  const Rat wcap(3, 2);
  while (Rat(4) * wcap / Rat(tab.convergent(2 * J + 4).q) >= tolerance / 2) ++J;
  Rat tail_bound = Rat(4) * weights.tail_weight() / Rat(tab.convergent(2 * J + 4).q);

  // Per-term alpha depth: total partial-sum width <= tolerance/2. The depth
  // rule must not depend on the weights so that b_c and b_{-c} share the
  // exact same term enclosures (the averaging identity is then exact).
  Rat per_term = tolerance / (4 * Rat(J + 1) * 2);
  Rat need = per_term / Rat(tab.convergent(2 * J + 1).q);
  long depth = tab.depth_for_width(need);

  Interval sum(Rat(0));
  for (long j = 1; j <= J; ++j) {
    Convergent c = tab.convergent(2 * j + 1);
    Interval err = tab.alpha(std::max(depth, 2 * j + 2)) * Rat(c.q) - Rat(c.p);
    if (!err.sign_definite())
      throw precision_error("b term sign undetermined at j=" + std::to_string(j));
    Interval term = err.abs();
    // classical bound |q_k alpha - p_k| < 1/q_{k+1}, certified per term
    if (!(term.hi < Rat(1, tab.convergent(2 * j + 2).q)))
      throw precision_error("b term exceeds classical bound at j=" + std::to_string(j));
    sum = sum + term * (2 * weights.weight(j));
  }
  BValue out;
  out.truncation_index = J;
  out.tail_bound = tail_bound;
  out.enclosure = Interval(sum.lo, sum.hi + tail_bound);
  return out;
}

// Assumption report: (A) summability, (B) divergence of a_{n_k}, (C) decay of
// q_{2k-1} log(a_{2k+2}) / q_{2k+1}.
struct AssumptionReport {
  std::vector<std::pair<long, Rat>> partial_sums_A;  // exact
  Interval limit_A;                                  // (pi^2/6 - 1)/4
  Rat tail_A;                                        // bound beyond max_k
  bool A_increasing_and_bounded = false;

  std::vector<std::pair<long, Int>> values_B;  // a_{n_k} = (2k+1)^2
  bool B_strictly_increasing = false;

  std::vector<std::pair<long, Interval>> ratios_C;  // r_k
  bool C_decreasing_from_3 = false;
  Interval C_k4_max;  // max over range of r_k * k^4
};

inline AssumptionReport check_assumptions(const ConvergentTable& tab, long max_k,
                                          unsigned bits = 128) {
  if (max_k < 2) throw usage_error("check_assumptions needs max_k >= 2");
  AssumptionReport rep;

  Rat sum = 0;
  bool inc = true;
  for (long k = 1; k <= max_k; ++k) {
    Int ank1 = tab.coefficient(2 * k + 2);  // a_{n_k + 1}
    Rat prev = sum;
    sum += Rat(1, ank1);
    if (sum <= prev) inc = false;
    rep.partial_sums_A.emplace_back(k, sum);
  }
  Interval pi = pi_enclosure(bits);
  rep.limit_A = (pi * pi * Rat(1, 6) - Rat(1)) * Rat(1, 4);
  rep.tail_A = Rat(1, 4 * Int(max_k + 1));  // sum_{j>K+1} 1/j^2 < 1/(K+1)
  rep.A_increasing_and_bounded = inc && Rat(rep.limit_A.lo) > sum;

  bool mono = true;
  Int prev_b = 0;
  for (long k = 1; k <= max_k; ++k) {
    Int ank = tab.coefficient(2 * k + 1);
    if (k > 1 && ank <= prev_b) mono = false;
    prev_b = ank;
    rep.values_B.emplace_back(k, ank);
  }
  rep.B_strictly_increasing = mono;

  bool dec = true;
  Interval k4max(Rat(0));
  Interval prev_r;
  for (long k = 1; k <= max_k; ++k) {
    Int a_next = tab.coefficient(2 * k + 2);
    Interval lg = log_enclosure(Rat(a_next), bits);
    Interval r = lg * Rat(tab.convergent(2 * k - 1).q, tab.convergent(2 * k + 1).q);
    rep.ratios_C.emplace_back(k, r);
    if (k >= 4 && !(r.certainly_less(prev_r))) dec = false;
    if (k >= 3) prev_r = r;
    Interval rk4 = r * Rat(Int(k) * k * k * k);
    if (rk4.hi > k4max.hi) k4max = rk4;
  }
  rep.C_decreasing_from_3 = dec;
  rep.C_k4_max = k4max;
  return rep;
}

}  // namespace slitflow::cfrac
