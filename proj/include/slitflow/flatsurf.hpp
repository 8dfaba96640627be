#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "slitflow/cfrac.hpp"
#include "slitflow/floorsum.hpp"
#include "slitflow/interval.hpp"
#include "slitflow/logexp.hpp"

namespace slitflow::flatsurf {

// Flow time: either exactly t = log(r) for rational r > 0 (the diagonal
// action is then exact rational scaling) or an enclosed real time.
struct FlowTime {
  std::variant<Rat, Interval> v;

  static FlowTime log_of(const Rat& r) {
    if (r <= 0) throw usage_error("flow scale must be positive");
    return FlowTime{r};
  }
  static FlowTime approx(const Interval& t) { return FlowTime{t}; }

  bool exact() const { return std::holds_alternative<Rat>(v); }
  const Rat& scale() const { return std::get<Rat>(v); }

  // e^t enclosure for either representation.
  Interval scale_enclosure(unsigned bits = 96) const {
    if (exact()) return Interval(scale());
    return exp_enclosure(std::get<Interval>(v), bits);
  }
};

struct PlanarVector {
  Interval x, y;
  Interval length2() const { return x.square() + y.square(); }
  Interval length(unsigned bits = 128) const { return sqrt_enclosure(length2(), bits); }
};

inline PlanarVector flow(const PlanarVector& p, const FlowTime& t) {
  Interval r = t.scale_enclosure();
  return PlanarVector{p.x * r, p.y / r};
}

// Exact element of the coset sigma*(b_c,0) + L at the unit-scale surface,
// where L = Z(1,0) + Z(-alpha,1). Normalized coordinates (time-free):
//   x_hat = sigma*b_c + m - n*alpha,   y_hat = n.
// At flow scale r the vector is (r*x_hat, n/r).
struct CosetVec {
  int sigma = 0;  // 0 for lattice vectors, +1 for branch-to-branch
  Int m, n;

  bool operator==(const CosetVec& o) const {
    return sigma == o.sigma && m == o.m && n == o.n;
  }
};

// Saddle connection with exact combinatorial data and certified metric data
// at its defining time.
struct SaddleConnection {
  CosetVec vec;         // canonical representative
  Rat scale;            // r = e^t at which metric fields are reported
  Interval h;           // |horizontal| component at scale
  Interval v;           // |vertical| component at scale
  Interval flat_length;
  Int slit_crossings;   // interior slit crossings of the segment
  int sheet_parity = 0; // slit_crossings mod 2
  bool branch_loop() const { return vec.sigma == 0; }
};

// Sheared-torus slit surface: lattice basis (1,0), (-alpha,1); slit holonomy
// (b_c, 0); family parameter c in [-1/2, 1/2] realized by the half-integer
// weight pattern of cfrac::SlitWeights.
class Surface {
 public:
  explicit Surface(const cfrac::ConvergentTable& tab, Rat c = Rat(0))
      : tab_(&tab), c_(std::move(c)), weights_(cfrac::SlitWeights::for_c(c_)) {}

  const cfrac::ConvergentTable& table() const { return *tab_; }
  const Rat& c() const { return c_; }
  const cfrac::SlitWeights& weights() const { return weights_; }

  Interval alpha(long depth) const { return tab_->alpha(depth); }

  // b_c enclosure at precision tied to the alpha depth scale.
  Interval b_c(long depth) const {
    if (depth < 1) depth = 1;
    {
      std::shared_lock rl(mtx_);
      auto it = bcache_.find(depth);
      if (it != bcache_.end()) return it->second;
    }
    Rat tol(1, tab_->convergent(depth).q * tab_->convergent(depth + 1).q);
    if (tol > Rat(1, 1000000)) tol = Rat(1, 1000000);
    Interval e = cfrac::compute_b(*tab_, tol, weights_).enclosure;
    std::unique_lock wl(mtx_);
    bcache_.emplace(depth, e);
    return e;
  }

  cfrac::BValue b_value(const Rat& tol) const {
    return cfrac::compute_b(*tab_, tol, weights_);
  }

  // Normalized x-coordinate enclosure of a coset vector.
  Interval xhat(const CosetVec& w, long depth) const {
    Interval x = alpha(depth) * Rat(-w.n) + Rat(w.m);
    if (w.sigma != 0) x = x + b_c(depth) * Rat(w.sigma);
    return x;
  }

  Interval len2(const CosetVec& w, const Rat& r, long depth) const {
    Interval xs = xhat(w, depth) * r;
    Interval ys(Rat(w.n, 1) / r);
    return xs.square() + ys.square();
  }

  static constexpr long kDepth0 = 4;
  static constexpr long kDepthMax = 200;

 private:
  const cfrac::ConvergentTable* tab_;
  Rat c_;
  cfrac::SlitWeights weights_;
  mutable std::map<long, Interval> bcache_;
  mutable std::shared_mutex mtx_;
};

// Spec-facing view of the sheared lattice at a given alpha depth.
struct ShearedLattice {
  PlanarVector u, v;
  Interval det() const { return u.x * v.y - u.y * v.x; }
};

inline ShearedLattice shear_lattice(const Surface& s, long depth) {
  if (depth < 1) throw usage_error("shear_lattice needs depth >= 1");
  Interval a = s.alpha(depth);
  return ShearedLattice{PlanarVector{Interval(Rat(1)), Interval(Rat(0))},
                        PlanarVector{-a, Interval(Rat(1))}};
}

inline ShearedLattice flow(const ShearedLattice& l, const FlowTime& t) {
  return ShearedLattice{flow(l.u, t), flow(l.v, t)};
}

namespace detail {

// Certified sign of an interval-valued expression, refining the depth until
// decidable. expr(depth) must return enclosures that shrink with depth; a
// precision_error from an intermediate step (e.g. interval division through
// zero at low depth) just forces another refinement round.
template <typename F>
int certified_sign(F&& expr, long d0, long dmax, const char* what) {
  for (long d = d0; d <= dmax; d = d + (d < 32 ? 8 : d / 2)) {
    try {
      Interval e = expr(d);
      if (e.is_positive()) return 1;
      if (e.is_negative()) return -1;
      if (e.lo == 0 && e.hi == 0) return 0;
    } catch (const precision_error&) {
    }
  }
  throw precision_error(std::string("sign not certifiable: ") + what);
}

// Certified floor of an interval expression.
template <typename F>
Int certified_floor(F&& expr, long d0, long dmax, const char* what) {
  for (long d = d0; d <= dmax; d = d + (d < 32 ? 8 : d / 2)) {
    try {
      Interval e = expr(d);
      Int flo = floor_rat(e.lo), fhi = floor_rat(e.hi);
      if (flo == fhi) return flo;
    } catch (const precision_error&) {
    }
  }
  throw precision_error(std::string("floor not certifiable: ") + what);
}

}  // namespace detail

// Lagrange-Gauss reduced basis of the flowed lattice g_t L, tracked by an
// exact unimodular transform on the (m, n) coefficients.
struct ReducedBasis {
  CosetVec b1, b2;       // sigma = 0
  Int t00 = 1, t01 = 0;  // (b1, b2) = (e1, e2) * T, det T = +-1
  Int t10 = 0, t11 = 1;
  Rat scale;
  long depth = Surface::kDepth0;  // depth at which Gram data certifies
};

inline ReducedBasis reduce_basis(const Surface& s, const Rat& r,
                                 long dmax = Surface::kDepthMax) {
  ReducedBasis rb;
  rb.scale = r;
  CosetVec b1{0, Int(1), Int(0)};
  CosetVec b2{0, Int(0), Int(1)};
  Int u00 = 1, u01 = 0, u10 = 0, u11 = 1;

  long depth = Surface::kDepth0;
  auto gram = [&](const CosetVec& a, const CosetVec& b, long d) {
    Interval xa = s.xhat(a, d) * r, xb = s.xhat(b, d) * r;
    Interval ya(Rat(a.n) / r), yb(Rat(b.n) / r);
    return xa * xb + ya * yb;
  };

  for (int iter = 0; iter < 4000; ++iter) {
    int cmp = detail::certified_sign(
        [&](long d) { return gram(b2, b2, d) - gram(b1, b1, d); }, depth, dmax,
        "basis length comparison");
    if (cmp < 0) {
      std::swap(b1, b2);
      std::swap(u00, u01);
      std::swap(u10, u11);
    }
    // mu = round(<b1,b2>/<b1,b1>)
    Int mu = detail::certified_floor(
        [&](long d) {
          return gram(b1, b2, d) / gram(b1, b1, d) + Rat(1, 2);
        },
        depth, dmax, "size-reduction quotient");
    if (mu == 0) {
      if (cmp >= 0) break;
      continue;
    }
    b2.m -= mu * b1.m;
    b2.n -= mu * b1.n;
    u01 -= mu * u00;
    u11 -= mu * u10;
  }
  rb.b1 = b1;
  rb.b2 = b2;
  rb.t00 = u00;
  rb.t01 = u01;
  rb.t10 = u10;
  rb.t11 = u11;
  return rb;
}

inline Interval vec_length(const Surface& s, const CosetVec& w, const Rat& r,
                           long depth, unsigned bits = 128) {
  return sqrt_enclosure(s.len2(w, r, depth), bits);
}

// Certified length comparison between coset vectors at shared scale. Mirror
// images (w vs -w) are recognized as exact ties without refinement.
inline int compare_lengths(const Surface& s, const CosetVec& a, const CosetVec& b,
                           const Rat& r, long dmax = Surface::kDepthMax) {
  if (a == b) return 0;
  if (a.sigma == -b.sigma && a.m == -b.m && a.n == -b.n) return 0;
  return detail::certified_sign(
      [&](long d) { return s.len2(a, r, d) - s.len2(b, r, d); }, Surface::kDepth0,
      dmax, "saddle-connection length order");
}

namespace detail {

// All coset vectors sigma*s + L with certified length <= bound at scale r.
// Box search over the reduced basis after a Babai shift of the target.
inline std::vector<CosetVec> enumerate_coset(const Surface& surf, int sigma,
                                             const Rat& r, const Interval& bound,
                                             long dmax = Surface::kDepthMax) {
  ReducedBasis rb = reduce_basis(surf, r, dmax);
  CosetVec base{sigma, Int(0), Int(0)};

  // Babai rounding: coefficients of -base in the reduced basis via the exact
  // cross-product form (the lattice has covolume 1, det(B1,B2) = +-1).
  // cross((x1,y1),(x2,y2)) = x1 y2 - y1 x2 ; coefficients of a vector w:
  // i = cross(w, B2)/det, j = -cross(w, B1)/det.
  auto cross = [&](const CosetVec& a, const CosetVec& b, long d) {
    // (r xa, na/r) x (r xb, nb/r) = xa*nb - na*xb  (exact in scale)
    return surf.xhat(a, d) * Rat(b.n) - surf.xhat(b, d) * Rat(a.n);
  };
  int detsign = detail::certified_sign(
      [&](long d) { return cross(rb.b1, rb.b2, d); }, Surface::kDepth0, dmax,
      "reduced basis determinant");
  auto coeff_i = [&](long d) {
    Interval c = cross(base, rb.b2, d);
    return detsign > 0 ? c : -c;
  };
  auto coeff_j = [&](long d) {
    Interval c = cross(base, rb.b1, d);
    return detsign > 0 ? -c : c;
  };
  Int bi = certified_floor([&](long d) { return coeff_i(d) + Rat(1, 2); },
                           Surface::kDepth0, dmax, "babai i");
  Int bj = certified_floor([&](long d) { return coeff_j(d) + Rat(1, 2); },
                           Surface::kDepth0, dmax, "babai j");
  CosetVec shifted{sigma, base.m - bi * rb.b1.m - bj * rb.b2.m,
                   base.n - bi * rb.b1.n - bj * rb.b2.n};

  long d = rb.depth + 8;
  Interval slen = vec_length(surf, shifted, r, d);
  Interval l1 = vec_length(surf, rb.b1, r, d);
  Interval l2 = vec_length(surf, rb.b2, r, d);

  // |w| <= bound and w = shifted + i B1 + j B2 force
  // |i| <= (bound + |shifted|) |B2|, |j| <= (bound + |shifted|) |B1|.
  Rat reach = bound.hi + slen.hi;
  Int imax = ceil_rat(reach * l2.hi) + 1;
  Int jmax = ceil_rat(reach * l1.hi) + 1;
  if (imax > 2000000 || jmax > 2000000)
    throw resource_error("coset enumeration box too large");

  std::vector<CosetVec> out;
  for (Int j = -jmax; j <= jmax; ++j) {
    for (Int i = -imax; i <= imax; ++i) {
      CosetVec w{sigma, shifted.m + i * rb.b1.m + j * rb.b2.m,
                 shifted.n + i * rb.b1.n + j * rb.b2.n};
      if (sigma == 0) {
        if (w.m == 0 && w.n == 0) continue;
        // lattice vectors come in +- pairs; keep one orientation
        if (w.n < 0 || (w.n == 0 && w.m < 0)) continue;
      }
      int cmp = detail::certified_sign(
          [&](long dd) { return surf.len2(w, r, dd) - bound.square(); },
          Surface::kDepth0, dmax, "length within bound");
      if (cmp <= 0) out.push_back(w);
    }
  }
  return out;
}

}  // namespace detail

// Number of interior slit-copy crossings of the segment 0 -> w; the sheet
// parity of the connection is this count mod 2. Crossing positions on the
// base circle form the arithmetic progression j*(alpha + xhat/n).
inline Int slit_crossing_count(const Surface& s, const CosetVec& w,
                               long dmax = Surface::kDepthMax) {
  Int nabs = w.n < 0 ? Int(-w.n) : w.n;
  if (nabs <= 1) return 0;
  for (long d = Surface::kDepth0; d <= dmax; d = d + (d < 32 ? 8 : d / 2)) {
    Interval xh = s.xhat(w, d);
    if (w.n < 0) xh = -xh;  // reverse orientation so the vertical rise is +
    Interval beta = s.alpha(d) + xh / Rat(nabs);
    Interval bc = s.b_c(d);
    FracCount c = count_frac_below(nabs - 1, Interval(Rat(0)), beta, bc);
    if (c.exact()) return c.lo;
  }
  throw precision_error("slit crossing count not certifiable");
}

inline SaddleConnection make_connection(const Surface& s, const CosetVec& w,
                                        const Rat& r, long depth = 32) {
  SaddleConnection sc;
  sc.vec = w;
  sc.scale = r;
  Interval xh = s.xhat(w, depth);
  sc.h = (xh * r).abs();
  sc.v = Interval(abs_rat(Rat(w.n) / r));
  sc.flat_length = vec_length(s, w, r, depth);
  sc.slit_crossings = (w.sigma != 0) ? slit_crossing_count(s, w) : Int(0);
  sc.sheet_parity = static_cast<int>(sc.slit_crossings % 2);
  return sc;
}

// All branch-to-branch connections with certified flat length <= bound at
// time t, sorted by certified length (ties broken on |vertical|, then
// |horizontal| data, then sheet parity). Horizontal coset vectors other than
// the slit and its complement pass through branch points and are dropped.
inline std::vector<SaddleConnection> slit_connections(const Surface& s,
                                                      const FlowTime& t,
                                                      const Interval& bound,
                                                      long dmax = Surface::kDepthMax) {
  if (!(bound.lo > 0)) throw usage_error("length bound must be positive");
  if (!t.exact()) throw usage_error("enumeration requires an exact flow time log(r)");
  const Rat& r = t.scale();
  std::vector<CosetVec> cands = detail::enumerate_coset(s, +1, r, bound, dmax);
  std::vector<CosetVec> keep;
  for (const CosetVec& w : cands) {
    if (w.n == 0 && !(w.m == 0 || w.m == -1)) continue;  // decomposes at branch points
    keep.push_back(w);
  }
  std::sort(keep.begin(), keep.end(), [&](const CosetVec& a, const CosetVec& b) {
    int c = compare_lengths(s, a, b, r, dmax);
    if (c != 0) return c < 0;
    Int an = a.n < 0 ? Int(-a.n) : a.n, bn = b.n < 0 ? Int(-b.n) : b.n;
    if (an != bn) return an < bn;
    if (a.m != b.m) return a.m < b.m;
    return a.n < b.n;
  });
  std::vector<SaddleConnection> out;
  out.reserve(keep.size());
  for (const CosetVec& w : keep) out.push_back(make_connection(s, w, r));
  return out;
}

// zeta_k: the shortest branch-to-branch connection at t_k = log q_{2k+1}.
inline SaddleConnection slit_curve(const Surface& s, long k,
                                   long dmax = Surface::kDepthMax) {
  if (k < 1) throw usage_error("slit curve index must be >= 1");
  Rat r(s.table().convergent(2 * k + 1).q);
  // The Babai remainder is at most basis-length scale, so every candidate
  // for the minimum sits inside a small fixed bound; take the certified
  // minimum among the candidates under it.
  std::vector<CosetVec> probe =
      detail::enumerate_coset(s, +1, r, Interval(Rat(5)), dmax);
  if (probe.empty())
    throw precision_error("no branch-to-branch candidate inside probe bound");
  std::vector<CosetVec> keep;
  for (const CosetVec& w : probe)
    if (!(w.n == 0 && !(w.m == 0 || w.m == -1))) keep.push_back(w);
  CosetVec best = keep.front();
  for (size_t i = 1; i < keep.size(); ++i)
    if (compare_lengths(s, keep[i], best, r, dmax) < 0) best = keep[i];
  return make_connection(s, best, r);
}

// Per-piece systole report at time t: the two torus pieces are isometric and
// share the lattice systole; the branch-loop systole is the shortest
// primitive non-horizontal lattice vector.
struct SystoleReport {
  Interval y_plus, y_minus;  // identical by construction, reported separately
  Interval lattice;
  Interval branch_loop;
};

inline SystoleReport systole(const Surface& s, const FlowTime& t,
                             long dmax = Surface::kDepthMax) {
  if (!t.exact()) throw usage_error("systole requires an exact flow time log(r)");
  const Rat& r = t.scale();
  ReducedBasis rb = reduce_basis(s, r, dmax);
  long d = 48;
  Interval lat = vec_length(s, rb.b1, r, d);
  Interval l2 = vec_length(s, rb.b2, r, d);

  // Branch loops: primitive, n != 0 (horizontal loops pass through a slit
  // endpoint and decompose). b2 bounds the search.
  std::vector<CosetVec> all = detail::enumerate_coset(
      s, 0, r, Interval(l2.hi + Rat(1, 1000)), dmax);
  std::optional<CosetVec> best;
  for (const CosetVec& w : all) {
    if (w.n == 0) continue;
    Int g = gcd(w.m < 0 ? Int(-w.m) : w.m, w.n < 0 ? Int(-w.n) : w.n);
    if (g != 1) continue;
    if (!best || compare_lengths(s, w, *best, r, dmax) < 0) best = w;
  }
  if (!best) throw precision_error("no branch loop found within search bound");
  SystoleReport rep;
  rep.lattice = lat;
  rep.y_plus = lat;
  rep.y_minus = lat;
  rep.branch_loop = vec_length(s, *best, r, d);
  return rep;
}

}  // namespace slitflow::flatsurf
