#pragma once

#include <optional>
#include <string>

#include "slitflow/flatsurf.hpp"

namespace slitflow::flatsurf {

// Length certificate for a short slit curve: an embedded round annulus of
// outer radius sys/4 around the connection gives the modulus lower bound
//   m >= log(r/|zeta|)/(2 pi),
// hence extremal length E <= 1/m and hyperbolic length H <= pi E.
struct LengthCertificate {
  Interval modulus_lower;
  Interval extremal_upper;
  Interval hyperbolic_upper;
};

struct CertificateOutcome {
  std::optional<LengthCertificate> cert;
  std::string reason;  // set when no certificate exists
  bool ok() const { return cert.has_value(); }
};

inline CertificateOutcome length_certificate(const Interval& flat_length,
                                             const Interval& systole_at_t,
                                             unsigned bits = 128) {
  CertificateOutcome out;
  Interval radius = systole_at_t * Rat(1, 4);
  if (!(flat_length.hi < radius.lo)) {
    out.reason = "no embedded annulus: outer radius <= |zeta|";
    return out;
  }
  Interval ratio = radius / flat_length;
  Interval logr = log_enclosure(Interval(ratio.lo, ratio.hi), bits);
  Interval pi = pi_enclosure(bits);
  Interval two_pi = pi * Rat(2);
  LengthCertificate c;
  c.modulus_lower = logr / two_pi;
  c.extremal_upper = Interval(Rat(1)) / c.modulus_lower;
  c.hyperbolic_upper = pi * c.extremal_upper;
  out.cert = c;
  return out;
}

}  // namespace slitflow::flatsurf
