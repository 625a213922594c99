#pragma once

// Converts library models into the plain-number descriptions used by the
// oracles.

#include "oracles.hpp"
#include "skewtorus/skew.hpp"

namespace oracle {

inline Bivariate describe(const skewtorus::SkewModel& m) {
  Bivariate b;
  const auto& th = m.theta();
  switch (th.family()) {
    case skewtorus::Family::Uniform: b.kind = Bivariate::Uniform; break;
    case skewtorus::Family::Sine: b.kind = Bivariate::Sine; break;
    case skewtorus::Family::Cosine: b.kind = Bivariate::Cosine; break;
    case skewtorus::Family::WrappedCauchy: b.kind = Bivariate::WC; break;
  }
  if (th.family() != skewtorus::Family::Uniform) {
    b.k1 = th.kappa()[0];
    b.k2 = th.kappa()[1];
    b.r = th.r();
  }
  b.mu1 = m.mu()[0];
  b.mu2 = m.mu()[1];
  b.l1 = m.lambda()[0];
  b.l2 = m.lambda()[1];
  return b;
}

}  // namespace oracle
