#pragma once

#include <cmath>

#include "htc/analytic.hpp"
#include "htc/distribution.hpp"
#include "htc/errors.hpp"

namespace htc {

/// Point-to-point link parameters used to size the consume power from an
/// SNR-outage constraint. Rayleigh fading corresponds to an exponential gain
/// distribution; the fading families here reuse DistributionSpec.
struct LinkConfig {
  double zeta = 0;    // SNR decoding threshold
  double noise = 0;   // additive noise power N
  DistributionSpec fading;  // channel power gain g
  double theta2 = 0.1;      // SNR outage target
  double symbol_duration = 0;  // T_s (0 when unused)
};

inline void validate(const LinkConfig& cfg) {
  if (!(cfg.zeta >= 0)) throw domain_error("link: zeta must be >= 0");
  if (!(cfg.noise > 0)) throw domain_error("link: noise must be > 0");
  if (!(cfg.theta2 > 0 && cfg.theta2 < 1)) {
    throw domain_error("link: theta2 must lie in (0, 1)");
  }
}

/// Smallest constant transmit power with P(g p / N <= zeta) = theta2,
/// i.e. p = zeta N / F_G^{-1}(theta2).
inline double transmit_power(const LinkConfig& cfg) {
  validate(cfg);
  if (cfg.zeta == 0) return 0;
  const double gain = cfg.fading.quantile(cfg.theta2);
  if (!(gain > 0)) {
    throw feasibility_error(
        "transmit_power: fading quantile at theta2 is zero; no finite power "
        "meets the SNR outage target");
  }
  return cfg.zeta * cfg.noise / gain;
}

/// Large-threshold symbol-rate figures for one symbol of energy u = p T_s
/// per cycle. rate * symbol_duration == rho by construction.
struct SymbolRate {
  double threshold = 0;   // u = p T_s
  double rho = 0;         // lambda x_bar / (lambda x_bar + p)
  double rate = 0;        // rho / T_s
  double omega_exact = 0; // two-bit omega at this threshold, for comparison
};

inline SymbolRate symbol_rate(const RenewalConstants& k, double p,
                              double symbol_duration) {
  if (!(p > 0)) throw domain_error("symbol_rate: p must be > 0");
  if (!(symbol_duration > 0)) {
    throw domain_error("symbol_rate: symbol_duration must be > 0");
  }
  const double lx = k.energy_rate();
  SymbolRate s;
  s.threshold = p * symbol_duration;
  s.rho = lx / (lx + p);
  s.rate = s.rho / symbol_duration;
  s.omega_exact = two_bit_metrics(k, s.threshold, p).omega;
  return s;
}

}  // namespace htc
