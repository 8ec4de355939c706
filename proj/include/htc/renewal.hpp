#pragma once

#include <cmath>

#include "htc/distribution.hpp"
#include "htc/errors.hpp"
#include "htc/normal.hpp"

namespace htc {

/// Constants derived from the arrival and packet distributions. Everything
/// the protocol analytics need is a function of these.
///
/// With A the inter-arrival time and X the packet size:
///   arrival_rate         lambda = 1 / E[A]
///   mean_packet          x_bar = E[X]
///   gamma_sq             sigma_X^2 / lambda^2 + sigma_A^2 * x_bar^2
///   c1                   lambda * gamma_sq / (2 x_bar^2); recharge-mean offset
///   c2                   E[A^3]/(3 E[A]) - ((E[A]^2 + sigma_A^2)/(2 E[A]))^2;
///                        equals the variance of the stationary residual gap
///   c3                   (sigma_X^2 + x_bar^2) / (2 x_bar); mean overshoot
struct RenewalConstants {
  double arrival_rate = 0;
  double mean_packet = 0;
  double var_arrival = 0;
  double var_packet = 0;
  double arrival_third_moment = 0;
  double gamma_sq = 0;
  double c1 = 0;
  double c2 = 0;
  double c3 = 0;

  double gamma() const { return std::sqrt(gamma_sq); }
  /// Long-run energy arrival rate lambda * x_bar.
  double energy_rate() const { return arrival_rate * mean_packet; }
};

inline RenewalConstants derive_constants(const DistributionSpec& arrival,
                                         const DistributionSpec& packet) {
  const Moments a = arrival.moments();
  const Moments x = packet.moments();
  if (!(a.mean > 0) || !(x.mean > 0)) {
    throw domain_error("derive_constants: arrival and packet means must be > 0");
  }
  RenewalConstants k;
  k.arrival_rate = 1.0 / a.mean;
  k.mean_packet = x.mean;
  k.var_arrival = a.variance;
  k.var_packet = x.variance;
  k.arrival_third_moment = a.third_moment;
  k.gamma_sq = x.variance / (k.arrival_rate * k.arrival_rate) +
               a.variance * x.mean * x.mean;
  k.c1 = k.arrival_rate * k.gamma_sq / (2.0 * x.mean * x.mean);
  const double residual_mean = (a.mean * a.mean + a.variance) / (2.0 * a.mean);
  k.c2 = a.third_moment / (3.0 * a.mean) - residual_mean * residual_mean;
  k.c3 = (x.variance + x.mean * x.mean) / (2.0 * x.mean);
  return k;
}

struct RechargeMoments {
  double mean = 0;
  double variance = 0;
};

/// Mean and variance of the recharge time tau_c needed to accumulate energy
/// u. Asymptotic in u, with the constant terms kept: they cost nothing and
/// make the approximation strictly better at moderate u.
inline RechargeMoments recharge_moments(const RenewalConstants& k, double u) {
  if (u < 0) throw domain_error("recharge_moments: u must be >= 0");
  const double xb = k.mean_packet;
  return {k.c1 + u / k.energy_rate(), k.c2 + k.gamma_sq * u / (xb * xb * xb)};
}

/// Normal approximation P(tau_c(u) <= t). Degenerates to a step at the mean
/// when the variance is exactly zero.
inline double recharge_time_cdf(const RenewalConstants& k, double u, double t) {
  const RechargeMoments m = recharge_moments(k, u);
  if (m.variance <= 0) return t >= m.mean ? 1.0 : 0.0;
  return std_normal_cdf((t - m.mean) / std::sqrt(m.variance));
}

/// Normal approximation for the discharge duration when the device harvests
/// for a fixed window t_c and then drains U(t_c) at power p:
/// P(tau_d <= t_d) = P(U(t_c) <= p t_d).
inline double discharge_time_cdf(const RenewalConstants& k, double t_c, double p,
                                 double t_d) {
  if (!(t_c > 0)) throw domain_error("discharge_time_cdf: t_c must be > 0");
  if (!(p > 0)) throw domain_error("discharge_time_cdf: p must be > 0");
  const double lam = k.arrival_rate;
  const double drained_mean = k.energy_rate() * t_c;
  const double sd = k.gamma() * lam * std::sqrt(lam * t_c);
  if (sd <= 0) return p * t_d >= drained_mean ? 1.0 : 0.0;
  return std_normal_cdf((p * t_d - drained_mean) / sd);
}

/// Mean overshoot above the threshold at the level-crossing instant (C3).
inline double overshoot_mean(const RenewalConstants& k) { return k.c3; }

/// Heuristic validity check for the normal recharge-time approximation:
/// below ~5 packets' worth of threshold the CLT has little to average over.
inline bool clt_applicable(const RenewalConstants& k, double u) {
  return u >= 5.0 * k.mean_packet;
}

}  // namespace htc
