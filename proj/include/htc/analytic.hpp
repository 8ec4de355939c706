#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <string>

#include "htc/errors.hpp"
#include "htc/normal.hpp"
#include "htc/renewal.hpp"

namespace htc {

/// How many bits of battery energy-state information the controller sees.
///   TwoBit           empty / below threshold / charged - exact switch times
///   OneBit           empty or not - harvest window fixed by outage target
///   ZeroBit          blind - both phases fixed, cycle period T is the knob
///   ZeroBitDischarge blind variant sizing T so the battery fully drains
///                    with probability theta3
enum class EsiMode { TwoBit, OneBit, ZeroBit, ZeroBitDischarge };

inline const char* mode_name(EsiMode m) {
  switch (m) {
    case EsiMode::TwoBit: return "two_bit";
    case EsiMode::OneBit: return "one_bit";
    case EsiMode::ZeroBit: return "zero_bit";
    case EsiMode::ZeroBitDischarge: return "zero_bit_discharge";
  }
  return "?";
}

struct ProtocolConfig {
  EsiMode mode = EsiMode::TwoBit;
  double threshold = 0;        // u, energy the consume phase needs
  double power = 0;            // p, constant consume rate
  double outage_target = 0.1;  // theta1
  double discharge_target = 0.9;  // theta3 (ZeroBitDischarge)
  double period = 0;           // T (ZeroBit)
};

inline void validate(const ProtocolConfig& cfg) {
  if (!(cfg.threshold >= 0) || !std::isfinite(cfg.threshold)) {
    throw domain_error("protocol: threshold u must be >= 0");
  }
  if (!(cfg.power > 0) || !std::isfinite(cfg.power)) {
    throw domain_error("protocol: power p must be > 0");
  }
  if (!(cfg.outage_target > 0 && cfg.outage_target < 1)) {
    throw domain_error("protocol: theta1 must lie in (0, 1)");
  }
  if (!(cfg.discharge_target > 0 && cfg.discharge_target < 1)) {
    throw domain_error("protocol: theta3 must lie in (0, 1)");
  }
  if (cfg.mode == EsiMode::ZeroBit && !(cfg.period > 0)) {
    throw domain_error("protocol: period T must be > 0 in zero_bit mode");
  }
}

/// Closed-form performance figures. rho is the duty cycle (fraction of time
/// in the consume phase), omega the cycle speed 1/E[T]. t_c is the harvest
/// window where the mode fixes one. aux carries named bounds, limits and
/// diagnostics; keys are documented in the README.
struct Metrics {
  double rho = 0;
  double omega = 0;
  double t_c = 0;
  std::map<std::string, double> aux;
};

namespace detail {

inline std::string fmt(const char* pattern, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Two-bit ESI: the controller observes both thresholds, so tau_c and tau_d
// are the true first-passage times.
// ---------------------------------------------------------------------------

struct TwoBitBounds {
  double rho_limit = 0;  // large-threshold duty cycle lambda x_bar/(lambda x_bar + p)
  double omega_max = 0;  // fastest attainable cycle speed, at u -> 0
};

inline TwoBitBounds two_bit_bounds(const RenewalConstants& k, double p) {
  if (!(p > 0)) throw domain_error("two_bit_bounds: p must be > 0");
  const double lx = k.energy_rate();
  return {lx / (lx + p), p / (p * k.c1 + k.c3)};
}

inline Metrics two_bit_metrics(const RenewalConstants& k, double u, double p) {
  if (!(u >= 0)) throw domain_error("two_bit_metrics: u must be >= 0");
  if (!(p > 0)) throw domain_error("two_bit_metrics: p must be > 0");
  const double lx = k.energy_rate();
  Metrics m;
  m.rho = (u + k.c3) / ((1.0 + p / lx) * u + (p * k.c1 + k.c3));
  const double mean_cycle = (1.0 / p + 1.0 / lx) * u + k.c1 + k.c3 / p;
  m.omega = 1.0 / mean_cycle;
  const TwoBitBounds b = two_bit_bounds(k, p);
  m.aux["mean_cycle"] = mean_cycle;
  m.aux["mean_discharge"] = (u + k.c3) / p;
  m.aux["rho_limit"] = b.rho_limit;
  m.aux["omega_max"] = b.omega_max;
  if (!clt_applicable(k, u)) m.aux["clt_warning"] = 1.0;
  return m;
}

/// Exact u = 0 analysis: every harvested packet is consumed on arrival.
/// Distinct from the u -> 0 limit of the two-bit formulas, which lean on
/// residual/overshoot asymptotics that are only valid for large u.
inline Metrics opportunistic_metrics(const RenewalConstants& k, double p) {
  if (!(p > 0)) throw domain_error("opportunistic_metrics: p must be > 0");
  Metrics m;
  m.rho = 1.0 / (1.0 + p * k.c1 / k.mean_packet);
  m.omega = 1.0 / (k.c1 + k.mean_packet / p);
  m.aux["mean_cycle"] = k.c1 + k.mean_packet / p;
  m.aux["mean_discharge"] = k.mean_packet / p;
  return m;
}

// ---------------------------------------------------------------------------
// One-bit ESI: only "battery empty" is observable. The harvest window t_c is
// sized so the chance of holding less than u at switch-on is theta1.
// ---------------------------------------------------------------------------

/// Smallest admissible harvest window (the u = 0 value of the switch time).
inline double one_bit_min_switch_time(const RenewalConstants& k, double theta1) {
  if (!(theta1 > 0 && theta1 < 1)) {
    throw domain_error("one_bit_min_switch_time: theta1 must lie in (0, 1)");
  }
  return k.c1 + std_normal_quantile(1.0 - theta1) * std::sqrt(k.c2);
}

/// Harvest window t_c with P(U(t_c) <= u) = theta1 under the normal
/// recharge-time approximation.
inline double one_bit_switch_time(const RenewalConstants& k, double u, double theta1) {
  if (!(u >= 0)) throw domain_error("one_bit_switch_time: u must be >= 0");
  if (!(theta1 > 0 && theta1 < 1)) {
    throw domain_error("one_bit_switch_time: theta1 must lie in (0, 1)");
  }
  const RechargeMoments rm = recharge_moments(k, u);
  const double t_c =
      k.c1 + std_normal_quantile(1.0 - theta1) * std::sqrt(rm.variance) +
      u / k.energy_rate();
  if (!(t_c > 0)) {
    throw feasibility_error(detail::fmt(
        "one_bit_switch_time: computed t_c = %g is not positive "
        "(theta1 = %g tolerates outage more often than the mean recharge allows)",
        t_c, theta1));
  }
  return t_c;
}

inline Metrics one_bit_metrics(const RenewalConstants& k, double u, double p,
                               double theta1) {
  if (!(p > 0)) throw domain_error("one_bit_metrics: p must be > 0");
  const double lx = k.energy_rate();
  Metrics m;
  m.t_c = one_bit_switch_time(k, u, theta1);
  m.rho = lx / (p + lx);  // independent of u and theta1
  m.omega = p / ((p + lx) * m.t_c);
  const double t_c_min = one_bit_min_switch_time(k, theta1);
  m.aux["t_c_min"] = t_c_min;
  m.aux["omega_max"] = p / ((p + lx) * t_c_min);
  m.aux["mean_cycle"] = (p + lx) * m.t_c / p;
  m.aux["mean_discharge"] = lx * m.t_c / p;
  if (!clt_applicable(k, u)) m.aux["clt_warning"] = 1.0;
  return m;
}

// ---------------------------------------------------------------------------
// Zero-bit ESI: no battery observability at all. T is the control parameter;
// the harvest window is t_c = (1 - rho) T and the consume phase blindly draws
// u = p rho T.
// ---------------------------------------------------------------------------

/// Normalized coefficients of the zero-bit duty-cycle equation
/// 1 - rho = d + sqrt(c + b rho) + a rho, plus the feasibility quadratic
/// f(T) = K T^2 + L T + M obtained by clearing T^2 from (a+d)^2 > b + c.
/// T_plus is the largest root of f (0 when f has no real roots, meaning the
/// condition holds for every T).
struct ZeroBitCoefficients {
  double a = 0, b = 0, c = 0, d = 0;
  double K = 0, L = 0, M = 0;
  double t_c_min = 0;
  double T_plus = 0;

  double feasibility_poly(double T) const { return (K * T + L) * T + M; }
};

inline ZeroBitCoefficients zero_bit_coefficients(const RenewalConstants& k, double p,
                                                 double T, double theta1) {
  if (!(p > 0)) throw domain_error("zero_bit_coefficients: p must be > 0");
  if (!(T > 0)) throw domain_error("zero_bit_coefficients: T must be > 0");
  const double lx = k.energy_rate();
  const double xb3 = k.mean_packet * k.mean_packet * k.mean_packet;
  const double z = std_normal_quantile(1.0 - theta1);
  ZeroBitCoefficients zc;
  zc.a = p / lx;
  zc.b = p * k.gamma_sq * z * z / (xb3 * T);
  zc.c = k.c2 * (z / T) * (z / T);
  zc.d = k.c1 / T;
  zc.K = zc.a * zc.a;
  zc.L = 2.0 * zc.a * k.c1 - p * k.gamma_sq * z * z / xb3;
  zc.M = k.c1 * k.c1 - k.c2 * z * z;
  zc.t_c_min = one_bit_min_switch_time(k, theta1);
  const double disc = zc.L * zc.L - 4.0 * zc.K * zc.M;
  zc.T_plus = disc < 0 ? 0.0 : (-zc.L + std::sqrt(disc)) / (2.0 * zc.K);
  return zc;
}

/// Duty cycle for a fixed cycle period T. Solves the quadratic from squaring
/// 1 - rho = d + sqrt(c + b rho) + a rho, validates both roots against that
/// pre-squaring equation (squaring admits a spurious root), and returns the
/// admissible one. Throws feasibility_error naming the violated bound when T
/// is too small, or when no root satisfies the original equation.
inline Metrics zero_bit_duty_cycle(const RenewalConstants& k, double p, double T,
                                   double theta1) {
  const ZeroBitCoefficients zc = zero_bit_coefficients(k, p, T, theta1);
  if (!(T > zc.t_c_min)) {
    throw feasibility_error(detail::fmt(
        "zero_bit: infeasible period, T = %g <= t_c_min = %g", T, zc.t_c_min));
  }
  if (!(zc.feasibility_poly(T) > 0)) {
    throw feasibility_error(detail::fmt(
        "zero_bit: infeasible period, f(T) <= 0 at T = %g (need T > T_plus = %g)",
        T, zc.T_plus));
  }

  const double a = zc.a, b = zc.b, c = zc.c, d = zc.d;
  const double s = 1.0 + a;
  const double disc = b * b + 4.0 * s * (s * c + b * (1.0 - d));
  const double root_sqrt = std::sqrt(disc);
  const double base = 2.0 * s * (1.0 - d) + b;

  const auto residual = [&](double rho) {
    return 1.0 - rho - d - std::sqrt(c + b * rho) - a * rho;
  };
  const auto polish = [&](double rho) {
    // One Newton step on the pre-squaring equation tightens the root to
    // machine precision even when T is extreme.
    const double r = residual(rho);
    const double slope = -1.0 - a - 0.5 * b / std::sqrt(c + b * rho);
    return rho - r / slope;
  };

  constexpr double kResidualTol = 1e-9;
  Metrics m;
  m.rho = -1;
  for (double rho : {(base - root_sqrt) / (2.0 * s * s), (base + root_sqrt) / (2.0 * s * s)}) {
    if (!(rho > 0 && rho < 1) || !(c + b * rho >= 0)) continue;
    rho = polish(rho);
    if (rho > 0 && rho < 1 && std::fabs(residual(rho)) < kResidualTol) {
      m.rho = rho;
      break;
    }
  }
  if (m.rho < 0) {
    throw feasibility_error(
        "zero_bit: no duty-cycle root satisfies 1 - rho = d + sqrt(c + b rho) + a rho");
  }

  m.omega = 1.0 / T;
  m.t_c = (1.0 - m.rho) * T;
  m.aux["mean_discharge"] = m.rho * T;
  m.aux["implied_threshold"] = p * m.rho * T;
  m.aux["t_c_min"] = zc.t_c_min;
  m.aux["T_plus"] = zc.T_plus;
  m.aux["rho_residual"] = residual(m.rho);
  m.aux["rho_limit"] = 1.0 / s;
  // Simplified large-u lower bound on T (drops c and d); reported for
  // comparison, never used for gating.
  const double z = std_normal_quantile(1.0 - theta1);
  m.aux["T_min_large_u"] = k.arrival_rate * k.arrival_rate * k.gamma_sq * z * z /
                           (p * k.mean_packet);
  if (!clt_applicable(k, m.aux["implied_threshold"])) m.aux["clt_warning"] = 1.0;
  return m;
}

/// Cycle period that makes the battery fully drain within the consume window
/// with probability theta3, given a fixed harvest window t_c.
inline double zero_bit_discharge_period(const RenewalConstants& k, double t_c,
                                        double p, double theta3) {
  if (!(t_c > 0)) throw domain_error("zero_bit_discharge_period: t_c must be > 0");
  if (!(theta3 > 0 && theta3 < 1)) {
    throw domain_error("zero_bit_discharge_period: theta3 must lie in (0, 1)");
  }
  const double lam = k.arrival_rate;
  const double T = (1.0 + k.energy_rate() / p) * t_c +
                   (k.gamma() * lam * std::sqrt(lam * t_c) / p) *
                       std_normal_quantile(theta3);
  if (!(T > t_c)) {
    throw feasibility_error(detail::fmt(
        "zero_bit_discharge_period: T = %g <= t_c = %g; theta3 leaves no "
        "consume window", T, t_c));
  }
  return T;
}

/// Metrics for the discharge-guaranteed zero-bit variant: t_c comes from the
/// one-bit switch-time rule at (u, theta1), T from the theta3 constraint.
inline Metrics zero_bit_discharge_metrics(const RenewalConstants& k, double u,
                                          double p, double theta1, double theta3) {
  Metrics m;
  m.t_c = one_bit_switch_time(k, u, theta1);
  const double T = zero_bit_discharge_period(k, m.t_c, p, theta3);
  m.rho = 1.0 - m.t_c / T;
  m.omega = 1.0 / T;
  const double lx = k.energy_rate();
  m.aux["period"] = T;
  m.aux["mean_discharge"] = T - m.t_c;
  m.aux["rho_asymptotic"] = lx / (p + lx);
  if (u > 0) m.aux["omega_asymptotic"] = p * lx / (u * (p + lx));
  if (!clt_applicable(k, u)) m.aux["clt_warning"] = 1.0;
  return m;
}

/// Dispatch on the configured ESI mode.
inline Metrics analyze(const RenewalConstants& k, const ProtocolConfig& cfg) {
  validate(cfg);
  switch (cfg.mode) {
    case EsiMode::TwoBit:
      return two_bit_metrics(k, cfg.threshold, cfg.power);
    case EsiMode::OneBit:
      return one_bit_metrics(k, cfg.threshold, cfg.power, cfg.outage_target);
    case EsiMode::ZeroBit:
      return zero_bit_duty_cycle(k, cfg.power, cfg.period, cfg.outage_target);
    case EsiMode::ZeroBitDischarge:
      return zero_bit_discharge_metrics(k, cfg.threshold, cfg.power,
                                        cfg.outage_target, cfg.discharge_target);
  }
  throw domain_error("analyze: unknown mode");
}

}  // namespace htc
