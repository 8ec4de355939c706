#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "htc/errors.hpp"
#include "htc/normal.hpp"
#include "htc/rng.hpp"

namespace htc {

enum class Family { Deterministic, Uniform, Exponential, Gamma };

inline const char* family_name(Family f) {
  switch (f) {
    case Family::Deterministic: return "deterministic";
    case Family::Uniform: return "uniform";
    case Family::Exponential: return "exponential";
    case Family::Gamma: return "gamma";
  }
  return "?";
}

/// First three raw moments of a nonnegative random variable.
struct Moments {
  double mean = 0;
  double variance = 0;
  double third_moment = 0;  // raw E[Y^3]
};

/// Parametric description of a nonnegative random variable (inter-arrival
/// time or energy packet size). The four families all have closed-form first
/// three moments; a finite third moment is required by the renewal constants
/// downstream, which is why heavy-tailed families are not offered.
///
/// Construction goes through the validating factories; invalid parameters
/// throw domain_error.
class DistributionSpec {
 public:
  static DistributionSpec deterministic(double value) {
    require(std::isfinite(value) && value > 0, "deterministic: value must be > 0");
    return {Family::Deterministic, value, 0.0};
  }

  static DistributionSpec uniform(double low, double high) {
    require(std::isfinite(low) && std::isfinite(high) && low >= 0 && low < high,
            "uniform: need 0 <= low < high");
    return {Family::Uniform, low, high};
  }

  static DistributionSpec exponential(double rate) {
    require(std::isfinite(rate) && rate > 0, "exponential: rate must be > 0");
    return {Family::Exponential, rate, 0.0};
  }

  static DistributionSpec gamma(double shape, double scale) {
    require(std::isfinite(shape) && std::isfinite(scale) && shape > 0 && scale > 0,
            "gamma: shape and scale must be > 0");
    return {Family::Gamma, shape, scale};
  }

  Family family() const { return family_; }

  Moments moments() const {
    switch (family_) {
      case Family::Deterministic:
        return {p0_, 0.0, p0_ * p0_ * p0_};
      case Family::Uniform: {
        const double a = p0_, b = p1_;
        const double mean = 0.5 * (a + b);
        const double var = (b - a) * (b - a) / 12.0;
        const double m3 = (a * a * a + a * a * b + a * b * b + b * b * b) / 4.0;
        return {mean, var, m3};
      }
      case Family::Exponential: {
        const double r = p0_;
        return {1.0 / r, 1.0 / (r * r), 6.0 / (r * r * r)};
      }
      case Family::Gamma: {
        const double k = p0_, th = p1_;
        return {k * th, k * th * th, k * (k + 1.0) * (k + 2.0) * th * th * th};
      }
    }
    return {};
  }

  double mean() const { return moments().mean; }
  double variance() const { return moments().variance; }

  /// One variate. Identical stream state gives an identical draw.
  double sample(RandomStream& rng) const {
    switch (family_) {
      case Family::Deterministic:
        return p0_;
      case Family::Uniform:
        return p0_ + (p1_ - p0_) * rng.next_double();
      case Family::Exponential:
        return -std::log1p(-rng.next_double()) / p0_;
      case Family::Gamma:
        return sample_gamma(p0_, p1_, rng);
    }
    return 0;
  }

  /// Right-continuous CDF.
  double cdf(double x) const {
    switch (family_) {
      case Family::Deterministic:
        return x >= p0_ ? 1.0 : 0.0;
      case Family::Uniform:
        if (x <= p0_) return 0.0;
        if (x >= p1_) return 1.0;
        return (x - p0_) / (p1_ - p0_);
      case Family::Exponential:
        return x <= 0 ? 0.0 : -std::expm1(-p0_ * x);
      case Family::Gamma:
        return x <= 0 ? 0.0 : boost::math::gamma_p(p0_, x / p1_);
    }
    return 0;
  }

  /// Left-continuous generalized inverse of the CDF, q in (0, 1).
  double quantile(double q) const {
    if (!(q > 0.0 && q < 1.0)) {
      throw domain_error("quantile: q must lie in (0, 1)");
    }
    switch (family_) {
      case Family::Deterministic:
        return p0_;
      case Family::Uniform:
        return p0_ + q * (p1_ - p0_);
      case Family::Exponential:
        return -std::log1p(-q) / p0_;
      case Family::Gamma:
        return p1_ * boost::math::gamma_p_inv(p0_, q);
    }
    return 0;
  }

  /// Variate from the stationary residual density (1 - F(v)) / mean: the
  /// remaining life of an interval observed at a uniformly random time.
  /// Deterministic/Uniform/Exponential invert the residual CDF in closed
  /// form; Gamma uses V = U * Y' with Y' size-biased (Gamma(shape+1, scale)),
  /// which realizes the residual law exactly.
  double sample_residual(RandomStream& rng) const {
    switch (family_) {
      case Family::Deterministic:
        return p0_ * rng.next_double();
      case Family::Uniform:
        return residual_quantile_uniform(rng.next_double());
      case Family::Exponential:
        return sample(rng);  // memoryless
      case Family::Gamma:
        return rng.next_double() * sample_gamma(p0_ + 1.0, p1_, rng);
    }
    return 0;
  }

  /// CDF of the stationary residual distribution; used by verification code.
  double residual_cdf(double v) const {
    if (v <= 0) return 0.0;
    switch (family_) {
      case Family::Deterministic:
        return v >= p0_ ? 1.0 : v / p0_;
      case Family::Uniform: {
        const double a = p0_, b = p1_, mu = 0.5 * (a + b);
        if (v >= b) return 1.0;
        if (v <= a) return v / mu;
        return (a + ((v - a) * (b - a) - 0.5 * (v - a) * (v - a)) / (b - a)) / mu;
      }
      case Family::Exponential:
        return cdf(v);
      case Family::Gamma: {
        // (1/mu) * [v (1 - F(v)) + integral_0^v t f(t) dt], the integral
        // being mu * GammaCDF(shape+1, v).
        const double k = p0_, th = p1_, mu = k * th;
        const double tail = v * (1.0 - boost::math::gamma_p(k, v / th));
        return (tail + mu * boost::math::gamma_p(k + 1.0, v / th)) / mu;
      }
    }
    return 0;
  }

  /// Mean of the stationary residual distribution, (var + mean^2) / (2 mean).
  double residual_mean() const {
    const Moments m = moments();
    return (m.variance + m.mean * m.mean) / (2.0 * m.mean);
  }

  std::string describe() const {
    char buf[96];
    switch (family_) {
      case Family::Deterministic:
        std::snprintf(buf, sizeof buf, "deterministic(%g)", p0_);
        break;
      case Family::Uniform:
        std::snprintf(buf, sizeof buf, "uniform(%g, %g)", p0_, p1_);
        break;
      case Family::Exponential:
        std::snprintf(buf, sizeof buf, "exponential(rate=%g)", p0_);
        break;
      case Family::Gamma:
        std::snprintf(buf, sizeof buf, "gamma(shape=%g, scale=%g)", p0_, p1_);
        break;
    }
    return buf;
  }

  double param0() const { return p0_; }
  double param1() const { return p1_; }

 private:
  DistributionSpec(Family f, double p0, double p1) : family_(f), p0_(p0), p1_(p1) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw domain_error(msg);
  }

  double residual_quantile_uniform(double q) const {
    const double a = p0_, b = p1_, mu = 0.5 * (a + b);
    const double g = q * mu;
    if (g <= a) return g;
    const double w = b - a;
    return b - std::sqrt(std::fmax(0.0, w * w - 2.0 * w * (g - a)));
  }

  // Marsaglia-Tsang; normal draws come from the quantile so one cycle of the
  // stream maps to a reproducible variate sequence.
  static double sample_gamma(double shape, double scale, RandomStream& rng) {
    if (shape < 1.0) {
      const double boosted = sample_gamma(shape + 1.0, scale, rng);
      return boosted * std::pow(rng.next_open01(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      const double z = std_normal_quantile(rng.next_open01());
      const double t = 1.0 + c * z;
      if (t <= 0.0) continue;
      const double v = t * t * t;
      const double w = rng.next_open01();
      if (w < 1.0 - 0.0331 * z * z * z * z) return d * v * scale;
      if (std::log(w) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  Family family_;
  double p0_;
  double p1_;
};

}  // namespace htc
