#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "htc/analytic.hpp"
#include "htc/distribution.hpp"
#include "htc/rng.hpp"

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using htc::DistributionSpec;
using htc::RenewalConstants;

namespace {

RenewalConstants uniform_uniform() {
  const auto u02 = DistributionSpec::uniform(0.0, 2.0);
  return htc::derive_constants(u02, u02);
}

RenewalConstants det_det() {
  const auto d1 = DistributionSpec::deterministic(1.0);
  return htc::derive_constants(d1, d1);
}

}  // namespace

TEST_CASE("two-bit metrics at the headline operating point") {
  const auto k = uniform_uniform();
  const auto m = htc::two_bit_metrics(k, 10.0, 2.0);
  REQUIRE_THAT(m.rho, WithinAbs(16.0 / 47.0, 1e-12));    // 0.340426
  REQUIRE_THAT(m.omega, WithinAbs(3.0 / 47.0, 1e-12));   // 0.063830
  REQUIRE_THAT(m.aux.at("mean_cycle"), WithinAbs(47.0 / 3.0, 1e-12));
}

TEST_CASE("two-bit at u = 0 hits the speed ceiling") {
  const auto k = uniform_uniform();
  const auto m = htc::two_bit_metrics(k, 0.0, 2.0);
  REQUIRE_THAT(m.rho, WithinAbs(0.5, 1e-12));
  REQUIRE_THAT(m.omega, WithinAbs(1.5, 1e-12));
  const auto b = htc::two_bit_bounds(k, 2.0);
  REQUIRE_THAT(b.omega_max, WithinAbs(1.5, 1e-12));
  REQUIRE_THAT(b.rho_limit, WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("two-bit large-threshold asymptotics") {
  const auto k = uniform_uniform();
  const auto m = htc::two_bit_metrics(k, 1e6, 2.0);
  REQUIRE_THAT(m.rho, WithinAbs(1.0 / 3.0, 1e-4));
  REQUIRE_THAT(m.omega * 1e6, WithinRel(2.0 * m.rho, 1e-3));
}

TEST_CASE("two-bit bounds for the deterministic model") {
  const auto b = htc::two_bit_bounds(det_det(), 1.0);
  REQUIRE_THAT(b.omega_max, WithinAbs(2.0, 1e-12));
  // p -> 0+ pushes the duty-cycle limit to 1
  REQUIRE_THAT(htc::two_bit_bounds(uniform_uniform(), 1e-9).rho_limit,
               WithinAbs(1.0, 1e-8));
}

TEST_CASE("two-bit omega decreases in u and respects its bound") {
  const auto k = uniform_uniform();
  const double omega_max = htc::two_bit_bounds(k, 2.0).omega_max;
  double prev = omega_max + 1;
  for (double u = 0; u <= 1000; u += 10) {
    const double omega = htc::two_bit_metrics(k, u, 2.0).omega;
    REQUIRE(omega < prev);
    REQUIRE(omega <= omega_max);
    prev = omega;
  }
}

TEST_CASE("opportunistic scheme, exact u = 0 analysis") {
  const auto k = uniform_uniform();
  const auto m = htc::opportunistic_metrics(k, 2.0);
  REQUIRE_THAT(m.rho, WithinAbs(0.6, 1e-12));
  REQUIRE_THAT(m.omega, WithinAbs(1.2, 1e-12));

  const auto md = htc::opportunistic_metrics(det_det(), 3.0);
  REQUIRE_THAT(md.rho, WithinAbs(1.0, 1e-12));  // c1 = 0
  REQUIRE_THAT(md.omega, WithinAbs(3.0, 1e-12));

  const auto mfast = htc::opportunistic_metrics(k, 1e12);
  REQUIRE_THAT(mfast.rho, WithinAbs(0.0, 1e-9));
  REQUIRE_THAT(mfast.omega, WithinAbs(3.0, 1e-9));  // 1 / c1
}

TEST_CASE("one-bit switch time") {
  const auto k = uniform_uniform();
  REQUIRE_THAT(htc::one_bit_switch_time(k, 10.0, 0.1),
               WithinAbs(13.696982372683449, 1e-9));
  REQUIRE_THAT(htc::one_bit_min_switch_time(k, 0.1),
               WithinAbs(0.93746253495788215, 1e-9));
  // theta1 = 0.5 kills the quantile term
  REQUIRE_THAT(htc::one_bit_switch_time(k, 10.0, 0.5), WithinAbs(10.0 + 1.0 / 3.0, 1e-12));
}

TEST_CASE("one-bit switch time can be infeasible for lax outage targets") {
  // exponential arrivals: c1 = 0.5, c2 = 1; theta1 = 0.9 makes t_c negative at u = 0
  const auto k = htc::derive_constants(DistributionSpec::exponential(1.0),
                                       DistributionSpec::deterministic(1.0));
  REQUIRE_THROWS_AS(htc::one_bit_switch_time(k, 0.0, 0.9), htc::feasibility_error);
}

TEST_CASE("one-bit metrics") {
  const auto k = uniform_uniform();
  const auto m = htc::one_bit_metrics(k, 10.0, 2.0, 0.1);
  REQUIRE_THAT(m.rho, WithinAbs(1.0 / 3.0, 1e-15));
  REQUIRE_THAT(m.omega, WithinAbs(0.048672521328218401, 1e-12));
  REQUIRE_THAT(m.aux.at("omega_max"), WithinAbs(0.71113953017505744, 1e-12));
  REQUIRE(m.omega <= m.aux.at("omega_max"));

  // rho depends only on the rates
  const auto m2 = htc::one_bit_metrics(k, 500.0, 2.0, 0.37);
  REQUIRE(m.rho == m2.rho);
  REQUIRE_THAT(htc::one_bit_metrics(k, 7.0, 1.0, 0.2).rho, WithinAbs(0.5, 1e-15));
}

TEST_CASE("one-bit switch time is monotone in u and theta1") {
  const auto k = uniform_uniform();
  double prev = 0;
  for (double u = 1; u <= 101; u += 5) {
    const double t_c = htc::one_bit_switch_time(k, u, 0.1);
    REQUIRE(t_c > prev);
    prev = t_c;
  }
  prev = 1e300;
  for (int i = 1; i <= 49; i += 2) {
    const double t_c = htc::one_bit_switch_time(k, 10.0, i / 100.0);
    REQUIRE(t_c < prev);
    prev = t_c;
  }
}

TEST_CASE("zero-bit coefficients at T = 40") {
  const auto k = uniform_uniform();
  const auto zc = htc::zero_bit_coefficients(k, 2.0, 40.0, 0.1);
  REQUIRE_THAT(zc.a, WithinAbs(2.0, 1e-12));
  REQUIRE_THAT(zc.b, WithinAbs(0.054745813838327213, 1e-12));
  REQUIRE_THAT(zc.c, WithinAbs(0.00022810755765969672, 1e-12));
  REQUIRE_THAT(zc.d, WithinAbs(1.0 / 120.0, 1e-12));
  REQUIRE_THAT(zc.K, WithinAbs(4.0, 1e-12));
  REQUIRE_THAT(zc.L, WithinAbs(-0.85649922019975518, 1e-12));
  REQUIRE_THAT(zc.M, WithinAbs(-0.25386098114440364, 1e-12));
  REQUIRE_THAT(zc.T_plus, WithinAbs(0.38079147171660546, 1e-9));
  REQUIRE_THAT(zc.t_c_min, WithinAbs(0.93746253495788215, 1e-9));
}

TEST_CASE("zero-bit coefficients vanish as T grows") {
  const auto k = uniform_uniform();
  const auto zc = htc::zero_bit_coefficients(k, 2.0, 1e12, 0.1);
  REQUIRE(zc.b < 1e-10);
  REQUIRE(zc.c < 1e-10);
  REQUIRE(zc.d < 1e-10);
}

TEST_CASE("zero-bit duty cycle at T = 40") {
  const auto k = uniform_uniform();
  const auto m = htc::zero_bit_duty_cycle(k, 2.0, 40.0, 0.1);
  REQUIRE_THAT(m.rho, WithinAbs(0.28837175904233115, 1e-10));
  REQUIRE_THAT(m.omega, WithinAbs(1.0 / 40.0, 1e-15));
  REQUIRE_THAT(m.t_c, WithinAbs(28.465129638306754, 1e-8));
  REQUIRE_THAT(m.aux.at("implied_threshold"), WithinAbs(23.069740723386492, 1e-8));
  REQUIRE(std::fabs(m.aux.at("rho_residual")) < 1e-9);
}

TEST_CASE("zero-bit duty cycle approaches 1/(1+a) for huge T") {
  const auto k = uniform_uniform();
  const auto m = htc::zero_bit_duty_cycle(k, 2.0, 1e6, 0.1);
  REQUIRE_THAT(m.rho, WithinAbs(1.0 / 3.0, 1e-3));
}

TEST_CASE("zero-bit feasibility errors name the violated bound") {
  const auto k = uniform_uniform();
  REQUIRE_THROWS_MATCHES(htc::zero_bit_duty_cycle(k, 2.0, 0.5, 0.1),
                         htc::feasibility_error, MessageMatches(ContainsSubstring("t_c_min")));
}

TEST_CASE("zero-bit feasibility verdict agrees with the direct inequality") {
  // random parameter draws; the verdict must match signs computed from first
  // principles: T > t_c_min and (a+d)^2 > b+c
  htc::RandomStream rng(20'250'811);
  int feasible_seen = 0, infeasible_seen = 0;
  for (int i = 0; i < 300; ++i) {
    const auto arrivals = DistributionSpec::uniform(0.0, 0.2 + 2.0 * rng.next_double());
    const auto packets = DistributionSpec::gamma(0.5 + 3.0 * rng.next_double(),
                                                 0.2 + rng.next_double());
    const auto k = htc::derive_constants(arrivals, packets);
    const double p = 0.2 + 5.0 * rng.next_double();
    const double theta1 = 0.01 + 0.48 * rng.next_double();
    const double z = htc::std_normal_quantile(1.0 - theta1);
    // periods drawn around the t_c_min boundary so both verdicts get exercised
    const double boundary = k.c1 + z * std::sqrt(k.c2);
    const double T = boundary * (0.2 + 3.0 * rng.next_double());

    const double lx = k.arrival_rate * k.mean_packet;
    const double xb3 = std::pow(k.mean_packet, 3.0);
    const double a = p / lx;
    const double b = p * k.gamma_sq * z * z / (xb3 * T);
    const double c = k.c2 * z * z / (T * T);
    const double d = k.c1 / T;
    const bool direct = ((a + d) * (a + d) > b + c) && (T > k.c1 + z * std::sqrt(k.c2));

    bool verdict = true;
    double residual = 0;
    try {
      const auto m = htc::zero_bit_duty_cycle(k, p, T, theta1);
      residual = m.aux.at("rho_residual");
    } catch (const htc::feasibility_error&) {
      verdict = false;
    }
    CAPTURE(arrivals.describe(), packets.describe(), p, theta1, T);
    REQUIRE(verdict == direct);
    if (verdict) {
      REQUIRE(std::fabs(residual) < 1e-9);
      ++feasible_seen;
    } else {
      ++infeasible_seen;
    }
  }
  // the draw ranges must exercise both verdicts
  REQUIRE(feasible_seen > 20);
  REQUIRE(infeasible_seen > 20);
}

TEST_CASE("zero-bit discharge period") {
  const auto k = uniform_uniform();
  const double t_c = 13.696982372683449;
  REQUIRE_THAT(htc::zero_bit_discharge_period(k, t_c, 2.0, 0.9),
               WithinAbs(22.481774732812167, 1e-9));
  // theta3 = 0.5 drops the square-root term
  REQUIRE_THAT(htc::zero_bit_discharge_period(k, t_c, 2.0, 0.5),
               WithinAbs(1.5 * t_c, 1e-12));
  // zero-variance model: same for any theta3
  REQUIRE_THAT(htc::zero_bit_discharge_period(det_det(), 10.0, 2.0, 0.13),
               WithinAbs(15.0, 1e-12));
  // tiny theta3 leaves no consume window
  REQUIRE_THROWS_AS(htc::zero_bit_discharge_period(k, 1.0, 2.0, 1e-6),
                    htc::feasibility_error);
}

TEST_CASE("all modes return rho in (0,1) and omega > 0") {
  const auto k = uniform_uniform();
  for (const htc::Metrics& m :
       {htc::two_bit_metrics(k, 10.0, 2.0), htc::one_bit_metrics(k, 10.0, 2.0, 0.1),
        htc::zero_bit_duty_cycle(k, 2.0, 40.0, 0.1), htc::opportunistic_metrics(k, 2.0),
        htc::zero_bit_discharge_metrics(k, 10.0, 2.0, 0.1, 0.9)}) {
    REQUIRE(m.rho > 0.0);
    REQUIRE(m.rho < 1.0);
    REQUIRE(m.omega > 0.0);
  }
}

TEST_CASE("the three ESI modes converge to the same duty cycle") {
  const auto k = uniform_uniform();
  const double limit = 1.0 / 3.0;  // lambda x_bar / (lambda x_bar + p) at p = 2
  REQUIRE_THAT(htc::two_bit_metrics(k, 1e5, 2.0).rho, WithinAbs(limit, 1e-3));
  REQUIRE_THAT(htc::one_bit_metrics(k, 1e5, 2.0, 0.1).rho, WithinAbs(limit, 1e-3));
  REQUIRE_THAT(htc::zero_bit_duty_cycle(k, 2.0, 1e5, 0.1).rho, WithinAbs(limit, 1e-3));
}

TEST_CASE("analyze dispatches and validates") {
  const auto k = uniform_uniform();
  htc::ProtocolConfig cfg{htc::EsiMode::TwoBit, 10.0, 2.0, 0.1, 0.9, 0.0};
  REQUIRE_THAT(htc::analyze(k, cfg).rho, WithinAbs(16.0 / 47.0, 1e-12));

  cfg.mode = htc::EsiMode::ZeroBit;
  REQUIRE_THROWS_AS(htc::analyze(k, cfg), htc::domain_error);  // period missing
  cfg.period = 40.0;
  REQUIRE_THAT(htc::analyze(k, cfg).rho, WithinAbs(0.28837175904233115, 1e-10));

  cfg.power = 0.0;
  REQUIRE_THROWS_AS(htc::analyze(k, cfg), htc::domain_error);
}
