#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "htc/distribution.hpp"
#include "htc/errors.hpp"
#include "htc/rng.hpp"
#include "test_util.hpp"

using Catch::Matchers::WithinAbs;
using htc::DistributionSpec;
using htc::RandomStream;

namespace {

std::vector<DistributionSpec> all_families() {
  return {DistributionSpec::deterministic(1.5), DistributionSpec::uniform(0.0, 2.0),
          DistributionSpec::uniform(0.5, 3.0), DistributionSpec::exponential(2.0),
          DistributionSpec::gamma(2.5, 0.8), DistributionSpec::gamma(0.7, 1.3)};
}

// Quadrature oracle: density of each continuous family, written here from the
// textbook definitions so moments are verified on an independent path.
double pdf_of(const DistributionSpec& s, double x) {
  switch (s.family()) {
    case htc::Family::Uniform:
      return (x >= s.param0() && x <= s.param1()) ? 1.0 / (s.param1() - s.param0()) : 0.0;
    case htc::Family::Exponential:
      return x < 0 ? 0.0 : s.param0() * std::exp(-s.param0() * x);
    case htc::Family::Gamma: {
      const double k = s.param0(), th = s.param1();
      if (x <= 0) return 0.0;
      return std::pow(x, k - 1.0) * std::exp(-x / th) / (std::tgamma(k) * std::pow(th, k));
    }
    default:
      return 0.0;
  }
}

double quad_lower(const DistributionSpec& s) {
  // integrate the uniform over its support; its pdf jumps at the edges
  return s.family() == htc::Family::Uniform ? s.param0() : 0.0;
}

double quad_upper(const DistributionSpec& s) {
  if (s.family() == htc::Family::Uniform) return s.param1();
  return s.mean() + 60.0 * std::sqrt(s.variance()) + 60.0;
}

}  // namespace

TEST_CASE("parameter validation") {
  REQUIRE_THROWS_AS(DistributionSpec::deterministic(0.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::deterministic(-1.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::uniform(-0.5, 1.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::uniform(2.0, 2.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::uniform(3.0, 1.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::exponential(0.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::gamma(0.0, 1.0), htc::domain_error);
  REQUIRE_THROWS_AS(DistributionSpec::gamma(1.0, -2.0), htc::domain_error);
}

TEST_CASE("closed-form moments") {
  const auto det = DistributionSpec::deterministic(1.0).moments();
  REQUIRE(det.mean == 1.0);
  REQUIRE(det.variance == 0.0);
  REQUIRE(det.third_moment == 1.0);

  const auto uni = DistributionSpec::uniform(0.0, 2.0).moments();
  REQUIRE_THAT(uni.mean, WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(uni.variance, WithinAbs(1.0 / 3.0, 1e-15));
  REQUIRE_THAT(uni.third_moment, WithinAbs(2.0, 1e-15));

  const auto expo = DistributionSpec::exponential(1.0).moments();
  REQUIRE_THAT(expo.mean, WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(expo.variance, WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(expo.third_moment, WithinAbs(6.0, 1e-15));
}

TEST_CASE("moments agree with the quadrature oracle") {
  for (const auto& s : all_families()) {
    if (s.family() == htc::Family::Deterministic) continue;
    const auto m = s.moments();
    const double lo = quad_lower(s);
    const double hi = quad_upper(s);
    const auto pdf = [&](double x) { return pdf_of(s, x); };
    const double m1 = testutil::moment_by_quadrature(pdf, lo, hi, 1);
    const double m2 = testutil::moment_by_quadrature(pdf, lo, hi, 2);
    const double m3 = testutil::moment_by_quadrature(pdf, lo, hi, 3);
    CAPTURE(s.describe());
    // shape < 1 gamma has an integrable pdf singularity at 0, which slows
    // Simpson down; the looser tolerance is still far below any formula error
    const bool singular = s.family() == htc::Family::Gamma && s.param0() < 1.0;
    REQUIRE_THAT(m1, WithinAbs(m.mean, singular ? 1e-4 : 1e-6));
    REQUIRE_THAT(m2, WithinAbs(m.variance + m.mean * m.mean, singular ? 1e-4 : 1e-5));
    REQUIRE_THAT(m3, WithinAbs(m.third_moment, 1e-4));
  }
}

TEST_CASE("cdf basics") {
  const auto uni = DistributionSpec::uniform(0.0, 2.0);
  REQUIRE(uni.cdf(1.0) == 0.5);
  REQUIRE(uni.cdf(-1.0) == 0.0);
  REQUIRE(uni.cdf(2.5) == 1.0);

  const auto expo = DistributionSpec::exponential(1.0);
  REQUIRE(expo.cdf(0.0) == 0.0);

  const auto det = DistributionSpec::deterministic(3.0);
  REQUIRE(det.cdf(2.9) == 0.0);
  REQUIRE(det.cdf(3.0) == 1.0);  // right-continuous step
}

TEST_CASE("quantile basics and domain") {
  const auto uni = DistributionSpec::uniform(0.0, 2.0);
  REQUIRE_THAT(uni.quantile(0.25), WithinAbs(0.5, 1e-15));
  const auto expo = DistributionSpec::exponential(1.0);
  REQUIRE_THAT(expo.quantile(0.1), WithinAbs(0.1053605156578263, 1e-12));
  REQUIRE_THAT(expo.quantile(expo.cdf(0.7)), WithinAbs(0.7, 1e-12));
  REQUIRE_THROWS_AS(uni.quantile(0.0), htc::domain_error);
  REQUIRE_THROWS_AS(uni.quantile(1.0), htc::domain_error);
}

TEST_CASE("cdf is nondecreasing and inverts the quantile") {
  for (const auto& s : all_families()) {
    CAPTURE(s.describe());
    double prev_x = -1.0;
    for (int i = 1; i <= 99; ++i) {
      const double q = i / 100.0;
      const double x = s.quantile(q);
      REQUIRE(x >= prev_x);
      prev_x = x;
      if (s.family() == htc::Family::Deterministic) continue;  // flat cdf
      REQUIRE_THAT(s.cdf(x), WithinAbs(q, 1e-9));
    }
  }
}

TEST_CASE("sampling is reproducible and matches moments over 1e6 draws") {
  for (const auto& s : all_families()) {
    CAPTURE(s.describe());
    RandomStream r1(2024), r2(2024);
    REQUIRE(s.sample(r1) == s.sample(r2));

    RandomStream rng(31337);
    const int n = 1'000'000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = s.sample(rng);
    const auto stats = testutil::summarize(xs);
    const auto m = s.moments();
    REQUIRE_THAT(stats.mean, WithinAbs(m.mean, 3.0 * stats.se + 1e-12));

    // second and third raw moments, each within 3 of their own standard error
    std::vector<double> x2(n), x3(n);
    for (int i = 0; i < n; ++i) {
      x2[i] = xs[i] * xs[i];
      x3[i] = xs[i] * xs[i] * xs[i];
    }
    const auto s2 = testutil::summarize(x2);
    const auto s3 = testutil::summarize(x3);
    REQUIRE_THAT(s2.mean, WithinAbs(m.variance + m.mean * m.mean, 3.0 * s2.se + 1e-12));
    REQUIRE_THAT(s3.mean, WithinAbs(m.third_moment, 3.0 * s3.se + 1e-12));
  }
}

TEST_CASE("deterministic sampling is a point mass") {
  const auto det = DistributionSpec::deterministic(3.0);
  RandomStream rng(1);
  for (int i = 0; i < 10; ++i) REQUIRE(det.sample(rng) == 3.0);
}

TEST_CASE("sample mean spot checks") {
  RandomStream rng(555);
  const int n = 1'000'000;
  double sum = 0;
  const auto uni = DistributionSpec::uniform(0.0, 2.0);
  for (int i = 0; i < n; ++i) sum += uni.sample(rng);
  REQUIRE_THAT(sum / n, WithinAbs(1.0, 0.01));

  sum = 0;
  const auto expo = DistributionSpec::exponential(2.0);
  for (int i = 0; i < n; ++i) sum += expo.sample(rng);
  REQUIRE_THAT(sum / n, WithinAbs(0.5, 0.01));
}

TEST_CASE("residual sampling: mean matches (var + mean^2) / (2 mean)") {
  for (const auto& s : all_families()) {
    CAPTURE(s.describe());
    RandomStream rng(777);
    const int n = 1'000'000;
    std::vector<double> vs(n);
    for (auto& v : vs) v = s.sample_residual(rng);
    const auto stats = testutil::summarize(vs);
    REQUIRE_THAT(stats.mean, WithinAbs(s.residual_mean(), 3.0 * stats.se + 1e-12));
  }
}

TEST_CASE("residual of a point mass is uniform on [0, value]") {
  const auto det = DistributionSpec::deterministic(2.0);
  RandomStream rng(42);
  const int n = 1'000'000;
  std::vector<double> vs(n);
  for (auto& v : vs) {
    v = det.sample_residual(rng);
    REQUIRE(v >= 0.0);
    REQUIRE(v <= 2.0);
  }
  REQUIRE_THAT(testutil::summarize(vs).mean, WithinAbs(1.0, 0.01));
  const double ks =
      testutil::ks_distance(vs, [](double v) { return std::min(1.0, std::max(0.0, v / 2.0)); });
  REQUIRE(ks < 0.01);
}

TEST_CASE("residual of an exponential is the same exponential") {
  const auto expo = DistributionSpec::exponential(1.0);
  RandomStream rng(9);
  const int n = 1'000'000;
  std::vector<double> vs(n);
  for (auto& v : vs) v = expo.sample_residual(rng);
  const double ks = testutil::ks_distance(vs, [&](double v) { return expo.cdf(v); });
  REQUIRE(ks < 0.01);
}

TEST_CASE("residual samples follow the residual cdf") {
  for (const auto& s : {DistributionSpec::uniform(0.5, 3.0), DistributionSpec::gamma(2.5, 0.8),
                        DistributionSpec::gamma(0.7, 1.3)}) {
    CAPTURE(s.describe());
    RandomStream rng(2718);
    const int n = 200'000;
    std::vector<double> vs(n);
    for (auto& v : vs) v = s.sample_residual(rng);
    const double ks = testutil::ks_distance(vs, [&](double v) { return s.residual_cdf(v); });
    REQUIRE(ks < 0.01);
  }
}
