#include <nevan/quad.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace nevan;

namespace {

QuadConfig tight() {
  QuadConfig c;
  c.rel_tol = 1e-10;
  return c;
}

double one(std::span<const cplx>) { return 1.0; }

}  // namespace

TEST(Circle, ConstantHasUnitMass) {
  const IntegralEstimate e = circle_integral([](double) { return 1.0; }, 3.0, QuadConfig{});
  EXPECT_DOUBLE_EQ(e.value, 1.0);
  EXPECT_GE(e.abs_error_estimate, 0.0);
  EXPECT_GE(e.nodes_used, 64);
}

TEST(Circle, MeanValueOfLogAgainstBruteForce) {
  const double r = 2.0;
  const cplx a(0.7, -0.4);
  auto g = [&](double t) { return std::log(std::abs(std::polar(r, t) - a)); };
  const IntegralEstimate e = circle_integral(g, r, tight());
  // brute force: midpoint rule with 2^20 nodes
  const int M = 1 << 20;
  double s = 0.0;
  for (int k = 0; k < M; ++k) s += g(kTwoPi * (k + 0.5) / M);
  EXPECT_NEAR(e.value, std::log(r), 1e-12);
  EXPECT_NEAR(e.value, s / M, 1e-10);
}

TEST(Circle, PositivePartOfCosine) {
  const double r = kPi;
  QuadConfig cfg;
  cfg.rel_tol = 1e-9;
  const IntegralEstimate e = circle_integral([&](double t) { return std::max(0.0, r * std::cos(t)); }, r, cfg);
  EXPECT_NEAR(e.value, 1.0, 1e-8);
}

TEST(Circle, JitterOnSingularNode) {
  // log|r e^{it} - r| is -inf at the node t = 0; the integral is still log r.
  const double r = 1.5;
  QuadConfig cfg;
  cfg.rel_tol = 1e-3;
  const IntegralEstimate e =
      circle_integral([&](double t) { return std::log(std::abs(std::polar(r, t) - r)); }, r, cfg);
  EXPECT_TRUE(std::isfinite(e.value));
  EXPECT_NEAR(e.value, std::log(r), 1e-3);
}

TEST(Circle, RefinementErrorsDecrease) {
  QuadConfig cfg;
  const TrapezoidTrace t = circle_trapezoid([](double x) { return 1.0 / (1.3 + std::cos(x)); }, cfg, 5, false);
  ASSERT_GE(t.errors.size(), 2u);
  for (std::size_t i = 1; i < t.errors.size(); ++i) {
    if (t.errors[i - 1] < 1e-13) break;
    EXPECT_LE(t.errors[i], t.errors[i - 1]);
  }
}

TEST(Circle, Validation) {
  QuadConfig cfg;
  cfg.circle_nodes = 32;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = QuadConfig{};
  cfg.jitter_radius = 1e-2;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = QuadConfig{};
  cfg.mc_samples = 500;
  EXPECT_NO_THROW(cfg.validate(2));
  EXPECT_THROW(cfg.validate(3), Error);
  EXPECT_THROW(circle_integral([](double) { return 1.0; }, 0.0, QuadConfig{}), Error);
}

TEST(Sphere, Normalization) {
  QuadConfig cfg;
  for (int n : {1, 2, 3})
    for (double r : {0.5, 1.0, 10.0}) EXPECT_NEAR(sphere_integral(one, n, r, cfg).value, 1.0, 1e-6) << n << " " << r;
}

TEST(Sphere, CoordinateSymmetry) {
  const IntegralEstimate e = sphere_integral(
      [](std::span<const cplx> z) { return std::norm(z[0]) / (std::norm(z[0]) + std::norm(z[1])); }, 2, 2.5, tight());
  EXPECT_NEAR(e.value, 0.5, 1e-9);
}

TEST(Sphere, LogDistanceClosedFormAndBruteForce) {
  // On the sphere of radius 2 in C^2, t = |z1|^2/4 is uniform on [0,1] and the
  // circle average of log|z1 - 1| is log+|z1|, so the mean is
  // int_{1/4}^1 log(2 sqrt t) dt.
  const double exact = 0.75 * std::log(2.0) + 0.5 * ((1.0 * 0.0 - 1.0) - (0.25 * std::log(0.25) - 0.25));
  QuadConfig cfg;
  cfg.rel_tol = 1e-5;
  const IntegralEstimate e =
      sphere_integral([](std::span<const cplx> z) { return std::log(std::abs(z[0] - 1.0)); }, 2, 2.0, cfg);
  EXPECT_NEAR(e.value, exact, 5e-5);

  // brute force in Hopf coordinates z1 = 2 cos(eta) e^{i a}, z2 = 2 sin(eta) e^{i b}
  const int ne = 2000, na = 512;
  double s = 0.0;
  for (int i = 0; i < ne; ++i) {
    const double t = (i + 0.5) / ne;  // t = cos^2 eta, uniform
    const double rho = 2.0 * std::sqrt(t);
    double inner = 0.0;
    for (int k = 0; k < na; ++k) inner += std::log(std::abs(std::polar(rho, kTwoPi * (k + 0.5) / na) - 1.0));
    s += inner / na;
  }
  EXPECT_NEAR(e.value, s / ne, 1e-4);
}

TEST(Sphere, FiberConsistencyAgainstMonteCarlo) {
  // h depends on z2 only; compare with an independent uniform sampler on S^3.
  auto h = [](std::span<const cplx> z) { return std::cos(z[1].real()) * std::exp(-std::norm(z[1]) / 3.0); };
  const double r = 1.8;
  QuadConfig cfg;
  cfg.rel_tol = 1e-8;
  const IntegralEstimate e = sphere_integral(h, 2, r, cfg);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  const int M = 2000000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < M; ++k) {
    double x[4], n2 = 0.0;
    for (double& xi : x) {
      xi = g(rng);
      n2 += xi * xi;
    }
    const double sc = r / std::sqrt(n2);
    const std::array<cplx, 2> z{cplx(x[0] * sc, x[1] * sc), cplx(x[2] * sc, x[3] * sc)};
    const double v = h(z);
    s += v;
    s2 += v * v;
  }
  const double mean = s / M, sigma = std::sqrt((s2 / M - mean * mean) / M);
  EXPECT_NEAR(e.value, mean, 4.0 * sigma + 3.0 * e.abs_error_estimate);
}

TEST(Sphere, MonteCarloDimensionThree) {
  // |z1|^2/|z|^2 averages to 1/3 on the sphere in C^3.
  QuadConfig cfg;
  cfg.mc_samples = 20000;
  const IntegralEstimate e = sphere_integral(
      [](std::span<const cplx> z) { return std::norm(z[0]) / (std::norm(z[0]) + std::norm(z[1]) + std::norm(z[2])); }, 3,
      1.0, cfg);
  EXPECT_NEAR(e.value, 1.0 / 3.0, 4.0 * e.abs_error_estimate + 1e-4);
  EXPECT_GT(e.abs_error_estimate, 0.0);
}

TEST(Sphere, DeterministicAcrossThreads) {
  auto h = [](std::span<const cplx> z) {
    double s = 0.0;
    for (cplx x : z) s += std::log1p(std::norm(x - cplx(0.3, 0.1)));
    return s;
  };
  for (int n : {1, 2, 3}) {
    QuadConfig a;
    a.rel_tol = 1e-5;
    QuadConfig b = a;
    b.threads = 4;
    const IntegralEstimate x = sphere_integral(h, n, 1.7, a), y = sphere_integral(h, n, 1.7, b);
    EXPECT_EQ(x.value, y.value) << n;
    EXPECT_EQ(x.abs_error_estimate, y.abs_error_estimate) << n;
    EXPECT_EQ(x.nodes_used, y.nodes_used) << n;
  }
}

TEST(Ball, ClosedForms) {
  QuadConfig cfg;
  cfg.rel_tol = 1e-9;
  EXPECT_NEAR(ball_integral([](std::span<const cplx>) { return 1.0; }, 1, 2.0, cfg).value, 4.0, 1e-9);
  // |x|^2 is uniform on [0,1]: int (1 - t)^(1/2) dt = 2/3
  EXPECT_NEAR(
      ball_integral([](std::span<const cplx> x) { return std::sqrt(std::max(0.0, 1.0 - std::norm(x[0]))); }, 1, 1.0, cfg).value,
      2.0 / 3.0, 1e-7);
  EXPECT_NEAR(ball_integral([](std::span<const cplx> x) { return std::norm(x[0]); }, 1, 1.0, cfg).value, 0.5, 1e-9);
}

TEST(Ball, MonteCarloMassAndMoment) {
  QuadConfig cfg;
  cfg.mc_samples = 40000;
  // mass of B_2(r) is r^4; E|xi|^2 over B_2(1) is 2/3
  EXPECT_NEAR(ball_integral([](std::span<const cplx>) { return 1.0; }, 2, 1.5, cfg).value, std::pow(1.5, 4), 1e-12);
  const IntegralEstimate e =
      ball_integral([](std::span<const cplx> x) { return std::norm(x[0]) + std::norm(x[1]); }, 2, 1.0, cfg);
  EXPECT_NEAR(e.value, 2.0 / 3.0, 4.0 * e.abs_error_estimate);
}

TEST(PairwiseSum, FixedShape) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
  const double a = pairwise_sum(v), b = pairwise_sum(v);
  EXPECT_EQ(a, b);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NEAR(a, naive, 1e-12);
}
