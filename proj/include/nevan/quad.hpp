#pragma once

// Deterministic quadrature over circles, spheres (by fiber integration) and
// balls, all normalized the same way: the circle and sphere measures have
// total mass one, and the ball B_d(r) has mass r^(2d).

#include <nevan/error.hpp>
#include <nevan/expr.hpp>
#include <nevan/parallel.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <random>
#include <span>
#include <vector>

namespace nevan {

struct QuadConfig {
  int circle_nodes = 64;
  int max_refinement_levels = 14;
  double rel_tol = 1e-6;
  double jitter_radius = 1e-9;  // fraction of r; radius nudge for contour counts
  int mc_samples = 4000;
  std::uint64_t rng_seed = 42;
  int stratification_levels = 16;
  int threads = 1;  // never changes results, only wall time

  void validate(int n = 1) const {
    if (circle_nodes < 64) throw Error(ErrorKind::InvalidArgument, "circle_nodes must be >= 64");
    if (max_refinement_levels < 1) throw Error(ErrorKind::InvalidArgument, "max_refinement_levels must be >= 1");
    if (!(rel_tol > 0)) throw Error(ErrorKind::InvalidArgument, "rel_tol must be > 0");
    if (!(jitter_radius >= 0 && jitter_radius <= 1e-3))
      throw Error(ErrorKind::InvalidArgument, "jitter_radius must lie in [0, 1e-3]");
    if (n >= 3 && mc_samples < 1000) throw Error(ErrorKind::InvalidArgument, "mc_samples must be >= 1000 when n >= 3");
    if (stratification_levels < 1) throw Error(ErrorKind::InvalidArgument, "stratification_levels must be >= 1");
  }

  QuadConfig single_threaded() const {
    QuadConfig c = *this;
    c.threads = 1;
    return c;
  }
};

struct IntegralEstimate {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  long long nodes_used = 0;
  bool refined = false;
};

/// Successive trapezoid estimates for one circle integral.
struct TrapezoidTrace {
  std::vector<double> estimates;
  std::vector<double> errors;  // |I_k - I_{k-1}|, starting at level 1
  long long nodes = 0;
  bool converged = false;
};

namespace detail {

template <class G>
double sample_node(G& g, double theta, double h, char& jittered) {
  auto call = [&](double t) {
    try {
      return static_cast<double>(g(t));
    } catch (const Error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  double v = call(theta);
  if (std::isfinite(v)) {
    jittered = 0;
    return v;
  }
  // Node sits on a log singularity (divisor or indeterminacy point):
  // move it by half a sub-interval.
  jittered = 1;
  v = call(theta + 0.5 * h);
  if (!std::isfinite(v)) v = call(theta - 0.5 * h);
  if (!std::isfinite(v)) throw Error(ErrorKind::NoConvergence, "circle_integral: non-integrable singularity");
  return v;
}

}  // namespace detail

/// Trapezoid rule on [0, 2pi) with dyadic refinement; g receives the angle.
/// Stops early once successive estimates agree to rel_tol * max(1, |I|)
/// when `stop_on_convergence` is set.
template <class G>
TrapezoidTrace circle_trapezoid(G&& g, const QuadConfig& cfg, int levels, bool stop_on_convergence = true) {
  TrapezoidTrace trace;
  std::size_t count = static_cast<std::size_t>(cfg.circle_nodes);
  std::vector<double> values(count);
  std::vector<char> jittered(count, 0);
  const int threads = count >= 256 ? cfg.threads : 1;

  double h = kTwoPi / static_cast<double>(count);
  parallel_for(count, threads, [&](std::size_t i) {
    values[i] = detail::sample_node(g, h * static_cast<double>(i), h, jittered[i]);
  });
  trace.nodes = static_cast<long long>(count);
  trace.estimates.push_back(pairwise_sum(values) / static_cast<double>(count));

  for (int level = 1; level <= levels; ++level) {
    const std::size_t next = 2 * count;
    const double hn = kTwoPi / static_cast<double>(next);
    std::vector<double> nv(next);
    std::vector<char> nj(next, 0);
    const int nthreads = next >= 256 ? cfg.threads : 1;
    parallel_for(count, nthreads, [&](std::size_t i) {
      if (jittered[i]) {
        nv[2 * i] = detail::sample_node(g, hn * static_cast<double>(2 * i), hn, nj[2 * i]);
        nj[2 * i] = 1;
      } else {
        nv[2 * i] = values[i];
      }
      nv[2 * i + 1] = detail::sample_node(g, hn * static_cast<double>(2 * i + 1), hn, nj[2 * i + 1]);
    });
    values.swap(nv);
    jittered.swap(nj);
    count = next;
    trace.nodes += static_cast<long long>(count / 2);
    const double est = pairwise_sum(values) / static_cast<double>(count);
    const double diff = std::abs(est - trace.estimates.back());
    trace.estimates.push_back(est);
    trace.errors.push_back(diff);
    if (diff <= cfg.rel_tol * std::max(1.0, std::abs(est))) {
      trace.converged = true;
      if (stop_on_convergence) break;
    }
  }
  return trace;
}

/// (1/2pi) * integral of g(theta) over [0, 2pi).  `r` is the circle radius
/// the caller parametrizes; it only enters validation.
template <class G>
IntegralEstimate circle_integral(G&& g, double r, const QuadConfig& cfg) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "circle_integral: radius must be > 0");
  const TrapezoidTrace t = circle_trapezoid(g, cfg, cfg.max_refinement_levels);
  const double value = t.estimates.back();
  const double err = t.errors.empty() ? 0.0 : t.errors.back();
  if (!t.converged && err > 10.0 * cfg.rel_tol * std::max(1.0, std::abs(value)))
    throw Error(ErrorKind::NoConvergence, "circle_integral: refinement limit reached");
  return {value, err, t.nodes, t.estimates.size() > 2};
}

namespace detail {

struct FiberSample {
  double value;
  double err;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Average of `fiber(w)` over the ball |w| <= r in C^dim against the
/// normalized Lebesgue measure (mass one).  dim == 1 uses a polar product
/// rule (tanh-sinh in |w|^2, adaptive trapezoid in arg w); dim >= 2 uses
/// seeded Monte Carlo stratified over shells of equal measure.
template <class F>
IntegralEstimate ball_average(F&& fiber, int dim, double r, const QuadConfig& cfg) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "ball integral: radius must be > 0");
  std::mutex mu;
  double inner_err = 0.0;
  long long nodes = 0;
  auto record = [&](const FiberSample& s) {
    std::lock_guard lock(mu);
    inner_err = std::max(inner_err, s.err);
    ++nodes;
  };

  if (dim == 1) {
    double mid_err = 0.0;
    const double r2 = r * r;
    auto radial = [&](double v) -> double {
      v = std::clamp(v, 0.0, r2);
      const double rho = std::sqrt(v);
      if (rho == 0.0) {
        std::array<cplx, 1> w{cplx(0.0, 0.0)};
        const FiberSample s = fiber(std::span<const cplx>(w));
        record(s);
        return s.value;
      }
      auto angular = [&](double phi) {
        std::array<cplx, 1> w{std::polar(rho, phi)};
        const FiberSample s = fiber(std::span<const cplx>(w));
        record(s);
        return s.value;
      };
      const IntegralEstimate e = circle_integral(angular, rho, cfg);
      mid_err = std::max(mid_err, e.abs_error_estimate);
      return e.value;
    };
    const std::size_t max_ref = static_cast<std::size_t>(std::clamp(cfg.max_refinement_levels, 4, 12));
    boost::math::quadrature::tanh_sinh<double> integrator(max_ref);
    double err = 0.0, l1 = 0.0;
    std::size_t levels = 0;
    const double total = integrator.integrate(radial, 0.0, r2, cfg.rel_tol, &err, &l1, &levels);
    if (err > 10.0 * cfg.rel_tol * std::max(l1, r2))
      throw Error(ErrorKind::NoConvergence, "ball integral: radial refinement limit reached");
    return {total / r2, err / r2 + mid_err + inner_err, nodes, levels > 1};
  }

  // dim >= 2: |w|^(2 dim) / r^(2 dim) is uniform on [0,1]; strata split it evenly.
  const int strata = cfg.stratification_levels;
  const int per = std::max(2, cfg.mc_samples / strata);
  const int real_dim = 2 * dim;
  std::vector<double> means(static_cast<std::size_t>(strata)), vars(static_cast<std::size_t>(strata));
  parallel_for(static_cast<std::size_t>(strata), cfg.threads, [&](std::size_t k) {
    std::mt19937_64 rng(splitmix64(cfg.rng_seed ^ splitmix64(k + 1)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> vals(static_cast<std::size_t>(per));
    std::array<cplx, 9> w{};
    std::array<double, 18> x{};
    for (int s = 0; s < per; ++s) {
      const double t = (static_cast<double>(k) + unif(rng)) / strata;
      const double rad = r * std::pow(t, 1.0 / real_dim);
      double norm2 = 0.0;
      for (int i = 0; i < real_dim; ++i) {
        x[i] = gauss(rng);
        norm2 += x[i] * x[i];
      }
      const double scale = rad / std::sqrt(norm2);
      for (int j = 0; j < dim; ++j) w[j] = {x[2 * j] * scale, x[2 * j + 1] * scale};
      const FiberSample fs = fiber(std::span<const cplx>(w.data(), static_cast<std::size_t>(dim)));
      record(fs);
      vals[static_cast<std::size_t>(s)] = fs.value;
    }
    const double mean = pairwise_sum(vals) / per;
    std::vector<double> sq(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) sq[i] = (vals[i] - mean) * (vals[i] - mean);
    means[k] = mean;
    vars[k] = pairwise_sum(sq) / (per - 1);
  });
  const double mean = pairwise_sum(means) / strata;
  const double sigma = std::sqrt(pairwise_sum(vars) / per) / strata;
  return {mean, sigma + inner_err, nodes, false};
}

}  // namespace detail

/// Integral of h over the closed ball of radius r in C^dim against the
/// Lebesgue measure normalized so that the ball has mass r^(2 dim).
template <class H>
IntegralEstimate ball_integral(H&& h, int dim, double r, const QuadConfig& cfg) {
  if (dim < 1 || dim > 8) throw Error(ErrorKind::InvalidArgument, "ball_integral: dimension must be in 1..8");
  auto fiber = [&](std::span<const cplx> w) -> detail::FiberSample {
    return {static_cast<double>(h(w)), 0.0};
  };
  IntegralEstimate e = detail::ball_average(fiber, dim, r, cfg);
  const double mass = std::pow(r, 2.0 * dim);
  e.value *= mass;
  e.abs_error_estimate *= mass;
  return e;
}

/// Average of h over the sphere |z| = r in C^n (mass one), computed for
/// n >= 2 by integrating circle averages over the fibers
/// {(w, zeta) : |zeta| = sqrt(r^2 - |w|^2)} against the ball measure in w.
template <class H>
IntegralEstimate sphere_integral(H&& h, int n, double r, const QuadConfig& cfg) {
  if (n < 1 || n > 9) throw Error(ErrorKind::InvalidArgument, "sphere_integral: dimension must be in 1..9");
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "sphere_integral: radius must be > 0");
  cfg.validate(n);
  if (n == 1) {
    auto g = [&](double theta) {
      std::array<cplx, 1> z{std::polar(r, theta)};
      return static_cast<double>(h(std::span<const cplx>(z)));
    };
    return circle_integral(g, r, cfg);
  }
  const QuadConfig inner = cfg.single_threaded();
  const double r2 = r * r;
  auto fiber = [&](std::span<const cplx> w) -> detail::FiberSample {
    double w2 = 0.0;
    for (cplx c : w) w2 += std::norm(c);
    const double p = std::sqrt(std::max(0.0, r2 - w2));
    std::array<cplx, 9> z{};
    std::copy(w.begin(), w.end(), z.begin());
    const std::span<const cplx> zs(z.data(), static_cast<std::size_t>(n));
    if (p == 0.0) return {static_cast<double>(h(zs)), 0.0};
    auto g = [&](double theta) {
      std::array<cplx, 9> zz = z;
      zz[static_cast<std::size_t>(n - 1)] = std::polar(p, theta);
      return static_cast<double>(h(std::span<const cplx>(zz.data(), static_cast<std::size_t>(n))));
    };
    const IntegralEstimate e = circle_integral(g, p, inner);
    return {e.value, e.abs_error_estimate};
  };
  return detail::ball_average(fiber, n - 1, r, cfg);
}

}  // namespace nevan
