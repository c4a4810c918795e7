#pragma once

#include <nevan/divisor.hpp>

#include <functional>
#include <optional>

namespace nevan {

/// Exact divisor data for n >= 2 maps, supplied by the caller:
/// unintegrated count n(r, a) and integrated count N(r, a).
struct DivisorData {
  double n = 0.0;
  double N = 0.0;
};
using DivisorOracle = std::function<DivisorData(double r, const Target& a)>;

namespace detail {

inline double positive_part(double x) {
  if (std::isnan(x)) return x;
  return x > 0.0 ? x : 0.0;
}

// log|num/den| from two compiled programs; NaN when both vanish.
inline double log_ratio(const Program& num, const Program& den, std::span<const cplx> z) {
  const double a = num.eval_logmag(z).log_abs;
  const double b = den.eval_logmag(z).log_abs;
  if (std::isinf(a) && std::isinf(b)) return std::numeric_limits<double>::quiet_NaN();
  return a - b;
}

}  // namespace detail

/// m(r, f) for a = infinity, m(r, 1/(f - a)) otherwise.
inline IntegralEstimate proximity(const MeromorphicMap& f, const Target& a, double r, const QuadConfig& cfg) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "proximity: radius must be > 0");
  if (a.is_infinity()) {
    const Program& num = f.p1();
    const Program& den = f.p0();
    return sphere_integral([&](std::span<const cplx> z) { return detail::positive_part(detail::log_ratio(num, den, z)); },
                           f.dim(), r, cfg);
  }
  const Program g(f.divisor_function(a));
  const Program& den = f.p0();
  return sphere_integral([&](std::span<const cplx> z) { return detail::positive_part(detail::log_ratio(den, g, z)); },
                         f.dim(), r, cfg);
}

/// Integral of |log|f|| over the sphere, i.e. m(r, f) + m(r, 1/f).
inline IntegralEstimate abs_log_mean(const MeromorphicMap& f, double r, const QuadConfig& cfg) {
  return sphere_integral(
      [&](std::span<const cplx> z) {
        const double v = detail::log_ratio(f.p1(), f.p0(), z);
        return std::isnan(v) ? v : std::abs(v);
      },
      f.dim(), r, cfg);
}

/// Integral of log|f| over the sphere.
inline IntegralEstimate log_mean(const MeromorphicMap& f, double r, const QuadConfig& cfg) {
  return sphere_integral([&](std::span<const cplx> z) { return detail::log_ratio(f.p1(), f.p0(), z); }, f.dim(), r, cfg);
}

inline double log_abs_at_origin(const MeromorphicMap& f) {
  const CVec z(static_cast<std::size_t>(f.dim()), 0.0);
  return f.log_abs(z);
}

/// N(r, f) for a = infinity, N(r, 1/(f - a)) otherwise.
///
/// n = 1 sums over the exactly resolved divisor (a divisor point at the
/// origin contributes n(0) log r).  n >= 2 uses the Jensen identity when
/// the complementary divisor is empty and the oracle otherwise.
inline double integrated_counting(const MeromorphicMap& f, const Target& a, double r, const QuadConfig& cfg,
                                  const DivisorOracle& oracle = {}) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "integrated_counting: radius must be > 0");
  const Expr g = f.divisor_function(a);
  if (g.zero_free()) return 0.0;
  if (f.dim() == 1) return integrated_count(divisor_in_disk(f, a, r, cfg), r);

  const Expr& other = a.is_infinity() ? f.f1() : f.f0();
  if (!other.zero_free()) {
    if (!oracle) throw Error(ErrorKind::NeedsDivisorOracle, "integrated_counting: both divisors are nontrivial for n >= 2");
    return oracle(r, a).N;
  }
  // f - a (or 1/f) has no poles: N = Jensen integral minus the base value.
  const MeromorphicMap h = a.is_infinity() ? MeromorphicMap(f.dim(), f.f1(), f.f0()) : MeromorphicMap(f.dim(), f.f0(), g);
  const double base = log_abs_at_origin(h);
  if (!std::isfinite(base))
    throw Error(ErrorKind::InvalidArgument, "integrated_counting: base point lies on a divisor; recenter first");
  return log_mean(h, r, cfg).value - base;
}

struct Characteristic {
  double m = 0.0;
  double N = 0.0;
  double T = 0.0;
  double err = 0.0;
};

/// (m(r,f), N(r,f), T(r,f)).
inline Characteristic characteristic(const MeromorphicMap& f, double r, const QuadConfig& cfg,
                                     const DivisorOracle& oracle = {}) {
  if (f.dim() >= 2 && !f.regular_at_origin() && !oracle) return characteristic(recenter(f).map, r, cfg);
  const IntegralEstimate m = proximity(f, Target::infinity(), r, cfg);
  const double N = integrated_counting(f, Target::infinity(), r, cfg, oracle);
  return {m.value, N, m.value + N, m.abs_error_estimate};
}

struct ProfileRow {
  double r = 0.0;
  double m = 0.0;
  double N = 0.0;
  double T = 0.0;
  double err = 0.0;
};

struct NevanlinnaProfile {
  std::string f_id;
  std::string target = "inf";
  std::vector<ProfileRow> rows;
};

/// Radii from rmin to rmax inclusive, geometric or uniform.
inline std::vector<double> radius_grid(double rmin, double rmax, int points, bool log_spaced) {
  if (!(rmin > 0) || !(rmax > rmin) || points < 2)
    throw Error(ErrorKind::InvalidArgument, "radius grid needs 0 < rmin < rmax and at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    grid[static_cast<std::size_t>(i)] =
        log_spaced ? std::exp(std::log(rmin) + t * (std::log(rmax) - std::log(rmin))) : rmin + t * (rmax - rmin);
  }
  grid.back() = rmax;
  return grid;
}

inline NevanlinnaProfile profile(const MeromorphicMap& f, const std::vector<double>& r_grid, const QuadConfig& cfg,
                                 const DivisorOracle& oracle = {}) {
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0) || (i > 0 && !(r_grid[i] > r_grid[i - 1])))
      throw Error(ErrorKind::InvalidArgument, "profile: radius grid must be positive and strictly increasing");
  }
  NevanlinnaProfile out;
  out.f_id = f.to_string();
  if (r_grid.empty()) return out;
  // one divisor resolution serves the whole grid in one variable
  std::vector<DivisorPoint> poles;
  if (f.dim() == 1 && !f.f0().zero_free()) poles = divisor_in_disk(f, Target::infinity(), r_grid.back(), cfg);
  for (double r : r_grid) {
    const IntegralEstimate m = proximity(f, Target::infinity(), r, cfg);
    const double N = f.dim() == 1 ? integrated_count(poles, r) : integrated_counting(f, Target::infinity(), r, cfg, oracle);
    out.rows.push_back({r, m.value, N, m.value + N, m.abs_error_estimate});
  }
  return out;
}

/// |N(r,1/f) - N(r,f) - (integral of log|f|) + log|f(0)|| after moving the
/// base point off the divisors.
inline double jensen_residual(const MeromorphicMap& f, double r, const QuadConfig& cfg, const DivisorOracle& oracle = {}) {
  const Recentered base = recenter(f);
  const MeromorphicMap& g = base.map;
  const DivisorOracle shifted_oracle = base.moved() ? DivisorOracle{} : oracle;
  const double n_zero = integrated_counting(g, Target::finite(0.0), r, cfg, shifted_oracle);
  const double n_pole = integrated_counting(g, Target::infinity(), r, cfg, shifted_oracle);
  const double integral = log_mean(g, r, cfg).value;
  return std::abs(n_zero - n_pole - integral + log_abs_at_origin(g));
}

struct FmtResidual {
  double residual = 0.0;
  /// T(r, f) - T(r, f - a); bounded by log+|a| + log 2 in modulus.
  double t_gap = 0.0;
};

/// First main theorem check: |T(r, f-a) - m(r,1/(f-a)) - N(r,1/(f-a)) - log|f(0)-a||.
inline FmtResidual fmt_residual(const MeromorphicMap& f, cplx a, double r, const QuadConfig& cfg,
                                const DivisorOracle& oracle = {}) {
  const std::array<cplx, 1> targets{a};
  const Recentered base = recenter(f, targets);
  const MeromorphicMap& g = base.map;
  const DivisorOracle use_oracle = base.moved() ? DivisorOracle{} : oracle;
  const Target ta = Target::finite(a);
  const MeromorphicMap shifted(g.dim(), g.f0(), g.divisor_function(ta));  // f - a

  const double n_pole = integrated_counting(g, Target::infinity(), r, cfg, use_oracle);
  const double m_shift = proximity(shifted, Target::infinity(), r, cfg).value;
  const double m_a = proximity(g, ta, r, cfg).value;
  const double n_a = integrated_counting(g, ta, r, cfg, use_oracle);
  const double log_base = log_abs_at_origin(shifted);
  const double t_shift = m_shift + n_pole;
  const double t_f = proximity(g, Target::infinity(), r, cfg).value + n_pole;
  return {std::abs(t_shift - m_a - n_a - log_base), t_f - t_shift};
}

struct GrowthEstimate {
  double value = 0.0;         // fitted exponent
  double fit_residual = 0.0;  // rms residual of the fit
  double slope = 0.0;         // plain log-log least-squares slope
  int rows_used = 0;
};

namespace detail {

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double sse = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    fit.sse += e * e;
  }
  return fit;
}

// Fits y = c + k (r^s - 1)/s (log r at s = 0) with k >= 0 over s in [0, 4];
// the growth exponent of y is s.
inline GrowthEstimate box_cox_fit(const std::vector<double>& r, const std::vector<double>& y) {
  GrowthEstimate best;
  double best_sse = std::numeric_limits<double>::infinity();
  std::vector<double> b(r.size());
  for (int step = 0; step <= 4000; ++step) {
    const double s = step * 1e-3;
    for (std::size_t i = 0; i < r.size(); ++i) b[i] = s == 0.0 ? std::log(r[i]) : std::expm1(s * std::log(r[i])) / s;
    const LineFit fit = least_squares(b, y);
    if (fit.slope < 0.0) continue;
    if (fit.sse < best_sse) {
      best_sse = fit.sse;
      best.value = s;
    }
  }
  if (!std::isfinite(best_sse)) best_sse = 0.0;
  best.fit_residual = std::sqrt(best_sse / static_cast<double>(r.size()));
  best.rows_used = static_cast<int>(r.size());
  return best;
}

inline std::vector<ProfileRow> top_half(const NevanlinnaProfile& p, double floor, std::size_t min_rows, const char* what) {
  std::vector<ProfileRow> ok;
  for (const auto& row : p.rows)
    if (row.T >= floor) ok.push_back(row);
  if (ok.size() < min_rows)
    throw Error(ErrorKind::InsufficientGrowth,
                std::string(what) + ": needs at least " + std::to_string(min_rows) + " rows above the growth floor");
  return {ok.begin() + static_cast<std::ptrdiff_t>(ok.size() / 2), ok.end()};
}

}  // namespace detail

/// Order: growth exponent of T(r) over the top half of rows with T >= 1.
inline GrowthEstimate estimate_order(const NevanlinnaProfile& p) {
  const auto rows = detail::top_half(p, 1.0, 8, "estimate_order");
  std::vector<double> r, y, lr, ly;
  for (const auto& row : rows) {
    r.push_back(row.r);
    y.push_back(row.T);
    lr.push_back(std::log(row.r));
    ly.push_back(std::log(row.T));
  }
  GrowthEstimate g = detail::box_cox_fit(r, y);
  g.slope = detail::least_squares(lr, ly).slope;
  return g;
}

/// Hyper-order: growth exponent of log T(r), preferring rows with T >= e^3.
inline GrowthEstimate estimate_hyper_order(const NevanlinnaProfile& p) {
  auto rows = detail::top_half(p, std::exp(1.0), 8, "estimate_hyper_order");
  std::vector<ProfileRow> high;
  for (const auto& row : rows)
    if (row.T >= std::exp(3.0)) high.push_back(row);
  if (high.size() >= 3) rows = high;
  std::vector<double> r, y, lr, ly;
  for (const auto& row : rows) {
    r.push_back(row.r);
    y.push_back(std::log(row.T));
    lr.push_back(std::log(row.r));
    ly.push_back(std::log(std::log(row.T)));
  }
  GrowthEstimate g = detail::box_cox_fit(r, y);
  g.slope = detail::least_squares(lr, ly).slope;
  return g;
}

}  // namespace nevan
