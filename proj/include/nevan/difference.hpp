#pragma once

#include <nevan/nevanlinna.hpp>

namespace nevan {

struct BoundReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double r = 0.0;
  double s_or_R = 0.0;
  double delta = 0.0;
  CVec c;
  int n = 1;
  double margin = 0.0;  // rhs - lhs
  bool holds = false;   // lhs <= rhs + lhs_err + rhs_err
  double lhs_err = 0.0;
  double rhs_err = 0.0;
  CVec offset;  // base-point translation applied before evaluation
};

struct SmtLedger {
  double r = 0.0;
  double lhs = 0.0;  // m(r,f) + sum_j m(r, 1/(f - a_j))
  double two_T = 0.0;
  double n_delta = 0.0;  // 2N(r,f) - N(r, D f) + N(r, 1/D f)
  double slack = 0.0;    // two_T - n_delta - lhs
  CVec offset;
};

struct HolderParams {
  double delta = 0.5;
  int q = 3;
  double C = 1.6;
  double C_err = 0.0;
};

namespace detail {

inline double norm(std::span<const cplx> c) {
  double s = 0.0;
  for (cplx x : c) s += std::norm(x);
  return std::sqrt(s);
}

inline void finish(BoundReport& rep) {
  rep.margin = rep.rhs - rep.lhs;
  rep.holds = rep.lhs <= rep.rhs + rep.lhs_err + rep.rhs_err;
}

}  // namespace detail

/// True when f(z + c) - f(z) vanishes (relative 1e-10) on a seeded random grid.
inline bool numerically_periodic(const MeromorphicMap& f, std::span<const cplx> c, int samples = 32) {
  const Program s0(shift(f.f0(), c)), s1(shift(f.f1(), c));
  std::mt19937_64 rng(0xd1ff);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  CVec z(static_cast<std::size_t>(f.dim()));
  int tested = 0;
  for (int k = 0; k < 4 * samples && tested < samples; ++k) {
    for (auto& zj : z) zj = {u(rng), u(rng)};
    const LogMag a0 = f.p0().eval_logmag(z), a1 = f.p1().eval_logmag(z);
    const LogMag b0 = s0.eval_logmag(z), b1 = s1.eval_logmag(z);
    if (a0.is_zero() || b0.is_zero()) continue;
    ++tested;
    // compare b1 a0 and a1 b0 in log-domain
    const LogMag x = logmag::mul(b1, a0), y = logmag::mul(a1, b0);
    if (x.is_zero() && y.is_zero()) continue;
    if (x.is_zero() != y.is_zero()) return false;
    const double scale = std::max(x.log_abs, y.log_abs);
    const cplx xs = std::polar(std::exp(x.log_abs - scale), x.phase);
    const cplx ys = std::polar(std::exp(y.log_abs - scale), y.phase);
    if (std::abs(xs - ys) > 1e-10 * (std::abs(xs) + std::abs(ys))) return false;
  }
  return tested > 0;
}

/// Delta_c f = f(z + c) - f(z) as a map (shift(f0) f0, shift(f1) f0 - f1 shift(f0)).
/// Throws IdenticallyZero when f is numerically c-periodic.
inline MeromorphicMap delta_map(const MeromorphicMap& f, std::span<const cplx> c) {
  if (static_cast<int>(c.size()) != f.dim()) throw Error(ErrorKind::InvalidArgument, "delta_map: shift has wrong dimension");
  if (numerically_periodic(f, c)) throw Error(ErrorKind::IdenticallyZero, "delta_map: f is periodic with the given shift");
  const Expr s0 = shift(f.f0(), c), s1 = shift(f.f1(), c);
  return MeromorphicMap(f.dim(), s0 * f.f0(), s1 * f.f0() - f.f1() * s0);
}

/// Integral of log+ |f(z + c)/f(z)| over the sphere of radius r.
inline IntegralEstimate diff_quotient_proximity(const MeromorphicMap& f, std::span<const cplx> c, double r,
                                                const QuadConfig& cfg) {
  if (static_cast<int>(c.size()) != f.dim())
    throw Error(ErrorKind::InvalidArgument, "diff_quotient_proximity: shift has wrong dimension");
  const std::size_t n = c.size();
  const Program& p0 = f.p0();
  const Program& p1 = f.p1();
  return sphere_integral(
      [&](std::span<const cplx> z) {
        std::array<cplx, 9> zc{};
        for (std::size_t j = 0; j < n; ++j) zc[j] = z[j] + c[j];
        const double shifted = detail::log_ratio(p1, p0, std::span<const cplx>(zc.data(), n));
        const double here = detail::log_ratio(p1, p0, z);
        if (std::isnan(shifted) || std::isnan(here)) return std::numeric_limits<double>::quiet_NaN();
        if (std::isinf(shifted) && std::isinf(here) && (shifted > 0) == (here > 0))
          return std::numeric_limits<double>::quiet_NaN();
        return detail::positive_part(shifted - here);
      },
      f.dim(), r, cfg);
}

/// One-variable logarithmic difference bound for a given r < s - |c|.
inline BoundReport lemma1_bound(const MeromorphicMap& f, double r, double s, cplx c, double delta,
                                const QuadConfig& cfg) {
  if (f.dim() != 1) throw Error(ErrorKind::InvalidArgument, "lemma1_bound: map must be one-dimensional");
  const double ac = std::abs(c);
  if (!(r > 0) || !(s > r + ac)) throw Error(ErrorKind::InvalidArgument, "lemma1_bound: requires r > 0 and s > r + |c|");
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "lemma1_bound: delta must lie in (0, 1)");

  const Recentered base = recenter(f);
  const MeromorphicMap& g = base.map;
  const std::array<cplx, 1> cv{c};
  BoundReport rep;
  rep.r = r;
  rep.s_or_R = s;
  rep.delta = delta;
  rep.c = {c};
  rep.n = 1;
  rep.offset = base.offset;

  const IntegralEstimate lhs = diff_quotient_proximity(g, cv, r, cfg);
  rep.lhs = lhs.value;
  rep.lhs_err = lhs.abs_error_estimate;

  const int counts =
      count_points_1d(g, Target::infinity(), s, cfg).count + count_points_1d(g, Target::finite(0.0), s, cfg).count;
  const IntegralEstimate mm = abs_log_mean(g, s, cfg);
  const double count_coeff = 8.0 * kPi * std::pow(ac, delta) / (delta * (1.0 - delta) * std::pow(r, delta));
  const double prox_coeff = 4.0 * kPi * ac / ((1.0 - delta) * (s - r - ac)) * std::pow(s / (s - r), 1.0 - delta);
  rep.rhs = count_coeff * counts + prox_coeff * mm.value;
  rep.rhs_err = prox_coeff * mm.abs_error_estimate;
  detail::finish(rep);
  return rep;
}

/// q = floor(1/(1 - sqrt(delta))) and C = integral over the unit ball of
/// C^{n-1} of (1 - |xi|^2)^(-delta q / (2(q - 1))).
inline HolderParams holder_params(double delta, int n, const QuadConfig& cfg) {
  if (!(delta > 0.25 && delta < 1)) throw Error(ErrorKind::InvalidArgument, "holder_params: delta must lie in (1/4, 1)");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "holder_params: n must be >= 2");
  HolderParams hp;
  hp.delta = delta;
  hp.q = static_cast<int>(std::floor(1.0 / (1.0 - std::sqrt(delta))));
  const double beta = delta * hp.q / (2.0 * (hp.q - 1));
  if (n == 2) {
    // rho-measure of |xi|^2 <= v is v, so C = int_0^1 (1 - v)^(-beta) dv
    boost::math::quadrature::tanh_sinh<double> integrator;
    double err = 0.0;
    hp.C = integrator.integrate([&](double v, double comp) { return std::pow(comp > 0 ? comp : 1.0 - v, -beta); }, 0.0,
                                1.0, 1e-12, &err);
    hp.C_err = err;
    return hp;
  }
  const IntegralEstimate e = ball_integral(
      [&](std::span<const cplx> xi) {
        double s = 0.0;
        for (cplx x : xi) s += std::norm(x);
        return std::pow(std::max(1.0 - s, 1e-300), -beta);
      },
      n - 1, 1.0, cfg);
  hp.C = e.value;
  hp.C_err = e.abs_error_estimate;
  return hp;
}

/// Several-variable logarithmic difference bound along a coordinate shift.
/// Needs the oracle for the unintegrated counts n(R, inf) + n(R, 0) unless
/// f has neither zeros nor poles.
inline BoundReport lemma_nd_bound(const MeromorphicMap& f, double r, double R, std::span<const cplx> c, double delta,
                                  const QuadConfig& cfg, const DivisorOracle& oracle = {}) {
  const int n = f.dim();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "lemma_nd_bound: map must have n >= 2");
  if (static_cast<int>(c.size()) != n) throw Error(ErrorKind::InvalidArgument, "lemma_nd_bound: shift has wrong dimension");
  int nonzero = 0;
  for (cplx x : c) nonzero += x != 0.0;
  if (nonzero != 1) throw Error(ErrorKind::InvalidArgument, "lemma_nd_bound: shift must move exactly one coordinate");
  const double ac = detail::norm(c);
  if (!(r > 0) || !(R > r + ac)) throw Error(ErrorKind::InvalidArgument, "lemma_nd_bound: requires R > r + |c_j| > |c_j|");

  const HolderParams hp = holder_params(delta, n, cfg);
  double counts = 0.0;
  if (!f.f0().zero_free() || !f.f1().zero_free()) {
    if (!oracle) throw Error(ErrorKind::NeedsDivisorOracle, "lemma_nd_bound: divisor counts need an oracle");
    if (!f.f0().zero_free()) counts += oracle(R, Target::infinity()).n;
    if (!f.f1().zero_free()) counts += oracle(R, Target::finite(0.0)).n;
  }

  BoundReport rep;
  rep.r = r;
  rep.s_or_R = R;
  rep.delta = delta;
  rep.c.assign(c.begin(), c.end());
  rep.n = n;
  rep.offset.assign(static_cast<std::size_t>(n), 0.0);

  const IntegralEstimate lhs = diff_quotient_proximity(f, c, r, cfg);
  rep.lhs = lhs.value;
  rep.lhs_err = lhs.abs_error_estimate;
  const IntegralEstimate mm = abs_log_mean(f, R, cfg);

  const double ratio = std::pow(R / r, 2.0 * n - 2.0);
  const double count_coeff = 8.0 * kPi * std::pow(ac, delta) * hp.C / (delta * (1.0 - delta)) * ratio / std::pow(r, delta);
  const double prox_coeff = 4.0 * kPi * ac / (1.0 - delta) * ratio * (R / (R - (r + ac))) *
                            std::pow(R / (R - r), 1.0 - delta) / std::sqrt(R * R - r * r);
  rep.rhs = count_coeff * counts + prox_coeff * mm.value;
  rep.rhs_err = prox_coeff * mm.abs_error_estimate + count_coeff * counts * hp.C_err / hp.C;
  detail::finish(rep);
  return rep;
}

/// Second-main-theorem ledger for distinct finite targets.
inline SmtLedger smt_ledger(const MeromorphicMap& f, std::span<const cplx> c, std::span<const cplx> targets, double r,
                            const QuadConfig& cfg, const DivisorOracle& oracle = {}) {
  if (targets.size() < 2) throw Error(ErrorKind::InvalidArgument, "smt_ledger: needs at least two targets");
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (targets[i] == targets[j]) throw Error(ErrorKind::InvalidArgument, "smt_ledger: targets must be distinct");

  const Recentered base = recenter(f, targets);
  const MeromorphicMap& g = base.map;
  const DivisorOracle use_oracle = base.moved() ? DivisorOracle{} : oracle;
  const MeromorphicMap d = delta_map(g, c);

  SmtLedger out;
  out.r = r;
  out.offset = base.offset;
  const Characteristic ch = characteristic(g, r, cfg, use_oracle);
  std::vector<double> terms{ch.m};
  for (cplx a : targets) terms.push_back(proximity(g, Target::finite(a), r, cfg).value);
  out.lhs = pairwise_sum(terms);
  out.two_T = 2.0 * ch.T;
  const double n_d_pole = integrated_counting(d, Target::infinity(), r, cfg);
  const double n_d_zero = integrated_counting(d, Target::finite(0.0), r, cfg);
  out.n_delta = 2.0 * ch.N - n_d_pole + n_d_zero;
  out.slack = out.two_T - out.n_delta - out.lhs;
  return out;
}

struct ShiftRow {
  double r = 0.0;
  double T_shift = 0.0;  // T(r, f(z + c))
  double T = 0.0;
  double ratio = 0.0;
  double N_shift = 0.0;  // N(r, f(z + c))
  double N_bound = 0.0;  // N(r + |c|, f)
  bool counting_holds = false;
};

/// Rows (r, T(r, f o tau)/T(r, f)) with the counting inequality
/// N(r, f o tau) <= N(r + |c|, f) + tol.
inline std::vector<ShiftRow> shift_characteristic_check(const MeromorphicMap& f, std::span<const cplx> c,
                                                        const std::vector<double>& r_grid, const QuadConfig& cfg,
                                                        double tol = 1e-6, const DivisorOracle& oracle = {}) {
  const MeromorphicMap fs = f.shifted(c);
  const double ac = detail::norm(c);
  std::vector<ShiftRow> rows;
  for (double r : r_grid) {
    ShiftRow row;
    row.r = r;
    const Characteristic a = characteristic(fs, r, cfg);
    const Characteristic b = characteristic(f, r, cfg, oracle);
    row.T_shift = a.T;
    row.T = b.T;
    row.ratio = b.T != 0.0 ? a.T / b.T : (a.T == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
    row.N_shift = a.N;
    row.N_bound = integrated_counting(f, Target::infinity(), r + ac, cfg, oracle);
    row.counting_holds = row.N_shift <= row.N_bound + tol;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nevan
