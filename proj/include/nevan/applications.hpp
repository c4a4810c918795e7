#pragma once

#include <nevan/difference.hpp>

#include <Eigen/SVD>

#include <map>

namespace nevan {

/// Polynomial in u with coefficients in z, lowest degree first.
using PolyU = std::vector<Expr>;

namespace detail {

inline PolyU poly_add(const PolyU& a, const PolyU& b, double sign = 1.0) {
  PolyU out(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Expr x = i < a.size() ? a[i] : Expr();
    const Expr y = i < b.size() ? b[i] : Expr();
    out[i] = sign > 0 ? x + y : x - y;
  }
  return out;
}

inline PolyU poly_mul(const PolyU& a, const PolyU& b) {
  PolyU out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return out;
}

inline bool poly_is_one(const PolyU& p) { return p.size() == 1 && p[0].is_one(); }

inline std::pair<PolyU, PolyU> split_in_u(const Expr& e) {
  using K = Expr::Kind;
  const PolyU one{Expr::constant(1.0)};
  if (!e.depends_on(0)) return {{e}, one};
  switch (e.kind()) {
    case K::Var: return {{Expr(), Expr::constant(1.0)}, one};
    case K::Add:
    case K::Sub: {
      const double s = e.kind() == K::Add ? 1.0 : -1.0;
      auto [na, da] = split_in_u(e.lhs());
      auto [nb, db] = split_in_u(e.rhs());
      if (poly_is_one(da) && poly_is_one(db)) return {poly_add(na, nb, s), one};
      return {poly_add(poly_mul(na, db), poly_mul(nb, da), s), poly_mul(da, db)};
    }
    case K::Mul: {
      auto [na, da] = split_in_u(e.lhs());
      auto [nb, db] = split_in_u(e.rhs());
      return {poly_mul(na, nb), poly_mul(da, db)};
    }
    case K::Div: {
      auto [na, da] = split_in_u(e.lhs());
      auto [nb, db] = split_in_u(e.rhs());
      return {poly_mul(na, db), poly_mul(da, nb)};
    }
    case K::Neg: {
      auto [n, d] = split_in_u(e.lhs());
      for (auto& c : n) c = -c;
      return {n, d};
    }
    case K::Pow: {
      auto [n, d] = split_in_u(e.lhs());
      const int k = std::abs(e.exponent());
      PolyU pn = one, pd = one;
      for (int i = 0; i < k; ++i) {
        pn = poly_mul(pn, n);
        pd = poly_mul(pd, d);
      }
      return e.exponent() >= 0 ? std::pair{pn, pd} : std::pair{pd, pn};
    }
    case K::Exp: throw Error(ErrorKind::InvalidArgument, "R(z,u) must be rational in u (u inside exp)");
    case K::Const: break;
  }
  return {{e}, one};
}

}  // namespace detail

/// R(z, u) = P(z, u) / Q(z, u), rational in u with coefficients meromorphic in z.
class RationalInU {
 public:
  RationalInU(int n, PolyU num, PolyU den) : n_(n), num_(std::move(num)), den_(std::move(den)) {
    if (n_ < 1 || n_ > 9) throw Error(ErrorKind::InvalidArgument, "RationalInU: dimension must be in 1..9");
    for (const auto* p : {&num_, &den_})
      for (const auto& c : *p) {
        if (c.depends_on(0)) throw Error(ErrorKind::InvalidArgument, "RationalInU: coefficient depends on u");
        if (c.max_var() > n_) throw Error(ErrorKind::InvalidArgument, "RationalInU: variable index exceeds dimension");
      }
    trim(num_);
    trim(den_);
    for (const auto& c : num_) pnum_.emplace_back(c);
    for (const auto& c : den_) pden_.emplace_back(c);
    if (den_.size() == 1 && den_[0].is_zero()) throw Error(ErrorKind::DegenerateRational, "RationalInU: zero denominator");
  }

  /// Parses text in z1..zn and u, e.g. "(u+1)/(1-u)".
  static RationalInU parse(int n, std::string_view text) {
    auto [num, den] = detail::split_in_u(parse_expr(text, true));
    return RationalInU(n, std::move(num), std::move(den));
  }

  int dim() const { return n_; }
  const PolyU& numerator() const { return num_; }
  const PolyU& denominator() const { return den_; }

  /// Nonzero coefficients of numerator and denominator.
  std::vector<Expr> coefficients() const {
    std::vector<Expr> out;
    for (const auto* p : {&num_, &den_})
      for (const auto& c : *p)
        if (!c.is_zero()) out.push_back(c);
    return out;
  }

  /// Coefficients of numerator and denominator evaluated at z.
  std::pair<std::vector<cplx>, std::vector<cplx>> coefficients_at(std::span<const cplx> z) const {
    std::vector<cplx> a, b;
    for (const auto& p : pnum_) a.push_back(p.eval(z));
    for (const auto& p : pden_) b.push_back(p.eval(z));
    return {a, b};
  }

  cplx eval(std::span<const cplx> z, cplx u) const {
    auto [a, b] = coefficients_at(z);
    auto horner = [&](const std::vector<cplx>& c) {
      cplx acc = 0.0;
      for (std::size_t i = c.size(); i-- > 0;) acc = acc * u + c[i];
      return acc;
    };
    const cplx d = horner(b);
    if (d == 0.0) throw Error(ErrorKind::DivisionByZero, "RationalInU: pole in u");
    return horner(a) / d;
  }

  /// R(z, f(z)) as a map, by homogenizing with f = f1/f0.
  MeromorphicMap compose(const MeromorphicMap& f) const {
    if (f.dim() != n_) throw Error(ErrorKind::InvalidArgument, "RationalInU::compose: dimension mismatch");
    const std::size_t d = std::max(num_.size(), den_.size()) - 1;
    auto homog = [&](const PolyU& p) {
      Expr acc;
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) continue;
        acc = acc + p[k] * pow(f.f1(), static_cast<int>(k)) * pow(f.f0(), static_cast<int>(d - k));
      }
      return acc;
    };
    return MeromorphicMap::from_expr(n_, homog(num_) / homog(den_));
  }

  std::string to_string() const {
    auto show = [](const PolyU& p) {
      std::string s;
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k].is_zero()) continue;
        if (!s.empty()) s += " + ";
        s += "(" + p[k].to_string() + ")";
        if (k == 1) s += "*u";
        if (k > 1) s += "*u^" + std::to_string(k);
      }
      return s.empty() ? std::string("0") : s;
    };
    return "[" + show(num_) + "] / [" + show(den_) + "]";
  }

 private:
  static void trim(PolyU& p) {
    while (p.size() > 1 && p.back().is_zero()) p.pop_back();
    if (p.empty()) p.push_back(Expr());
  }

  int n_;
  PolyU num_, den_;
  std::vector<Program> pnum_, pden_;
};

namespace detail {

inline std::vector<cplx> trimmed(std::vector<cplx> c) {
  double scale = 0.0;
  for (cplx x : c) scale = std::max(scale, std::abs(x));
  while (!c.empty() && std::abs(c.back()) <= 1e-12 * scale) c.pop_back();
  return c;
}

// Degree of gcd(a, b) from the rank deficiency of the Sylvester matrix.
inline int gcd_degree(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const int m = static_cast<int>(a.size()) - 1, n = static_cast<int>(b.size()) - 1;
  if (m <= 0 || n <= 0) return 0;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(m + n, m + n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k <= m; ++k) S(i, i + k) = a[static_cast<std::size_t>(m - k)];
  for (int i = 0; i < m; ++i)
    for (int k = 0; k <= n; ++k) S(n + i, i + k) = b[static_cast<std::size_t>(n - k)];
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > 1e-9 * sv[0]) ++rank;
  return m + n - rank;
}

}  // namespace detail

/// max(deg P, deg Q) after cancelling the common factor, at generic z.
inline int degree_in_u(const RationalInU& R) {
  std::mt19937_64 rng(0xde9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CVec z(static_cast<std::size_t>(R.dim()));
  int degree = -1;
  bool any_den = false;
  for (int trial = 0; trial < 3; ++trial) {
    for (auto& zj : z) zj = {u(rng), u(rng)};
    std::vector<cplx> a, b;
    try {
      std::tie(a, b) = R.coefficients_at(z);
    } catch (const Error&) {
      continue;
    }
    a = detail::trimmed(a);
    b = detail::trimmed(b);
    if (b.empty()) continue;
    any_den = true;
    if (a.empty()) {
      degree = std::max(degree, 0);
      continue;
    }
    const int m = static_cast<int>(a.size()) - 1, n = static_cast<int>(b.size()) - 1;
    degree = std::max(degree, std::max(m, n) - detail::gcd_degree(a, b));
  }
  if (!any_den) throw Error(ErrorKind::DegenerateRational, "degree_in_u: denominator vanishes at sample points");
  return degree;
}

struct Box {
  double re_min = -1.0, re_max = 4.0, im_min = -8.0, im_max = 8.0;
  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
           z.imag() <= im_max + slack;
  }
  std::string to_string() const {
    return "[" + detail::format_double(re_min) + "," + detail::format_double(re_max) + "]x[" +
           detail::format_double(im_min) + "," + detail::format_double(im_max) + "]";
  }
};

struct PreimagePoint {
  cplx z;
  int multiplicity = 1;
};

struct PreimageOptions {
  int grid = 200;
  double dedup_tol = 1e-8;
  double point_tol = 1e-8;
  double winding_radius = 1e-4;
};

struct PreimageSearch {
  std::vector<PreimagePoint> points;
  int stalled_seeds = 0;
};

namespace detail {

/// Newton iteration for a holomorphic g of one variable.
struct Newton1d {
  Program g, dg;
  explicit Newton1d(const Expr& e) : g(e), dg(derivative(e, 1)) {}

  std::optional<cplx> run(cplx z, int max_iter = 60) const {
    for (int it = 0; it < max_iter; ++it) {
      const std::array<cplx, 1> zs{z};
      cplx gv, dv;
      try {
        gv = g.eval(zs);
        dv = dg.eval(zs);
      } catch (const Error&) {
        return std::nullopt;
      }
      if (gv == 0.0) return z;
      if (dv == 0.0) return std::nullopt;
      const cplx step = gv / dv;
      z -= step;
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()) || std::abs(z) > 1e6) return std::nullopt;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) return z;
    }
    return z;
  }
};

// |f(z) - a| (or 1/|f| for a = infinity) from log-domain values.
inline double target_distance(const MeromorphicMap& f, const Target& a, const Program& g, cplx z) {
  const std::array<cplx, 1> zs{z};
  const double lg = g.eval_logmag(zs).log_abs;
  const double l = a.is_infinity() ? f.p1().eval_logmag(zs).log_abs : f.p0().eval_logmag(zs).log_abs;
  if (std::isinf(lg) && lg < 0) return 0.0;
  return std::exp(lg - l);
}

inline int local_multiplicity(const Expr& g, cplx z0, double radius, const QuadConfig& cfg) {
  const std::array<cplx, 1> c{z0};
  const ZeroCounter counter(shift(g, c));
  return counter.count(radius, cfg.single_threaded()).count;
}

}  // namespace detail

/// a-points of f (n = 1) inside the box, by Newton from a seed grid.
inline PreimageSearch find_preimages_1d(const MeromorphicMap& f, const Target& a, const Box& box, const QuadConfig& cfg,
                                        const PreimageOptions& opt = {}) {
  if (f.dim() != 1) throw Error(ErrorKind::InvalidArgument, "find_preimages_1d: map must be one-dimensional");
  if (!(box.re_max > box.re_min) || !(box.im_max > box.im_min))
    throw Error(ErrorKind::InvalidArgument, "find_preimages_1d: empty box");
  PreimageSearch out;
  const Expr ge = f.divisor_function(a);
  if (ge.zero_free()) return out;
  const detail::Newton1d newton(ge);
  const int G = opt.grid;
  std::vector<std::optional<cplx>> raw(static_cast<std::size_t>(G) * G);
  parallel_for(raw.size(), cfg.threads, [&](std::size_t k) {
    const int i = static_cast<int>(k) / G, j = static_cast<int>(k) % G;
    const cplx seed(box.re_min + (box.re_max - box.re_min) * (i + 0.5) / G,
                    box.im_min + (box.im_max - box.im_min) * (j + 0.5) / G);
    raw[k] = newton.run(seed);
  });

  std::vector<cplx> roots;
  for (const auto& r : raw) {
    if (!r) {
      ++out.stalled_seeds;
      continue;
    }
    if (!box.contains(*r)) continue;
    if (!(detail::target_distance(f, a, newton.g, *r) < opt.point_tol)) {
      ++out.stalled_seeds;
      continue;
    }
    roots.push_back(*r);
  }
  auto less = [](cplx x, cplx y) { return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag(); };
  std::sort(roots.begin(), roots.end(), less);
  std::vector<cplx> unique;
  for (cplx z : roots) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
      if (z.real() - it->real() > opt.dedup_tol * std::max(1.0, std::abs(z)) + opt.winding_radius) break;
      if (std::abs(z - *it) <= opt.dedup_tol * std::max(1.0, std::abs(z))) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(z);
  }
  // multiplicities by winding; points inside an earlier winding disk belong to it
  for (cplx z : unique) {
    bool covered = false;
    for (const auto& p : out.points)
      if (std::abs(p.z - z) < 0.5 * opt.winding_radius) covered = true;
    if (covered) continue;
    int m = 1;
    try {
      m = std::max(1, detail::local_multiplicity(ge, z, opt.winding_radius, cfg));
    } catch (const Error&) {
    }
    out.points.push_back({z, m});
  }
  std::sort(out.points.begin(), out.points.end(), [&](const PreimagePoint& x, const PreimagePoint& y) { return less(x.z, y.z); });
  return out;
}

struct InvarianceReport {
  Target target;
  Box box;
  std::vector<PreimagePoint> points;
  std::vector<bool> forward_hits;
  std::vector<cplx> violations;
  bool invariant() const { return violations.empty(); }
};

/// Finite-box certificate that z0 + c is an a-point of multiplicity at
/// least that of z0 for every a-point z0 of f found in the box.
inline InvarianceReport forward_invariance_check(const MeromorphicMap& f, cplx c, const Target& a, const Box& box,
                                                 const QuadConfig& cfg, const PreimageOptions& opt = {}) {
  InvarianceReport rep;
  rep.target = a;
  rep.box = box;
  rep.points = find_preimages_1d(f, a, box, cfg, opt).points;
  const Expr ge = f.divisor_function(a);
  if (rep.points.empty()) return rep;
  const detail::Newton1d newton(ge);
  for (const auto& p : rep.points) {
    const cplx moved = p.z + c;
    bool hit = false;
    if (detail::target_distance(f, a, newton.g, moved) < 1e-6) {
      const auto polished = newton.run(moved);
      const cplx at = polished && std::abs(*polished - moved) < 1e-6 * std::max(1.0, std::abs(moved)) ? *polished : moved;
      int m = 0;
      try {
        m = detail::local_multiplicity(ge, at, opt.winding_radius, cfg);
      } catch (const Error&) {
        m = 0;
      }
      hit = m >= p.multiplicity;
    }
    rep.forward_hits.push_back(hit);
    if (!hit) rep.violations.push_back(p.z);
  }
  return rep;
}

struct PeriodicityResult {
  bool is_periodic = false;
  double max_dev = 0.0;
};

/// max over samples of |f(z+c) - f(z)| / max(1, |f(z)|); periodic when < 1e-9.
inline PeriodicityResult periodicity_test(const MeromorphicMap& f, std::span<const cplx> c,
                                          const std::vector<CVec>& samples) {
  const MeromorphicMap fs = f.shifted(c);
  PeriodicityResult out;
  for (const auto& z : samples) {
    LogMag A, B;
    try {
      A = logmag::div(fs.p1().eval_logmag(z), fs.p0().eval_logmag(z));
      B = logmag::div(f.p1().eval_logmag(z), f.p0().eval_logmag(z));
    } catch (const Error&) {
      continue;  // pole or indeterminate point
    }
    if (std::isinf(A.log_abs) && A.log_abs > 0) continue;
    if (std::isinf(B.log_abs) && B.log_abs > 0) continue;
    const double scale = std::max(0.0, B.log_abs);
    const cplx a = A.is_zero() ? cplx(0.0) : std::polar(std::exp(A.log_abs - scale), A.phase);
    const cplx b = B.is_zero() ? cplx(0.0) : std::polar(std::exp(B.log_abs - scale), B.phase);
    const double dev = std::abs(a - b);
    out.max_dev = std::max(out.max_dev, std::isnan(dev) ? std::numeric_limits<double>::infinity() : dev);
  }
  out.is_periodic = out.max_dev < 1e-9;
  return out;
}

/// 64 seeded sample points uniform in [-2, 2]^(2n).
inline std::vector<CVec> periodicity_samples(int n, std::uint64_t seed, int count = 64) {
  std::mt19937_64 rng(detail::splitmix64(seed));
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<CVec> out(static_cast<std::size_t>(count), CVec(static_cast<std::size_t>(n)));
  for (auto& z : out)
    for (auto& zj : z) zj = {u(rng), u(rng)};
  return out;
}

enum class Verdict { Consistent, GrowthEscape, Contradiction };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "CONSISTENT";
    case Verdict::GrowthEscape: return "GROWTH_ESCAPE";
    case Verdict::Contradiction: return "CONTRADICTION";
  }
  return "?";
}

struct PicardReport {
  Verdict verdict = Verdict::Consistent;
  std::vector<InvarianceReport> invariance;
  PeriodicityResult periodicity;
  std::optional<GrowthEstimate> hyper_order;  // empty when growth is too slow to fit
  bool all_invariant = false;
};

/// Difference analogue of Picard's theorem on a finite box: three values
/// with forward-invariant pre-images force periodicity unless the
/// hyper-order reaches 2/3.
inline PicardReport picard_verdict(const MeromorphicMap& f, cplx c, const std::array<Target, 3>& targets, const Box& box,
                                   const std::vector<double>& growth_grid, const QuadConfig& cfg,
                                   const PreimageOptions& opt = {}) {
  PicardReport rep;
  rep.all_invariant = true;
  for (const auto& a : targets) {
    rep.invariance.push_back(forward_invariance_check(f, c, a, box, cfg, opt));
    rep.all_invariant = rep.all_invariant && rep.invariance.back().invariant();
  }
  const std::array<cplx, 1> cv{c};
  rep.periodicity = periodicity_test(f, cv, periodicity_samples(1, cfg.rng_seed));
  try {
    rep.hyper_order = estimate_hyper_order(profile(f, growth_grid, cfg));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientGrowth) throw;
  }
  const double sigma = rep.hyper_order ? rep.hyper_order->value : 0.0;
  if (!rep.all_invariant || rep.periodicity.is_periodic)
    rep.verdict = Verdict::Consistent;
  else if (sigma >= 2.0 / 3.0)
    rep.verdict = Verdict::GrowthEscape;
  else
    rep.verdict = Verdict::Contradiction;
  return rep;
}

struct ValironRow {
  double r = 0.0;
  double T_composed = 0.0;  // T(r, R(z, f))
  double T_f = 0.0;
  int degree = 0;
  double ratio = 0.0;        // T_composed / (degree T_f)
  double coeff_T_max = 0.0;  // max_j T(r, coefficient_j)
};

inline double coefficient_growth(const RationalInU& R, double r, const QuadConfig& cfg) {
  double out = 0.0;
  for (const auto& c : R.coefficients()) {
    if (c.is_const()) {
      out = std::max(out, std::max(0.0, std::log(std::abs(c.value()))));
      continue;
    }
    out = std::max(out, characteristic(MeromorphicMap::from_expr(R.dim(), c), r, cfg).T);
  }
  return out;
}

inline std::vector<ValironRow> valiron_mohonko_check(const RationalInU& R, const MeromorphicMap& f,
                                                     const std::vector<double>& r_grid, const QuadConfig& cfg) {
  const int deg = degree_in_u(R);
  const MeromorphicMap composed = R.compose(f);
  std::vector<ValironRow> rows;
  for (double r : r_grid) {
    ValironRow row;
    row.r = r;
    row.degree = deg;
    row.T_composed = characteristic(composed, r, cfg).T;
    row.T_f = characteristic(f, r, cfg).T;
    row.ratio = deg > 0 && row.T_f > 0 ? row.T_composed / (deg * row.T_f) : std::numeric_limits<double>::quiet_NaN();
    row.coeff_T_max = coefficient_growth(R, r, cfg);
    rows.push_back(row);
  }
  return rows;
}

struct RiccatiReport {
  double residual = 0.0;
  int degree = 0;
  std::vector<double> radii;
  std::vector<double> admissibility;  // max_j T(r, coeff_j) / T(r, w)
  bool admissible = false;
  std::optional<GrowthEstimate> hyper_order;
  Verdict verdict = Verdict::Consistent;
};

/// max relative residual |w(z+c) - R(z, w(z))| / max(1, |w(z+c)|) on 100 seeded points.
inline double functional_residual(const RationalInU& R, const MeromorphicMap& w, std::span<const cplx> c,
                                  std::uint64_t seed) {
  const MeromorphicMap ws = w.shifted(c);
  double worst = 0.0;
  int used = 0;
  for (const auto& z : periodicity_samples(w.dim(), seed ^ 0x71cca7ULL, 100)) {
    try {
      const cplx lhs = ws.eval(z);
      const cplx rhs = R.eval(z, w.eval(z));
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      ++used;
    } catch (const Error&) {
    }
  }
  if (used == 0) throw Error(ErrorKind::NoConvergence, "functional_residual: no regular sample points");
  return worst;
}

/// Degree analysis for w(z + c) = R(z, w(z)).
inline RiccatiReport riccati_analysis(const RationalInU& R, const MeromorphicMap& w, std::span<const cplx> c,
                                      const std::vector<double>& r_grid, const QuadConfig& cfg) {
  if (R.dim() != w.dim()) throw Error(ErrorKind::InvalidArgument, "riccati_analysis: dimension mismatch");
  RiccatiReport rep;
  rep.residual = functional_residual(R, w, c, cfg.rng_seed);
  if (!(rep.residual < 1e-8))
    throw Error(ErrorKind::NotASolution,
                "riccati_analysis: w does not satisfy the equation (residual " + detail::format_double(rep.residual) + ")");
  rep.degree = degree_in_u(R);
  const NevanlinnaProfile prof = profile(w, r_grid, cfg);
  for (const auto& row : prof.rows) {
    rep.radii.push_back(row.r);
    const double ct = coefficient_growth(R, row.r, cfg);
    rep.admissibility.push_back(row.T > 0 ? ct / row.T : (ct == 0.0 ? 0.0 : std::numeric_limits<double>::infinity()));
  }
  rep.admissible = !prof.rows.empty() && prof.rows.back().T > 0 && rep.admissibility.back() < 0.1;
  try {
    rep.hyper_order = estimate_hyper_order(prof);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientGrowth) throw;
  }
  const double sigma = rep.hyper_order ? rep.hyper_order->value : 0.0;
  rep.verdict = rep.admissible && sigma < 2.0 / 3.0 && rep.degree != 1 ? Verdict::Contradiction : Verdict::Consistent;
  return rep;
}

}  // namespace nevan
