#pragma once

// Argument-principle machinery in one variable: winding counts, contour
// moments, and exact resolution of the zeros of a holomorphic g in a disk.

#include <nevan/meromorphic.hpp>
#include <nevan/quad.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <functional>
#include <vector>

namespace nevan {

struct DivisorCount {
  double r = 0.0;
  Target a;
  int count = 0;
  double winding_residual = 0.0;
};

struct DivisorPoint {
  cplx z;
  int multiplicity = 1;
};

/// Normalized contour moments mu_p = (1/2 pi i) \oint (z/t)^p g'(z)/g(z) dz
/// over |z| = t for p = 0..max_power.  mu_0 is the zero count.
struct ContourMoments {
  double t = 0.0;
  std::vector<cplx> mu;
  double change = 0.0;  // last refinement change, max over p
  long long nodes = 0;
};

/// Zeros of a holomorphic function of one variable, g and g' compiled once.
class ZeroCounter {
 public:
  explicit ZeroCounter(const Expr& g)
      : g_(g), pg_(g), pd_(derivative(g, 1)) {
    if (g.max_var() > 1) throw Error(ErrorKind::InvalidArgument, "ZeroCounter: function must depend on z1 only");
  }

  const Expr& function() const { return g_; }

  /// z g'(z)/g(z), computed in log-domain.  NaN on a zero of g.
  cplx log_derivative_times_z(cplx z) const {
    const std::array<cplx, 1> zs{z};
    const LogMag lg = pg_.eval_logmag(zs);
    if (lg.is_zero()) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
    const LogMag ld = pd_.eval_logmag(zs);
    if (ld.is_zero()) return 0.0;
    return z * std::polar(std::exp(ld.log_abs - lg.log_abs), ld.phase - lg.phase);
  }

  ContourMoments moments(double t, int max_power, const QuadConfig& cfg, double tol = 1e-11) const {
    ContourMoments out;
    out.t = t;
    std::size_t count = static_cast<std::size_t>(cfg.circle_nodes);
    std::vector<cplx> q(count);
    auto fill = [&](std::vector<cplx>& dst, std::size_t nodes, std::size_t start, std::size_t stride) {
      const double h = kTwoPi / static_cast<double>(nodes);
      const std::size_t todo = (nodes - start + stride - 1) / stride;
      parallel_for(todo, todo >= 256 ? cfg.threads : 1, [&](std::size_t k) {
        const std::size_t i = start + k * stride;
        const cplx v = log_derivative_times_z(std::polar(t, h * static_cast<double>(i)));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
          throw Error(ErrorKind::WindingAmbiguous, "contour passes through a zero");
        dst[i] = v;
      });
    };
    fill(q, count, 0, 1);
    out.nodes = static_cast<long long>(count);
    out.mu = reduce(q, max_power);
    for (int level = 1; level <= cfg.max_refinement_levels; ++level) {
      std::vector<cplx> nq(2 * count);
      for (std::size_t i = 0; i < count; ++i) nq[2 * i] = q[i];
      fill(nq, 2 * count, 1, 2);
      q.swap(nq);
      count *= 2;
      out.nodes += static_cast<long long>(count / 2);
      std::vector<cplx> mu = reduce(q, max_power);
      double change = 0.0;
      for (std::size_t p = 0; p < mu.size(); ++p) change = std::max(change, std::abs(mu[p] - out.mu[p]));
      out.mu = std::move(mu);
      out.change = change;
      if (change <= tol * std::max(1.0, std::abs(out.mu[0]))) break;
    }
    return out;
  }

  /// Winding count on |z| = t.  Throws WindingAmbiguous when the estimate is
  /// not within 0.25 of an integer after refinement.
  DivisorCount count(double t, const QuadConfig& cfg) const {
    const ContourMoments m = moments(t, 0, cfg, 1e-9);
    const double nearest = std::round(m.mu[0].real());
    const double residual = std::abs(m.mu[0] - cplx(nearest, 0.0));
    if (!(residual < 0.25) || m.change > 0.05 || nearest < 0)
      throw Error(ErrorKind::WindingAmbiguous, "count_points_1d: winding number not resolved at r=" + detail::format_double(t));
    return {t, Target{}, static_cast<int>(nearest), residual};
  }

  /// All zeros of g in |z| <= r with multiplicities.
  std::vector<DivisorPoint> zeros_in_disk(double r, const QuadConfig& cfg) const {
    if (g_.zero_free()) return {};
    Node hi = contour(r * (1.0 + 1e-3), cfg, +1);
    Node zero{0.0, 0, std::vector<cplx>(kMaxPower + 1, 0.0)};
    std::vector<DivisorPoint> found;
    resolve(zero, hi, cfg, found, 0);
    std::vector<DivisorPoint> inside;
    for (const auto& d : found)
      if (std::abs(d.z) <= r) inside.push_back(d);
    std::sort(inside.begin(), inside.end(), [](const DivisorPoint& a, const DivisorPoint& b) {
      if (std::abs(a.z) != std::abs(b.z)) return std::abs(a.z) < std::abs(b.z);
      return std::arg(a.z) < std::arg(b.z);
    });
    return inside;
  }

  /// Newton polish of a zero of known multiplicity; returns `z` unchanged if
  /// the iteration overflows or wanders off.
  cplx polish(cplx z, int multiplicity, double max_move) const {
    const cplx start = z;
    for (int it = 0; it < 60; ++it) {
      cplx gv, dv;
      try {
        const std::array<cplx, 1> zs{z};
        gv = pg_.eval(zs);
        dv = pd_.eval(zs);
      } catch (const Error&) {
        return start;
      }
      if (gv == 0.0) break;
      if (dv == 0.0) return start;
      const cplx step = static_cast<double>(multiplicity) * gv / dv;
      z -= step;
      if (!std::isfinite(z.real()) || std::abs(z - start) > max_move) return start;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    return z;
  }

 private:
  static constexpr int kMaxPower = 12;

  struct Node {
    double t;
    int count;
    std::vector<cplx> mu;
  };

  static std::vector<cplx> reduce(const std::vector<cplx>& q, int max_power) {
    const std::size_t n = q.size();
    std::vector<cplx> mu(static_cast<std::size_t>(max_power) + 1);
    std::vector<double> re(n), im(n);
    for (int p = 0; p <= max_power; ++p) {
      for (std::size_t i = 0; i < n; ++i) {
        const double ang = kTwoPi * static_cast<double>((static_cast<std::size_t>(p) * i) % n) / static_cast<double>(n);
        const cplx v = q[i] * cplx(std::cos(ang), std::sin(ang));
        re[i] = v.real();
        im[i] = v.imag();
      }
      mu[static_cast<std::size_t>(p)] = cplx(pairwise_sum(re), pairwise_sum(im)) / static_cast<double>(n);
    }
    return mu;
  }

  // Moments on |z| = t, nudging t (direction `dir`) until the contour is clear of zeros.
  Node contour(double t, const QuadConfig& cfg, int dir) const {
    double scale = 1.0;
    for (int attempt = 0; attempt < 12; ++attempt) {
      try {
        const ContourMoments m = moments(t * scale, kMaxPower, cfg);
        const double nearest = std::round(m.mu[0].real());
        if (std::abs(m.mu[0] - cplx(nearest, 0.0)) < 1e-3 && nearest >= 0)
          return {t * scale, static_cast<int>(nearest), m.mu};
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::WindingAmbiguous) throw;
      }
      scale *= 1.0 + dir * 1e-3 * (attempt + 1);
    }
    throw Error(ErrorKind::WindingAmbiguous, "zeros_in_disk: cannot place a contour near r=" + detail::format_double(t));
  }

  // Roots from power sums s_1..s_J of the zeros between two contours.
  bool recover(const Node& a, const Node& b, std::vector<DivisorPoint>& out) const {
    const int J = b.count - a.count;
    if (J > kMaxPower) return false;
    const double ratio = b.t == 0.0 ? 0.0 : a.t / b.t;
    std::vector<cplx> s(static_cast<std::size_t>(J) + 1);
    for (int p = 1; p <= J; ++p)
      s[static_cast<std::size_t>(p)] = b.mu[static_cast<std::size_t>(p)] - std::pow(ratio, p) * a.mu[static_cast<std::size_t>(p)];
    // Newton identities: k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} s_i
    std::vector<cplx> e(static_cast<std::size_t>(J) + 1);
    e[0] = 1.0;
    for (int k = 1; k <= J; ++k) {
      cplx acc = 0.0;
      for (int i = 1; i <= k; ++i)
        acc += (i % 2 == 1 ? 1.0 : -1.0) * e[static_cast<std::size_t>(k - i)] * s[static_cast<std::size_t>(i)];
      e[static_cast<std::size_t>(k)] = acc / static_cast<double>(k);
    }
    // monic polynomial x^J + c_{J-1} x^{J-1} + ... + c_0 with c_{J-k} = (-1)^k e_k
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(J, J);
    for (int i = 1; i < J; ++i) companion(i, i - 1) = 1.0;
    for (int k = 1; k <= J; ++k)
      companion(J - k, J - 1) = -((k % 2 == 0) ? 1.0 : -1.0) * e[static_cast<std::size_t>(k)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success) return false;
    std::vector<cplx> roots;
    for (int i = 0; i < J; ++i) roots.push_back(solver.eigenvalues()[i] * b.t);

    // cluster near-coincident roots into multiple zeros
    const double cluster_tol = 1e-5 * b.t;
    std::vector<DivisorPoint> pts;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      if (used[i]) continue;
      cplx sum = roots[i];
      int m = 1;
      used[i] = true;
      for (std::size_t j = i + 1; j < roots.size(); ++j) {
        if (!used[j] && std::abs(roots[j] - roots[i]) < cluster_tol) {
          used[j] = true;
          sum += roots[j];
          ++m;
        }
      }
      pts.push_back({sum / static_cast<double>(m), m});
    }
    for (auto& p : pts) {
      p.z = polish(p.z, p.multiplicity, 1e-3 * b.t);
      if (std::abs(p.z) < 1e-12 * b.t) p.z = 0.0;
      const double mod = std::abs(p.z);
      if (mod < a.t * (1.0 - 1e-6) || mod > b.t * (1.0 + 1e-6)) return false;
    }
    out.insert(out.end(), pts.begin(), pts.end());
    return true;
  }

  void resolve(const Node& a, const Node& b, const QuadConfig& cfg, std::vector<DivisorPoint>& out, int depth) const {
    const int J = b.count - a.count;
    if (J <= 0) return;
    const bool narrow = a.t > 0.0 && b.t / a.t < 1.0 + 1e-6;
    if ((J <= 4 || narrow) && recover(a, b, out)) return;
    if (depth > 60) throw Error(ErrorKind::NoConvergence, "zeros_in_disk: cannot separate zeros");
    const double mid_t = a.t == 0.0 ? b.t / 8.0 : std::sqrt(a.t * b.t);
    Node mid = contour(mid_t, cfg, -1);
    if (mid.t <= a.t || mid.t >= b.t) throw Error(ErrorKind::NoConvergence, "zeros_in_disk: contour nudged out of its annulus");
    resolve(a, mid, cfg, out, depth + 1);
    resolve(mid, b, cfg, out, depth + 1);
  }

  Expr g_;
  Program pg_, pd_;
};

/// Number of a-points of f (n = 1) in |z| <= r with multiplicity, by the
/// argument principle applied to f1 - a f0 (or f0 for a = infinity).
inline DivisorCount count_points_1d(const MeromorphicMap& f, const Target& a, double r, const QuadConfig& cfg) {
  if (f.dim() != 1) throw Error(ErrorKind::InvalidArgument, "count_points_1d: map must be one-dimensional");
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "count_points_1d: radius must be > 0");
  const Expr g = f.divisor_function(a);
  if (g.zero_free()) return {r, a, 0, 0.0};
  const ZeroCounter counter(g);
  const double jitter = std::max(cfg.jitter_radius, 1e-9);
  for (double radius : {r, r * (1.0 + jitter), r * (1.0 - jitter)}) {
    try {
      DivisorCount c = counter.count(radius, cfg);
      c.r = r;
      c.a = a;
      return c;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::WindingAmbiguous) throw;
    }
  }
  throw Error(ErrorKind::WindingAmbiguous, "count_points_1d: a-point on or near |z| = " + detail::format_double(r));
}

/// The a-divisor of f (n = 1) inside |z| <= r.
inline std::vector<DivisorPoint> divisor_in_disk(const MeromorphicMap& f, const Target& a, double r, const QuadConfig& cfg) {
  if (f.dim() != 1) throw Error(ErrorKind::InvalidArgument, "divisor_in_disk: map must be one-dimensional");
  const Expr g = f.divisor_function(a);
  if (g.zero_free()) return {};
  return ZeroCounter(g).zeros_in_disk(r, cfg);
}

/// Integrated counting function of a divisor, with the classical origin term:
/// sum over 0 < |z_k| <= r of m_k log(r/|z_k|) plus n(0) log r.
inline double integrated_count(const std::vector<DivisorPoint>& divisor, double r) {
  std::vector<double> terms;
  for (const auto& d : divisor) {
    const double mod = std::abs(d.z);
    if (mod > r) continue;
    terms.push_back(d.multiplicity * (mod == 0.0 ? std::log(r) : std::log(r / mod)));
  }
  return pairwise_sum(terms);
}

}  // namespace nevan
