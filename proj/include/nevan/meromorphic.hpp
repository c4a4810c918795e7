#pragma once

#include <nevan/expr.hpp>

#include <optional>
#include <random>
#include <utility>

namespace nevan {

/// Splits an expression into holomorphic-safe numerator and denominator,
/// returned as (denominator, numerator) to match the (f0, f1) convention.
/// exp() of a non-holomorphic argument is rejected (essential singularity).
inline std::pair<Expr, Expr> to_fraction(const Expr& e) {
  using K = Expr::Kind;
  const Expr one = Expr::constant(1.0);
  switch (e.kind()) {
    case K::Var:
    case K::Const: return {one, e};
    case K::Add:
    case K::Sub: {
      auto [da, na] = to_fraction(e.lhs());
      auto [db, nb] = to_fraction(e.rhs());
      const double s = e.kind() == K::Add ? 1.0 : -1.0;
      if (da.is_one() && db.is_one())
        return {one, s > 0 ? na + nb : na - nb};
      const Expr lhs = na * db;
      const Expr rhs = nb * da;
      return {da * db, s > 0 ? lhs + rhs : lhs - rhs};
    }
    case K::Mul: {
      auto [da, na] = to_fraction(e.lhs());
      auto [db, nb] = to_fraction(e.rhs());
      return {da * db, na * nb};
    }
    case K::Div: {
      auto [da, na] = to_fraction(e.lhs());
      auto [db, nb] = to_fraction(e.rhs());
      return {da * nb, na * db};
    }
    case K::Neg: {
      auto [d, n] = to_fraction(e.lhs());
      return {d, -n};
    }
    case K::Exp:
      if (!e.lhs().holomorphic_safe())
        throw Error(ErrorKind::InvalidArgument, "exp of a non-entire argument is not meromorphic");
      return {one, e};
    case K::Pow: {
      auto [d, n] = to_fraction(e.lhs());
      const int k = e.exponent();
      if (k >= 0) return {pow(d, k), pow(n, k)};
      return {pow(n, -k), pow(d, -k)};
    }
  }
  return {one, e};
}

/// A target value in P^1: a finite complex number, or infinity.
struct Target {
  std::optional<cplx> value;  // nullopt = infinity

  static Target infinity() { return {}; }
  static Target finite(cplx a) { return {a}; }
  bool is_infinity() const { return !value.has_value(); }
  std::string to_string() const {
    return value ? detail::format_complex(*value) : std::string("inf");
  }
};

/// f = f1 / f0 : C^n -> P^1 with holomorphic-safe components.
class MeromorphicMap {
 public:
  MeromorphicMap(int n, Expr f0, Expr f1) : n_(n), f0_(std::move(f0)), f1_(std::move(f1)) {
    if (n_ < 1 || n_ > 9) throw Error(ErrorKind::InvalidArgument, "dimension must be in 1..9");
    if (!f0_.holomorphic_safe() || !f1_.holomorphic_safe())
      throw Error(ErrorKind::InvalidArgument, "map components must be holomorphic (no division)");
    if (f0_.max_var() > n_ || f1_.max_var() > n_)
      throw Error(ErrorKind::InvalidArgument, "variable index exceeds dimension");
    p0_ = Program(f0_);
    p1_ = Program(f1_);
    if (f0_.is_zero() || vanishes_on_grid(p0_))
      throw Error(ErrorKind::InvalidArgument, "denominator f0 vanishes identically");
    const CVec origin(static_cast<std::size_t>(n_), 0.0);
    regular_at_origin_ = value_nonzero(p0_, origin) && value_nonzero(p1_, origin);
  }

  /// Builds a map from a single expression, e.g. "1/((z1-1)*z1)".
  static MeromorphicMap from_expr(int n, const Expr& e) {
    auto [f0, f1] = to_fraction(e);
    return MeromorphicMap(n, f0, f1);
  }
  static MeromorphicMap parse(int n, std::string_view text) { return from_expr(n, parse_expr(text)); }
  static MeromorphicMap parse(int n, std::string_view f0, std::string_view f1) {
    return MeromorphicMap(n, parse_expr(f0), parse_expr(f1));
  }

  int dim() const { return n_; }
  const Expr& f0() const { return f0_; }
  const Expr& f1() const { return f1_; }
  const Program& p0() const { return p0_; }
  const Program& p1() const { return p1_; }
  /// f0(0) != 0 and f1(0) != 0, recorded at construction.
  bool regular_at_origin() const { return regular_at_origin_; }

  /// Holomorphic function whose zero divisor is the a-divisor of f:
  /// f1 - a f0 for finite a, f0 for a = infinity.
  Expr divisor_function(const Target& a) const {
    if (a.is_infinity()) return f0_;
    if (*a.value == 0.0) return f1_;
    return f1_ - Expr::constant(*a.value) * f0_;
  }

  /// log|f(z)| (may be +-inf on the divisors).
  double log_abs(std::span<const cplx> z) const {
    return p1_.eval_logmag(z).log_abs - p0_.eval_logmag(z).log_abs;
  }

  cplx eval(std::span<const cplx> z) const {
    const cplx d = p0_.eval(z);
    if (d == 0.0) throw Error(ErrorKind::DivisionByZero, "eval: pole");
    return p1_.eval(z) / d;
  }

  MeromorphicMap shifted(std::span<const cplx> c) const {
    return MeromorphicMap(n_, shift(f0_, c), shift(f1_, c));
  }

  std::string to_string() const {
    if (f0_.is_one()) return f1_.to_string();
    return "(" + f1_.to_string() + ")/(" + f0_.to_string() + ")";
  }

 private:
  static bool value_nonzero(const Program& p, std::span<const cplx> z) {
    try {
      return !p.eval_logmag(z).is_zero();
    } catch (const Error&) {
      return false;
    }
  }

  bool vanishes_on_grid(const Program& p) const {
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    CVec z(static_cast<std::size_t>(n_));
    for (int k = 0; k < 16; ++k) {
      for (auto& zj : z) zj = {u(rng), u(rng)};
      if (value_nonzero(p, z)) return false;
    }
    return true;
  }

  int n_;
  Expr f0_, f1_;
  Program p0_, p1_;
  bool regular_at_origin_ = false;
};

/// A map translated by `offset` so that the base point is regular.
struct Recentered {
  MeromorphicMap map;
  CVec offset;  // all zeros when no recentering was needed
  bool moved() const {
    return std::any_of(offset.begin(), offset.end(), [](cplx c) { return c != 0.0; });
  }
};

/// Ensures f(0) is not in {0, infinity} or any of the given finite targets.
/// When it is, the map is translated by the smallest grid offset along z1
/// (radii 0.05, 0.10, ..., 16 directions) at which every relevant value has
/// modulus above 1e-3.
inline Recentered recenter(const MeromorphicMap& f, std::span<const cplx> targets = {},
                           bool require_nonzero = true) {
  std::vector<Program> checks;
  checks.emplace_back(f.f0());
  if (require_nonzero) checks.emplace_back(f.f1());
  for (cplx a : targets) checks.emplace_back(f.divisor_function(Target::finite(a)));

  auto regular_at = [&](std::span<const cplx> z, double floor) {
    for (const auto& p : checks) {
      try {
        if (!(p.eval_logmag(z).log_abs > std::log(floor))) return false;
      } catch (const Error&) {
        return false;
      }
    }
    return true;
  };

  CVec z(static_cast<std::size_t>(f.dim()), 0.0);
  if (regular_at(z, 1e-300)) return {f, z};
  for (int step = 1; step <= 320; ++step) {
    const double rho = 0.05 * step;
    for (int k = 0; k < 16; ++k) {
      z[0] = std::polar(rho, kTwoPi * k / 16.0);
      if (regular_at(z, 1e-3)) return {f.shifted(z), z};
    }
  }
  throw Error(ErrorKind::InvalidArgument, "recenter: no regular base point found");
}

}  // namespace nevan
