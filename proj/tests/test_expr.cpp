#include <nevan/expr.hpp>
#include <nevan/meromorphic.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace nevan;

namespace {

cplx at(const Expr& e, std::initializer_list<cplx> z) {
  const CVec v(z);
  return eval(e, v);
}

LogMag lm(const Expr& e, std::initializer_list<cplx> z) {
  const CVec v(z);
  return eval_logmag(e, v);
}

std::vector<Expr> random_exprs() {
  std::vector<Expr> out;
  for (const char* text : {"z1^2 + 1", "exp(z1*z2) - 3i", "(z1 - 1)*exp(z1) + z2^3", "exp(exp(z1)) * (z2 + 0.5)",
                           "z1*z2 - 2", "(z1 + 2i)^4 - exp(-z2)", "exp(2*z1 - z2)/(z1 + 3)", "z1^(-2) + z2"})
    out.push_back(parse_expr(text));
  return out;
}

}  // namespace

TEST(Eval, SimpleValues) {
  EXPECT_NEAR(std::abs(at(parse_expr("z1^2 + 1"), {cplx(0, 1)})), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at(parse_expr("exp(z1)"), {0.0}) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at(parse_expr("z1*z2 - 2"), {cplx(1, 1), cplx(1, -1)})), 0.0, 1e-15);
}

TEST(Eval, DivisionByZeroAndOverflow) {
  try {
    at(parse_expr("1/(z1 - 1)"), {1.0});
    FAIL() << "expected DivisionByZero";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DivisionByZero);
  }
  try {
    at(parse_expr("exp(exp(z1))"), {20.0});
    FAIL() << "expected Overflow";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Overflow);
  }
}

TEST(EvalLogmag, DoublyExponentialAgainstExtendedPrecision) {
  // log|exp(exp(20))| = e^20; long double gives an independent value.
  const long double oracle = std::exp(20.0L);
  const LogMag v = lm(parse_expr("exp(exp(z1))"), {20.0});
  EXPECT_NEAR(v.log_abs, static_cast<double>(oracle), 1e-12 * static_cast<double>(oracle));
  // the 1e8-scale value must also survive a product with a modest factor
  const LogMag w = lm(parse_expr("exp(exp(z1))*(z1 + 1)"), {20.0});
  EXPECT_NEAR(w.log_abs, static_cast<double>(oracle + std::log(21.0L)), 1e-12 * static_cast<double>(oracle));
}

TEST(EvalLogmag, PhaseOfMinusOne) {
  const LogMag v = lm(parse_expr("exp(z1)"), {cplx(0, kPi)});
  EXPECT_NEAR(v.log_abs, 0.0, 1e-15);
  EXPECT_NEAR(std::abs(v.phase), kPi, 1e-12);
}

TEST(EvalLogmag, RescaledAddition) {
  const LogMag v = lm(parse_expr("exp(z1) + exp(z1)"), {1000.0});
  EXPECT_NEAR(v.log_abs, 1000.0 + std::log(2.0), 1e-12 * 1000.0);
  const LogMag d = lm(parse_expr("exp(z1) - exp(z1 - 1)"), {800.0});
  EXPECT_NEAR(d.log_abs, 800.0 + std::log1p(-std::exp(-1.0)), 1e-12 * 800.0);
}

TEST(EvalLogmag, IndeterminateSum) {
  try {
    lm(parse_expr("z1 + z2"), {0.0, 0.0});
    FAIL() << "expected IndeterminatePhase";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IndeterminatePhase);
  }
}

TEST(EvalLogmag, AgreesWithEvalOnRandomPoints) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const auto& e : random_exprs()) {
    const Program p(e);
    for (int k = 0; k < 200; ++k) {
      const CVec z{{u(rng), u(rng)}, {u(rng), u(rng)}};
      cplx v;
      try {
        v = p.eval(z);
      } catch (const Error&) {
        continue;
      }
      if (std::abs(v) == 0.0) continue;
      const LogMag l = p.eval_logmag(z);
      EXPECT_NEAR(std::exp(l.log_abs), std::abs(v), 1e-10 * std::abs(v)) << e.to_string();
    }
  }
}

TEST(EvalLogmag, SlowPathAgreesWithFastPath) {
  // Products that underflow in complex arithmetic go through the log-domain machine.
  const Expr e = parse_expr("exp(-400*z1)*exp(-400*z1)*(z1 - 0.25)");
  const LogMag l = lm(e, {1.0});
  EXPECT_NEAR(l.log_abs, -800.0 + std::log(0.75), 1e-12 * 800.0);
}

TEST(Shift, Substitution) {
  const std::array<cplx, 1> one{1.0};
  const Expr s = shift(parse_expr("z1^2"), one);
  for (double x : {-1.5, 0.0, 0.7, 3.0}) EXPECT_NEAR(std::abs(at(s, {x}) - (x + 1) * (x + 1)), 0.0, 1e-12);
  const std::array<cplx, 2> ab{cplx(0.3, -1), cplx(2, 0.5)};
  const Expr t = shift(parse_expr("exp(z1 + z2)"), ab);
  const cplx z1(0.1, 0.2), z2(-0.4, 1.0);
  EXPECT_NEAR(std::abs(at(t, {z1, z2}) - std::exp(z1 + z2 + ab[0] + ab[1])), 0.0, 1e-12);
}

TEST(Shift, GroupActionProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& e : random_exprs()) {
    const CVec c1{{u(rng), u(rng)}, {u(rng), u(rng)}}, c2{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const CVec c12{c1[0] + c2[0], c1[1] + c2[1]};
    const Program a(shift(e, c12)), b(shift(shift(e, c1), c2));
    for (int k = 0; k < 20; ++k) {
      const CVec z{{u(rng), u(rng)}, {u(rng), u(rng)}};
      try {
        const cplx x = a.eval(z), y = b.eval(z);
        EXPECT_NEAR(std::abs(x - y), 0.0, 1e-10 * std::max(1.0, std::abs(x))) << e.to_string();
      } catch (const Error&) {
      }
    }
  }
}

TEST(Derivative, Examples) {
  const Expr d1 = derivative(parse_expr("z1^3"), 1);
  EXPECT_NEAR(std::abs(at(d1, {cplx(1, 2)}) - 3.0 * cplx(1, 2) * cplx(1, 2)), 0.0, 1e-12);
  const Expr d2 = derivative(parse_expr("exp(z1*z2)"), 2);
  const cplx z1(0.3, 0.1), z2(-0.2, 0.4);
  EXPECT_NEAR(std::abs(at(d2, {z1, z2}) - z1 * std::exp(z1 * z2)), 0.0, 1e-12);
  const Expr d3 = derivative(parse_expr("(z1 - 1)*exp(z1)"), 1);
  EXPECT_NEAR(std::abs(at(d3, {z1}) - z1 * std::exp(z1)), 0.0, 1e-12);
}

TEST(Derivative, MatchesCentralDifference) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& e : random_exprs()) {
    for (int j : {1, 2}) {
      const Program f(e), d(derivative(e, j));
      for (int k = 0; k < 10; ++k) {
        CVec z{{u(rng), u(rng)}, {u(rng), u(rng)}};
        try {
          const double h = 1e-5;
          CVec zp = z, zm = z;
          zp[j - 1] += h;
          zm[j - 1] -= h;
          const cplx fd = (f.eval(zp) - f.eval(zm)) / (2 * h);
          const cplx ex = d.eval(z);
          EXPECT_NEAR(std::abs(fd - ex), 0.0, 1e-6 * std::max(1.0, std::abs(ex))) << e.to_string();
        } catch (const Error&) {
        }
      }
    }
  }
}

TEST(Derivative, CommutesWithShift) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& e : random_exprs()) {
    const CVec c{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const Program a(derivative(shift(e, c), 1)), b(shift(derivative(e, 1), c));
    for (int k = 0; k < 10; ++k) {
      const CVec z{{u(rng), u(rng)}, {u(rng), u(rng)}};
      try {
        const cplx x = a.eval(z), y = b.eval(z);
        EXPECT_NEAR(std::abs(x - y), 0.0, 1e-10 * std::max(1.0, std::abs(x)));
      } catch (const Error&) {
      }
    }
  }
}

TEST(Parser, Grammar) {
  EXPECT_NEAR(std::abs(at(parse_expr("2z1 + 3i"), {1.0}) - cplx(2, 3)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at(parse_expr("1+2i"), {0.0}) - cplx(1, 2)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at(parse_expr(" ( z1 ) ^ 2 "), {3.0}) - 9.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at(parse_expr("z1^-1"), {4.0}) - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(at(parse_expr("2.5i*pi"), {0.0}) - cplx(0, 2.5 * kPi)), 0.0, 1e-15);
  for (const char* bad : {"exp(z1", "z1 +", "z1^1.5", "log(z1)", "z0", "", "u + 1"}) {
    try {
      parse_expr(bad);
      FAIL() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Parse) << bad;
    }
  }
}

TEST(Parser, RoundTripThroughPrinter) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& e : random_exprs()) {
    const Expr back = parse_expr(e.to_string());
    const CVec z{{u(rng), u(rng)}, {u(rng), u(rng)}};
    const cplx x = eval(e, z), y = eval(back, z);
    EXPECT_NEAR(std::abs(x - y), 0.0, 1e-12 * std::max(1.0, std::abs(x))) << e.to_string();
  }
}

TEST(Meromorphic, FractionSplit) {
  const MeromorphicMap f = MeromorphicMap::parse(1, "(z1 - 1.2)/((z1 + 0.8)*(z1 - 4i))");
  EXPECT_TRUE(f.f0().holomorphic_safe());
  EXPECT_TRUE(f.f1().holomorphic_safe());
  const CVec z{cplx(0.4, 0.3)};
  const cplx expect = (z[0] - 1.2) / ((z[0] + 0.8) * (z[0] - cplx(0, 4)));
  EXPECT_NEAR(std::abs(f.eval(z) - expect), 0.0, 1e-14);
  EXPECT_TRUE(f.regular_at_origin());
  EXPECT_FALSE(MeromorphicMap::parse(1, "1/z1").regular_at_origin());
}

TEST(Meromorphic, RejectsBadMaps) {
  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NoConvergence;
  };
  EXPECT_EQ(kind([] { MeromorphicMap::parse(1, "z2"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind([] { MeromorphicMap::parse(1, "z1 - z1", "1"); }), ErrorKind::InvalidArgument);
  EXPECT_EQ(kind([] { MeromorphicMap::parse(1, "exp(1/z1)"); }), ErrorKind::InvalidArgument);
}

TEST(Meromorphic, RecenterMovesOffDivisors) {
  const MeromorphicMap f = MeromorphicMap::parse(1, "z1*(z1 - 2)");
  const Recentered r = recenter(f);
  EXPECT_TRUE(r.moved());
  EXPECT_TRUE(r.map.regular_at_origin());
  EXPECT_NEAR(std::abs(r.offset[0]), 0.05, 1e-15);
  const MeromorphicMap g = MeromorphicMap::parse(1, "z1 + 1");
  const std::array<cplx, 1> targets{1.0};
  EXPECT_TRUE(recenter(g, targets).moved());
  EXPECT_FALSE(recenter(g).moved());
}
