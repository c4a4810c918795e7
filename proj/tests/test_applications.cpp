#include "corpus.hpp"

#include <gtest/gtest.h>

using namespace nevan;

namespace {

QuadConfig cfg(double tol = 1e-8) {
  QuadConfig c;
  c.rel_tol = tol;
  return c;
}

MeromorphicMap one(std::string_view s) { return MeromorphicMap::parse(1, s); }

Box square(double h) { return {-h, h, -h, h}; }

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::Parse;
}

}  // namespace

TEST(RationalInU, ParseAndEvaluate) {
  const RationalInU R = RationalInU::parse(1, "(u + exp(z1))/(u^2 + 1)");
  const std::array<cplx, 1> z{cplx(0.3, -0.2)};
  const cplx u(1.1, 0.4);
  EXPECT_LT(std::abs(R.eval(z, u) - (u + std::exp(z[0])) / (u * u + 1.0)), 1e-14);
  EXPECT_EQ(R.coefficients().size(), 4u);
  EXPECT_EQ(kind_of([] { RationalInU::parse(1, "u/(0*u)"); }), ErrorKind::DegenerateRational);
  EXPECT_EQ(kind_of([] { RationalInU::parse(1, "u + z2"); }), ErrorKind::InvalidArgument);
}

TEST(RationalInU, Degree) {
  EXPECT_EQ(degree_in_u(RationalInU::parse(1, "(u + exp(z1))/(u^2 + 1)")), 2);
  EXPECT_EQ(degree_in_u(RationalInU::parse(1, "(2*u + z1)/(z1*u - 3)")), 1);
  EXPECT_EQ(degree_in_u(RationalInU::parse(1, "(u^2 - 1)/(u - 1)")), 1);
  EXPECT_EQ(degree_in_u(RationalInU::parse(1, "u")), 1);
  EXPECT_EQ(degree_in_u(RationalInU::parse(2, "(z1*u^3 + z2)/(u - z1)")), 3);
  // ad - bc = 0 collapses to a constant in u
  EXPECT_EQ(degree_in_u(RationalInU::parse(1, "(2*u + 2)/(u + 1)")), 0);
  // common coefficient factor does not change the degree
  EXPECT_EQ(degree_in_u(RationalInU::parse(1, "(exp(z1)*u^2 + exp(z1))/(exp(z1)*u - exp(z1)*3)")), 2);
}

TEST(RationalInU, ComposeMatchesPointwise) {
  const RationalInU R = RationalInU::parse(1, "(u + 1)/(u - z1)");
  const MeromorphicMap f = one("exp(z1)/(z1 + 2)");
  const MeromorphicMap g = R.compose(f);
  for (cplx z : {cplx(0.5, 0.5), cplx(-1.0, 2.0), cplx(2.0, -3.0)}) {
    const std::array<cplx, 1> zv{z};
    const cplx want = R.eval(zv, f.eval(zv));
    EXPECT_LT(std::abs(g.eval(zv) - want), 1e-12 * std::max(1.0, std::abs(want)));
  }
}

TEST(Preimages, Squares) {
  const MeromorphicMap f = one("z1^2");
  auto pts = find_preimages_1d(f, Target::finite(1.0), square(2.0), cfg()).points;
  ASSERT_EQ(pts.size(), 2u);
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.z.real() < b.z.real(); });
  EXPECT_LT(std::abs(pts[0].z + 1.0), 1e-10);
  EXPECT_LT(std::abs(pts[1].z - 1.0), 1e-10);
  EXPECT_EQ(pts[0].multiplicity, 1);
  const auto zero = find_preimages_1d(f, Target::finite(0.0), square(2.0), cfg()).points;
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_LT(std::abs(zero[0].z), 1e-6);
  EXPECT_EQ(zero[0].multiplicity, 2);
}

TEST(Preimages, MultiplicityMatchesDiskCount) {
  const double h = 3.3;
  for (const char* s : {"z1^3 - 27", "(z1 - 1.2)/((z1 + 0.8)*(z1 - 4i))", "exp(2*z1) + 1", "(z1 - 0.5)^2*(z1 + 1i)"}) {
    const MeromorphicMap f = one(s);
    for (cplx a : {cplx(0.0), cplx(2.5, 0.0)}) {
      int inside = 0;
      for (const auto& p : find_preimages_1d(f, Target::finite(a), square(h), cfg()).points)
        if (std::abs(p.z) < h) inside += p.multiplicity;
      EXPECT_EQ(inside, count_points_1d(f, Target::finite(a), h, cfg()).count) << s << " a=" << a;
    }
  }
}

TEST(Preimages, IteratedExpAgainstGridScan) {
  // exp(exp(z)) = 1 exactly when e^z = 2 pi i k, k != 0
  const MeromorphicMap f = one("exp(exp(z1))");
  const Box box;
  const auto pts = find_preimages_1d(f, Target::finite(1.0), box, cfg()).points;
  std::vector<cplx> exact;
  for (int k = -200; k <= 200; ++k) {
    if (k == 0) continue;
    const cplx z = std::log(cplx(0.0, kTwoPi * k));
    for (int j = -3; j <= 3; ++j) {
      const cplx w = z + cplx(0.0, kTwoPi * j);
      if (box.contains(w)) exact.push_back(w);
    }
  }
  ASSERT_FALSE(exact.empty());
  EXPECT_EQ(pts.size(), exact.size());
  for (const auto& p : pts) {
    const double d = std::abs(exp(exp(p.z)) - 1.0);
    EXPECT_LT(d, 1e-8);
    EXPECT_EQ(p.multiplicity, 1);
  }
}

TEST(Invariance, IteratedExpWithLogThree) {
  // g(z + log 3) = g(z)^3 maps the square roots of unity into themselves
  const MeromorphicMap f = one("exp(exp(z1))");
  for (double a : {1.0, -1.0}) {
    const InvarianceReport rep = forward_invariance_check(f, std::log(3.0), Target::finite(a), Box{}, cfg());
    EXPECT_FALSE(rep.points.empty());
    EXPECT_TRUE(rep.invariant()) << a << " violations " << rep.violations.size();
  }
}

TEST(Invariance, PeriodicAndBroken) {
  const InvarianceReport per = forward_invariance_check(one("exp(2*pi*i*z1)"), 1.0, Target::finite(2.0), Box{}, cfg());
  EXPECT_FALSE(per.points.empty());
  EXPECT_TRUE(per.invariant());
  // pre-images 2 pi i k of 1 under e^z move to points where e^z = e
  const InvarianceReport bad = forward_invariance_check(one("exp(z1)"), 1.0, Target::finite(1.0), Box{}, cfg());
  EXPECT_EQ(bad.points.size(), 3u);
  EXPECT_EQ(bad.violations.size(), bad.points.size());
}

TEST(Periodicity, Examples) {
  const std::array<cplx, 1> c1{1.0};
  const auto samples = periodicity_samples(1, 42);
  EXPECT_TRUE(periodicity_test(one("exp(2*pi*i*z1)"), c1, samples).is_periodic);
  const PeriodicityResult e = periodicity_test(one("exp(z1)"), c1, samples);
  EXPECT_FALSE(e.is_periodic);
  EXPECT_GT(e.max_dev, 0.1);
  const std::array<cplx, 1> l3{std::log(3.0)};
  EXPECT_FALSE(periodicity_test(one("exp(exp(z1))"), l3, samples).is_periodic);
}

TEST(Periodicity, IteratedExpPowerIdentity) {
  for (int m : {1, 2, 3}) {
    const Program g(parse_expr("exp(exp(z1))"));
    for (const auto& z : periodicity_samples(1, 7, 32)) {
      const std::array<cplx, 1> zs{z[0] + std::log(m + 1.0)};
      const LogMag a = g.eval_logmag(zs), b = g.eval_logmag(z);
      EXPECT_NEAR(a.log_abs, (m + 1) * b.log_abs, 1e-9 * std::max(1.0, std::abs(a.log_abs)));
      EXPECT_NEAR(std::abs(std::remainder(a.phase - (m + 1) * b.phase, kTwoPi)), 0.0, 1e-8);
    }
  }
}

TEST(Picard, Verdicts) {
  const std::array<Target, 3> roots{Target::finite(1.0), Target::finite(-1.0), Target::finite(cplx(0.0, 1.0))};
  const auto grid = radius_grid(3.0, 20.0, 24, false);
  const PicardReport per = picard_verdict(one("exp(2*pi*i*z1)"), 1.0, roots, Box{}, grid, cfg(1e-6));
  EXPECT_EQ(per.verdict, Verdict::Consistent);
  EXPECT_TRUE(per.periodicity.is_periodic);

  const std::array<Target, 3> t{Target::finite(1.0), Target::finite(std::exp(1.0)), Target::finite(std::exp(2.0))};
  const PicardReport ez = picard_verdict(one("exp(z1)"), 1.0, t, Box{}, grid, cfg(1e-6));
  EXPECT_EQ(ez.verdict, Verdict::Consistent);
  EXPECT_FALSE(ez.all_invariant);
  EXPECT_EQ(to_string(Verdict::GrowthEscape), "GROWTH_ESCAPE");
}

TEST(Valiron, ClosedForms) {
  const MeromorphicMap ez = one("exp(z1)");
  for (const auto& row : valiron_mohonko_check(RationalInU::parse(1, "u^2"), ez, {10.0, 30.0}, cfg())) {
    EXPECT_EQ(row.degree, 2);
    EXPECT_NEAR(row.T_composed, 2.0 * row.r / kPi, 1e-6);
    EXPECT_NEAR(row.ratio, 1.0, 1e-7);
  }
  for (const auto& row : valiron_mohonko_check(RationalInU::parse(1, "u"), one("(z1 - 1)/(z1 + 2)"), {3.0}, cfg()))
    EXPECT_NEAR(row.ratio, 1.0, 1e-12);
  const auto mob = valiron_mohonko_check(RationalInU::parse(1, "(u + 1)/(u - 1)"), ez, {10.0, 30.0}, cfg());
  for (const auto& row : mob) EXPECT_NEAR(row.ratio, 1.0, 0.05) << row.r;
  const auto coeff = valiron_mohonko_check(RationalInU::parse(1, "exp(z1)*u"), one("exp(2*z1)"), {5.0}, cfg());
  EXPECT_NEAR(coeff[0].coeff_T_max, 5.0 / kPi, 1e-7);
}

TEST(Riccati, ExamplesAndErrors) {
  const MeromorphicMap ez = one("exp(z1)");
  const std::array<cplx, 1> c{std::log(2.0)};
  EXPECT_EQ(kind_of([&] { riccati_analysis(RationalInU::parse(1, "u^2"), ez, c, {5.0, 10.0}, cfg()); }),
            ErrorKind::NotASolution);
  // e^{z + log 2} = 2 e^z is a genuine degree-one solution
  const RiccatiReport lin = riccati_analysis(RationalInU::parse(1, "2*u"), ez, c, radius_grid(5.0, 40.0, 16, false), cfg());
  EXPECT_LT(lin.residual, 1e-12);
  EXPECT_EQ(lin.degree, 1);
  EXPECT_TRUE(lin.admissible);
  EXPECT_EQ(lin.verdict, Verdict::Consistent);

  const std::array<cplx, 1> one_shift{1.0};
  const RiccatiReport k = riccati_analysis(RationalInU::parse(1, "u"), one("2"), one_shift, {1.0, 2.0}, cfg());
  EXPECT_EQ(k.degree, 1);
  EXPECT_EQ(k.verdict, Verdict::Consistent);

  const MeromorphicMap w = one("-i*(exp(i*pi*z1/2) - 1)/(exp(i*pi*z1/2) + 1)");
  const RiccatiReport tan_rep =
      riccati_analysis(RationalInU::parse(1, "(u + 1)/(1 - u)"), w, one_shift, radius_grid(5.0, 29.0, 12, false), cfg(1e-6));
  EXPECT_LT(tan_rep.residual, 1e-8);
  EXPECT_EQ(tan_rep.degree, 1);
  EXPECT_EQ(tan_rep.verdict, Verdict::Consistent);
}
