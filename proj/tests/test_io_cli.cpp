#include <nevan/cli.hpp>
#include <nevan/io.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nevan;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

template <class T>
T round_trip(const T& x) {
  return json::parse(json(x).dump()).get<T>();
}

}  // namespace

TEST(Json, NonFiniteNumbers) {
  for (double x : {1.5, -0.0, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()})
    EXPECT_EQ(io::get_num(json::parse(io::num(x).dump())), x);
  EXPECT_TRUE(std::isnan(io::get_num(io::num(std::nan("")))));
  EXPECT_THROW(io::get_num(json("many")), Error);
  EXPECT_TRUE(io::get_target(io::target(Target::infinity())).is_infinity());
  EXPECT_EQ(*io::get_target(io::target(Target::finite({1.0, -2.0}))).value, cplx(1.0, -2.0));
}

TEST(Json, ReportRoundTrips) {
  BoundReport b;
  b.lhs = 0.125;
  b.rhs = 1.0 / 3.0;
  b.r = 2.0;
  b.s_or_R = 5.0;
  b.delta = 0.5;
  b.c = {cplx(0.5, 0.25)};
  b.margin = b.rhs - b.lhs;
  b.holds = true;
  b.offset = {cplx(0.05, 0.0)};
  const BoundReport b2 = round_trip(b);
  EXPECT_EQ(b2.rhs, b.rhs);
  EXPECT_EQ(b2.c, b.c);
  EXPECT_EQ(b2.offset, b.offset);
  EXPECT_EQ(b2.holds, true);

  RiccatiReport rr;
  rr.residual = 1e-14;
  rr.degree = 1;
  rr.radii = {5.0, 10.0};
  rr.admissibility = {0.0, std::numeric_limits<double>::infinity()};
  rr.hyper_order = GrowthEstimate{0.25, 1e-3, 0.2, 8};
  const RiccatiReport rr2 = round_trip(rr);
  EXPECT_EQ(rr2.admissibility, rr.admissibility);
  ASSERT_TRUE(rr2.hyper_order);
  EXPECT_EQ(rr2.hyper_order->rows_used, 8);
  EXPECT_EQ(rr2.verdict, Verdict::Consistent);

  PicardReport pr;
  pr.verdict = Verdict::GrowthEscape;
  InvarianceReport inv;
  inv.target = Target::finite(-1.0);
  inv.points = {{cplx(1.0, 2.0), 1}};
  inv.forward_hits = {true};
  pr.invariance = {inv};
  const PicardReport pr2 = round_trip(pr);
  EXPECT_EQ(pr2.verdict, Verdict::GrowthEscape);
  ASSERT_EQ(pr2.invariance.size(), 1u);
  EXPECT_EQ(pr2.invariance[0].points[0].z, cplx(1.0, 2.0));
  EXPECT_FALSE(pr2.hyper_order);

  SmtLedger l{2.0, 0.5, 2.0, 0.0, 1.5, {0.0}};
  EXPECT_EQ(round_trip(l).slack, 1.5);
  ShiftRow s{10.0, 3.5, 3.18, 1.1, 0.0, 0.0, true};
  EXPECT_EQ(round_trip(s).ratio, 1.1);
}

TEST(Csv, QuotingAndRoundTrip) {
  CsvWriter w({"a", "b,c", "q\"uote"});
  w.add({"1", "line\nbreak", ""});
  const std::string text = w.str();
  EXPECT_EQ(text.substr(0, 21), "a,\"b,c\",\"q\"\"uote\"\r\n1,");
  const auto rows = parse_csv(text);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][1], "b,c");
  EXPECT_EQ(rows[0][2], "q\"uote");
  EXPECT_EQ(rows[1][1], "line\nbreak");
  EXPECT_EQ(rows[1][2], "");
}

TEST(Csv, SeventeenDigitsRoundTrip) {
  for (double x : {kPi, 1.0 / 3.0, 6.02214076e23, -1e-300}) EXPECT_EQ(std::strtod(io::fmt17(x).c_str(), nullptr), x);
  EXPECT_EQ(io::fmt17(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Svg, SeedCommentAndDeterminism) {
  const SvgSeries s{"T", {1.0, 2.0, 4.0}, {0.5, 1.0, 2.0}};
  const std::string a = svg_loglog("t", "r", "T", {s}, 7), b = svg_loglog("t", "r", "T", {s}, 7);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("<!-- nevan 1.0.0 seed=7 -->"), std::string::npos);
  EXPECT_NE(a.find("<svg"), std::string::npos);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST(Cli, ProfileCsvMatchesClosedForm) {
  const CliRun r = run_cli({"profile", "--f", "exp(z1)", "--rmin", "1", "--rmax", "10", "--rpoints", "4", "--tol", "1e-8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "m", "N", "T", "err"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double rad = std::stod(rows[i][0]);
    EXPECT_NEAR(std::stod(rows[i][3]), rad / kPi, 1e-7);
  }
}

TEST(Cli, JsonShape) {
  const CliRun r = run_cli({"profile", "--f", "1/(z1 - 0.5)", "--rmin", "1", "--rmax", "2", "--rpoints", "2", "--format", "json",
                     "--seed", "9", "--threads", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["meta"]["version"], kVersion);
  EXPECT_EQ(doc["meta"]["seed"], 9);
  EXPECT_FALSE(doc["meta"]["config"].contains("threads"));
  ASSERT_EQ(doc["rows"].size(), 2u);
  const auto row = doc["rows"][1].get<ProfileRow>();
  EXPECT_NEAR(row.N, std::log(4.0), 1e-9);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"profile", "--f", "exp(z1", "--rmin", "1", "--rmax", "2"}).code, 2);
  EXPECT_EQ(run_cli({"profile", "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"profile", "--f", "z1", "--format", "svg", "--rmin", "1", "--rmax", "3", "--rpoints", "3"}).code, 0);
  EXPECT_EQ(run_cli({"hyper-order", "--f", "z1", "--format", "svg"}).code, 2);
  EXPECT_EQ(run_cli({"verify", "jensen", "--f", "(z1 - 0.3)/(z1 + 2)", "--rmin", "0.5", "--rmax", "5.5", "--rpoints", "4"}).code, 0);
  // r = 2 lies on the pole
  EXPECT_EQ(run_cli({"verify", "jensen", "--f", "(z1 - 0.3)/(z1 + 2)", "--rmin", "2", "--rmax", "3", "--rpoints", "2"}).code, 3);
  const CliRun smt = run_cli({"verify", "smt", "--f", "exp(2*pi*i*z1)", "--c", "1", "--targets", "2,-2", "--rmin", "1", "--rmax",
                       "2", "--rpoints", "2"});
  EXPECT_EQ(smt.code, 3);
  EXPECT_NE(smt.err.find("nevan: verify smt: IdenticallyZero"), std::string::npos) << smt.err;
  // a first-order-only quadrature cannot meet the residual limit near a pole
  const CliRun loose = run_cli({"verify", "jensen", "--f", "1/(z1 - 0.999)", "--rmin", "1", "--rmax", "1.5", "--rpoints", "2",
                         "--tol", "0.9"});
  EXPECT_EQ(loose.code, 4) << loose.out;
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(Cli, RiccatiNotASolution) {
  const CliRun r = run_cli({"riccati", "--f", "exp(z1)", "--equation", "u^2", "--c", "0.6931471805599453", "--rmin", "5",
                            "--rmax", "10", "--rpoints", "2"});
  EXPECT_EQ(r.code, 3);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["summary"]["verdict"], "NOT_A_SOLUTION");
  EXPECT_GT(io::get_num(doc["summary"]["residual"]), 1.0);
}

TEST(Cli, ThreadCountDoesNotChangeOutput) {
  for (const auto& fmt : {"csv", "json"}) {
    const std::vector<std::string> base = {"profile", "--f", "z1*z2 - 1", "--n", "2", "--rmin", "0.5", "--rmax", "1.2",
                                           "--rpoints", "3", "--tol", "1e-3", "--format", fmt};
    auto one = base, four = base;
    one.insert(one.end(), {"--threads", "1"});
    four.insert(four.end(), {"--threads", "4"});
    const CliRun a = run_cli(one), b = run_cli(four);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out) << fmt;
  }
}

TEST(Cli, WritesOutFile) {
  const auto path = std::filesystem::temp_directory_path() / "nevan_cli_out_test.csv";
  std::filesystem::remove(path);
  const CliRun r = run_cli({"verify", "shift-T", "--f", "exp(z1)", "--c", "1", "--rmin", "2", "--rmax", "4", "--rpoints", "2",
                     "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path, std::ios::binary);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  const auto rows = parse_csv(text);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "r");
  EXPECT_EQ(rows[2][6], "true");
  std::filesystem::remove(path);
}
