#pragma once

#include <nevan/io.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace nevan::cli {

enum Exit : int { kOk = 0, kInputError = 2, kNumericFailure = 3, kInvariantViolation = 4 };

struct RunSpec {
  std::string command;
  std::string kind;  // verify sub-kind
  std::string f, f0, f1, R;
  int n = 1;
  std::string c;
  std::string targets;
  std::optional<double> rmin, rmax;
  int rpoints = 32;
  bool log_grid = false;
  double delta = 0.5;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  std::optional<double> s_or_R;
  std::string box;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  int mc_samples = 4000;
};

struct Output {
  std::string text;
  int code = kOk;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline cplx parse_constant(const std::string& text) {
  const Expr e = parse_expr(text);
  if (!e.is_const()) throw Error(ErrorKind::Parse, "expected a complex constant, got '" + text + "'");
  return e.value();
}

inline CVec parse_cvec(const std::string& text) {
  CVec out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_constant(part));
  return out;
}

inline std::vector<Target> parse_targets(const std::string& text) {
  std::vector<Target> out;
  if (text.empty()) return out;
  for (auto part : split(text, ',')) {
    part.erase(std::remove_if(part.begin(), part.end(), [](unsigned char ch) { return std::isspace(ch); }), part.end());
    if (part == "inf" || part == "infinity")
      out.push_back(Target::infinity());
    else
      out.push_back(Target::finite(parse_constant(part)));
  }
  return out;
}

inline std::vector<cplx> finite_targets(const std::vector<Target>& ts, const char* what) {
  std::vector<cplx> out;
  for (const auto& t : ts) {
    if (t.is_infinity()) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": targets must be finite");
    out.push_back(*t.value);
  }
  return out;
}

inline MeromorphicMap load_map(const RunSpec& s) {
  if (!s.f.empty()) {
    if (!s.f0.empty() || !s.f1.empty()) throw Error(ErrorKind::InvalidArgument, "give either --f or --f0/--f1, not both");
    return MeromorphicMap::parse(s.n, s.f);
  }
  if (s.f1.empty()) throw Error(ErrorKind::InvalidArgument, "missing function: use --f or --f0/--f1");
  return MeromorphicMap::parse(s.n, s.f0.empty() ? "1" : s.f0, s.f1);
}

inline CVec load_shift(const RunSpec& s, bool required) {
  CVec c = parse_cvec(s.c);
  if (c.empty()) {
    if (required) throw Error(ErrorKind::InvalidArgument, "missing --c");
    c.assign(static_cast<std::size_t>(s.n), 0.0);
    c[0] = 1.0;
  }
  if (static_cast<int>(c.size()) != s.n)
    throw Error(ErrorKind::InvalidArgument, "--c must have exactly n components");
  return c;
}

inline QuadConfig load_config(const RunSpec& s) {
  QuadConfig cfg;
  cfg.rel_tol = s.tol;
  cfg.rng_seed = s.seed;
  cfg.threads = std::max(1, s.threads);
  cfg.mc_samples = s.mc_samples;
  cfg.validate(s.n);
  return cfg;
}

inline std::vector<double> load_grid(const RunSpec& s, double rmin, double rmax) {
  return radius_grid(s.rmin.value_or(rmin), s.rmax.value_or(rmax), s.rpoints, s.log_grid);
}

inline Box load_box(const RunSpec& s) {
  Box b;
  if (s.box.empty()) return b;
  const auto parts = split(s.box, ',');
  if (parts.size() != 4) throw Error(ErrorKind::InvalidArgument, "--box expects re_min,re_max,im_min,im_max");
  b.re_min = parse_constant(parts[0]).real();
  b.re_max = parse_constant(parts[1]).real();
  b.im_min = parse_constant(parts[2]).real();
  b.im_max = parse_constant(parts[3]).real();
  return b;
}

inline json meta(const RunSpec& s) {
  json config = {{"command", s.command},
                 {"kind", s.kind},
                 {"f", s.f},
                 {"f0", s.f0},
                 {"f1", s.f1},
                 {"R", s.R},
                 {"n", s.n},
                 {"c", s.c},
                 {"targets", s.targets},
                 {"rmin", s.rmin ? io::num(*s.rmin) : json(nullptr)},
                 {"rmax", s.rmax ? io::num(*s.rmax) : json(nullptr)},
                 {"rpoints", s.rpoints},
                 {"log_grid", s.log_grid},
                 {"delta", io::num(s.delta)},
                 {"tol", io::num(s.tol)},
                 {"s_or_R", s.s_or_R ? io::num(*s.s_or_R) : json(nullptr)},
                 {"box", s.box},
                 {"mc_samples", s.mc_samples}};
  return {{"version", kVersion}, {"seed", s.seed}, {"config", config}};
}

inline std::string emit_json(const RunSpec& s, const json& rows, const json& summary = nullptr) {
  json doc = {{"meta", meta(s)}, {"rows", rows}};
  if (!summary.is_null()) doc["summary"] = summary;
  return doc.dump(2) + "\n";
}

inline void require_format(const RunSpec& s, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (s.format == a) return;
  throw Error(ErrorKind::InvalidArgument, "format '" + s.format + "' is not available for " + s.command);
}

inline std::string bound_csv(const std::vector<BoundReport>& reps) {
  CsvWriter w({"r", "s_or_R", "delta", "lhs", "rhs", "margin", "lhs_err", "rhs_err", "holds"});
  for (const auto& b : reps)
    w.add({io::fmt17(b.r), io::fmt17(b.s_or_R), io::fmt17(b.delta), io::fmt17(b.lhs), io::fmt17(b.rhs),
           io::fmt17(b.margin), io::fmt17(b.lhs_err), io::fmt17(b.rhs_err), b.holds ? "true" : "false"});
  return w.str();
}

inline Output cmd_profile(const RunSpec& s) {
  require_format(s, {"csv", "json", "svg"});
  const MeromorphicMap f = load_map(s);
  const QuadConfig cfg = load_config(s);
  const NevanlinnaProfile p = profile(f, load_grid(s, 1.0, 50.0), cfg);
  if (s.format == "csv") return {profile_csv(p)};
  if (s.format == "json") return {emit_json(s, p.rows, {{"f_id", p.f_id}, {"target", p.target}})};
  SvgSeries T{"T(r)", {}, {}}, m{"m(r)", {}, {}}, N{"N(r)", {}, {}};
  for (const auto& row : p.rows) {
    T.x.push_back(row.r), T.y.push_back(row.T);
    m.x.push_back(row.r), m.y.push_back(row.m);
    N.x.push_back(row.r), N.y.push_back(row.N);
  }
  return {svg_loglog("Nevanlinna characteristic of " + p.f_id, "r", "T, m, N", {T, m, N}, s.seed)};
}

inline Output cmd_hyper_order(const RunSpec& s) {
  require_format(s, {"csv", "json"});
  const MeromorphicMap f = load_map(s);
  const NevanlinnaProfile p = profile(f, load_grid(s, 1.0, 50.0), load_config(s));
  json summary = {{"f_id", p.f_id}};
  std::string order = "", hyper = "";
  try {
    const GrowthEstimate g = estimate_order(p);
    summary["order"] = g;
    order = io::fmt17(g.value);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientGrowth) throw;
    summary["order"] = nullptr;
  }
  try {
    const GrowthEstimate g = estimate_hyper_order(p);
    summary["hyper_order"] = g;
    hyper = io::fmt17(g.value);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InsufficientGrowth) throw;
    summary["hyper_order"] = nullptr;
  }
  if (s.format == "json") return {emit_json(s, p.rows, summary)};
  CsvWriter w({"quantity", "value"});
  w.add({"order", order});
  w.add({"hyper_order", hyper});
  return {w.str()};
}

inline Output cmd_verify(const RunSpec& s) {
  const MeromorphicMap f = load_map(s);
  const QuadConfig cfg = load_config(s);
  const std::vector<double> grid = load_grid(s, 1.0, 50.0);
  constexpr double kResidualLimit = 1e-5;

  if (s.kind == "jensen") {
    require_format(s, {"csv", "json"});
    json rows = json::array();
    CsvWriter w({"r", "residual"});
    bool ok = true;
    for (double r : grid) {
      const double res = jensen_residual(f, r, cfg);
      ok = ok && res <= kResidualLimit;
      rows.push_back({{"r", io::num(r)}, {"residual", io::num(res)}});
      w.add({io::fmt17(r), io::fmt17(res)});
    }
    return {s.format == "csv" ? w.str() : emit_json(s, rows), ok ? kOk : kInvariantViolation};
  }
  if (s.kind == "fmt") {
    require_format(s, {"csv", "json"});
    const auto targets = finite_targets(parse_targets(s.targets), "verify fmt");
    if (targets.empty()) throw Error(ErrorKind::InvalidArgument, "verify fmt: --targets required");
    json rows = json::array();
    CsvWriter w({"r", "a", "residual", "t_gap"});
    bool ok = true;
    for (double r : grid)
      for (cplx a : targets) {
        const FmtResidual res = fmt_residual(f, a, r, cfg);
        ok = ok && res.residual <= kResidualLimit;
        rows.push_back({{"r", io::num(r)}, {"a", io::cnum(a)}, {"residual", io::num(res.residual)}, {"t_gap", io::num(res.t_gap)}});
        w.add({io::fmt17(r), nevan::detail::format_complex(a), io::fmt17(res.residual), io::fmt17(res.t_gap)});
      }
    return {s.format == "csv" ? w.str() : emit_json(s, rows), ok ? kOk : kInvariantViolation};
  }
  if (s.kind == "lemma1" || s.kind == "lemma-nd") {
    require_format(s, {"csv", "json", "svg"});
    const CVec c = load_shift(s, false);
    const double ac = nevan::detail::norm(c);
    std::vector<BoundReport> reps;
    for (double r : grid) {
      const double outer = s.s_or_R.value_or(2.0 * r + 2.0 * ac);
      reps.push_back(s.kind == "lemma1" ? lemma1_bound(f, r, outer, c.at(0), s.delta, cfg)
                                        : lemma_nd_bound(f, r, outer, c, s.delta, cfg));
    }
    const bool ok = std::all_of(reps.begin(), reps.end(), [](const BoundReport& b) { return b.holds; });
    const int code = ok ? kOk : kInvariantViolation;
    if (s.format == "csv") return {bound_csv(reps), code};
    if (s.format == "json") return {emit_json(s, reps), code};
    SvgSeries lhs{"lhs", {}, {}}, rhs{"rhs", {}, {}};
    for (const auto& b : reps) {
      lhs.x.push_back(b.r), lhs.y.push_back(b.lhs);
      rhs.x.push_back(b.r), rhs.y.push_back(b.rhs);
    }
    return {svg_loglog("Logarithmic difference bound", "r", "value", {lhs, rhs}, s.seed), code};
  }
  if (s.kind == "smt") {
    require_format(s, {"csv", "json"});
    const CVec c = load_shift(s, false);
    const auto targets = finite_targets(parse_targets(s.targets), "verify smt");
    std::vector<SmtLedger> rows;
    for (double r : grid) rows.push_back(smt_ledger(f, c, targets, r, cfg));
    if (s.format == "json") return {emit_json(s, rows)};
    CsvWriter w({"r", "lhs", "two_T", "n_delta", "slack"});
    for (const auto& l : rows) w.add({io::fmt17(l.r), io::fmt17(l.lhs), io::fmt17(l.two_T), io::fmt17(l.n_delta), io::fmt17(l.slack)});
    return {w.str()};
  }
  if (s.kind == "shift-T") {
    require_format(s, {"csv", "json"});
    const CVec c = load_shift(s, false);
    const auto rows = shift_characteristic_check(f, c, grid, cfg);
    if (s.format == "json") return {emit_json(s, rows)};
    CsvWriter w({"r", "T_shift", "T", "ratio", "N_shift", "N_bound", "counting_holds"});
    for (const auto& x : rows)
      w.add({io::fmt17(x.r), io::fmt17(x.T_shift), io::fmt17(x.T), io::fmt17(x.ratio), io::fmt17(x.N_shift),
             io::fmt17(x.N_bound), x.counting_holds ? "true" : "false"});
    return {w.str()};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown verify kind '" + s.kind + "'");
}

inline Output cmd_picard(const RunSpec& s) {
  require_format(s, {"json", "csv"});
  if (s.n != 1) throw Error(ErrorKind::InvalidArgument, "picard: only n = 1 is supported");
  const MeromorphicMap f = load_map(s);
  const QuadConfig cfg = load_config(s);
  const CVec c = load_shift(s, true);
  const auto ts = parse_targets(s.targets);
  if (ts.size() != 3) throw Error(ErrorKind::InvalidArgument, "picard: exactly three --targets required");
  const PicardReport rep = picard_verdict(f, c[0], {ts[0], ts[1], ts[2]}, load_box(s), load_grid(s, 3.0, 20.0), cfg);
  json rows = json::array();
  CsvWriter w({"target", "re", "im", "multiplicity", "forward_hit"});
  for (const auto& inv : rep.invariance)
    for (std::size_t i = 0; i < inv.points.size(); ++i) {
      rows.push_back({{"target", io::target(inv.target)},
                      {"z", io::cnum(inv.points[i].z)},
                      {"multiplicity", inv.points[i].multiplicity},
                      {"forward_hit", static_cast<bool>(inv.forward_hits[i])}});
      w.add({inv.target.to_string(), io::fmt17(inv.points[i].z.real()), io::fmt17(inv.points[i].z.imag()),
             std::to_string(inv.points[i].multiplicity), inv.forward_hits[i] ? "true" : "false"});
    }
  if (s.format == "csv") return {w.str()};
  return {emit_json(s, rows, rep)};
}

inline Output cmd_riccati(const RunSpec& s) {
  require_format(s, {"json"});
  if (s.R.empty()) throw Error(ErrorKind::InvalidArgument, "riccati: --R required");
  const MeromorphicMap w = load_map(s);
  const RationalInU R = RationalInU::parse(s.n, s.R);
  const QuadConfig cfg = load_config(s);
  const CVec c = load_shift(s, true);
  try {
    const RiccatiReport rep = riccati_analysis(R, w, c, load_grid(s, 5.0, 30.0), cfg);
    json rows = json::array();
    for (std::size_t i = 0; i < rep.radii.size(); ++i)
      rows.push_back({{"r", io::num(rep.radii[i])}, {"admissibility", io::num(rep.admissibility[i])}});
    return {emit_json(s, rows, rep)};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotASolution) throw;
    json summary = {{"verdict", "NOT_A_SOLUTION"},
                    {"residual", io::num(functional_residual(R, w, c, cfg.rng_seed))},
                    {"message", e.what()}};
    return {emit_json(s, json::array(), summary), kNumericFailure};
  }
}

inline void add_common(CLI::App* sub, RunSpec& s) {
  sub->add_option("--f", s.f, "function f = f1/f0 as one expression");
  sub->add_option("--f0", s.f0, "denominator component");
  sub->add_option("--f1", s.f1, "numerator component");
  sub->add_option("--n", s.n, "dimension")->check(CLI::Range(1, 9));
  sub->add_option("--c", s.c, "shift vector a+bi[,a+bi...]");
  sub->add_option("--targets", s.targets, "target values, 'inf' allowed");
  sub->add_option("--rmin", s.rmin, "smallest radius");
  sub->add_option("--rmax", s.rmax, "largest radius");
  sub->add_option("--rpoints", s.rpoints, "number of radii")->check(CLI::PositiveNumber);
  sub->add_flag("--log-grid", s.log_grid, "geometric radius grid");
  sub->add_option("--delta", s.delta, "exponent delta of the difference bounds");
  sub->add_option("--seed", s.seed, "seed for all randomness");
  sub->add_option("--tol", s.tol, "quadrature relative tolerance");
  sub->add_option("--R", s.s_or_R, "outer radius s (or R) of the difference bounds");
  sub->add_option("--box", s.box, "search box re_min,re_max,im_min,im_max");
  sub->add_option("--mc-samples", s.mc_samples, "Monte Carlo samples (n >= 3)");
  sub->add_option("--threads", s.threads, "worker threads; results do not depend on it");
  sub->add_option("--out", s.out, "output path (default stdout)");
  sub->add_option("--format", s.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
}

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunSpec s;
  CLI::App app{"Numerical Nevanlinna theory toolkit", "nevan"};
  app.require_subcommand(1);
  auto* profile_cmd = app.add_subcommand("profile", "m, N, T over a radius grid");
  auto* verify_cmd = app.add_subcommand("verify", "check an identity or inequality over a radius grid");
  verify_cmd->add_option("kind", s.kind, "jensen | fmt | lemma1 | lemma-nd | smt | shift-T")
      ->required()
      ->check(CLI::IsMember({"jensen", "fmt", "lemma1", "lemma-nd", "smt", "shift-T"}));
  auto* picard_cmd = app.add_subcommand("picard", "forward-invariance verdict for three values");
  auto* riccati_cmd = app.add_subcommand("riccati", "degree analysis of w(z+c) = R(z, w)");
  riccati_cmd->add_option("--equation", s.R, "R(z,u) in z1..zn and u")->required();
  auto* hyper_cmd = app.add_subcommand("hyper-order", "order and hyper-order estimates");
  for (auto* sub : {profile_cmd, verify_cmd, picard_cmd, riccati_cmd, hyper_cmd}) detail::add_common(sub, s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "nevan: " << e.what() << "\n";
    return kInputError;
  }

  Output result;
  std::string op = "nevan";
  try {
    if (profile_cmd->parsed()) {
      s.command = op = "profile";
      result = detail::cmd_profile(s);
    } else if (verify_cmd->parsed()) {
      s.command = "verify";
      op = "verify " + s.kind;
      result = detail::cmd_verify(s);
    } else if (picard_cmd->parsed()) {
      s.command = op = "picard";
      result = detail::cmd_picard(s);
    } else if (riccati_cmd->parsed()) {
      s.command = op = "riccati";
      if (riccati_cmd->count("--format") == 0) s.format = "json";
      result = detail::cmd_riccati(s);
    } else {
      s.command = op = "hyper-order";
      result = detail::cmd_hyper_order(s);
    }
  } catch (const Error& e) {
    err << "nevan: " << op << ": " << e.what() << "\n";
    return e.is_input_error() ? kInputError : kNumericFailure;
  } catch (const std::exception& e) {
    err << "nevan: " << op << ": " << e.what() << "\n";
    return kNumericFailure;
  }

  if (s.out.empty()) {
    out << result.text;
  } else {
    std::ofstream file(s.out, std::ios::binary);
    if (!file) {
      err << "nevan: cannot write " << s.out << "\n";
      return kInputError;
    }
    file << result.text;
  }
  if (result.code == kInvariantViolation) err << "nevan: " << op << ": invariant violated\n";
  return result.code;
}

inline int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace nevan::cli
