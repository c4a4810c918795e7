#pragma once

#include <nevan/applications.hpp>

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace nevan {

using json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

namespace io {

/// Doubles as JSON numbers; non-finite values as the strings "nan", "inf", "-inf".
inline json num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

inline double get_num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw Error(ErrorKind::Parse, "json: unexpected number string '" + s + "'");
  }
  return j.get<double>();
}

inline json cnum(cplx z) { return json::array({num(z.real()), num(z.imag())}); }
inline cplx get_cnum(const json& j) { return {get_num(j.at(0)), get_num(j.at(1))}; }

inline json cvec(const CVec& v) {
  json a = json::array();
  for (cplx z : v) a.push_back(cnum(z));
  return a;
}
inline CVec get_cvec(const json& j) {
  CVec v;
  for (const auto& x : j) v.push_back(get_cnum(x));
  return v;
}

inline json target(const Target& t) { return t.is_infinity() ? json("inf") : cnum(*t.value); }
inline Target get_target(const json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return Target::infinity();
  return Target::finite(get_cnum(j));
}

/// %.17g, so every double round-trips.
inline std::string fmt17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return detail::format_double(x);
}

}  // namespace io

inline void to_json(json& j, const ProfileRow& r) {
  j = {{"r", io::num(r.r)}, {"m", io::num(r.m)}, {"N", io::num(r.N)}, {"T", io::num(r.T)}, {"err", io::num(r.err)}};
}
inline void from_json(const json& j, ProfileRow& r) {
  r.r = io::get_num(j.at("r"));
  r.m = io::get_num(j.at("m"));
  r.N = io::get_num(j.at("N"));
  r.T = io::get_num(j.at("T"));
  r.err = io::get_num(j.at("err"));
}

inline void to_json(json& j, const NevanlinnaProfile& p) {
  j = {{"f_id", p.f_id}, {"target", p.target}, {"rows", p.rows}};
}
inline void from_json(const json& j, NevanlinnaProfile& p) {
  p.f_id = j.at("f_id").get<std::string>();
  p.target = j.at("target").get<std::string>();
  p.rows = j.at("rows").get<std::vector<ProfileRow>>();
}

inline void to_json(json& j, const GrowthEstimate& g) {
  j = {{"value", io::num(g.value)}, {"fit_residual", io::num(g.fit_residual)}, {"slope", io::num(g.slope)},
       {"rows_used", g.rows_used}};
}
inline void from_json(const json& j, GrowthEstimate& g) {
  g.value = io::get_num(j.at("value"));
  g.fit_residual = io::get_num(j.at("fit_residual"));
  g.slope = io::get_num(j.at("slope"));
  g.rows_used = j.at("rows_used").get<int>();
}

inline void to_json(json& j, const BoundReport& b) {
  j = {{"lhs", io::num(b.lhs)},         {"rhs", io::num(b.rhs)},   {"r", io::num(b.r)},
       {"s_or_R", io::num(b.s_or_R)},   {"delta", io::num(b.delta)}, {"c", io::cvec(b.c)},
       {"n", b.n},                      {"margin", io::num(b.margin)}, {"holds", b.holds},
       {"lhs_err", io::num(b.lhs_err)}, {"rhs_err", io::num(b.rhs_err)}, {"offset", io::cvec(b.offset)}};
}
inline void from_json(const json& j, BoundReport& b) {
  b.lhs = io::get_num(j.at("lhs"));
  b.rhs = io::get_num(j.at("rhs"));
  b.r = io::get_num(j.at("r"));
  b.s_or_R = io::get_num(j.at("s_or_R"));
  b.delta = io::get_num(j.at("delta"));
  b.c = io::get_cvec(j.at("c"));
  b.n = j.at("n").get<int>();
  b.margin = io::get_num(j.at("margin"));
  b.holds = j.at("holds").get<bool>();
  b.lhs_err = io::get_num(j.at("lhs_err"));
  b.rhs_err = io::get_num(j.at("rhs_err"));
  b.offset = io::get_cvec(j.at("offset"));
}

inline void to_json(json& j, const SmtLedger& s) {
  j = {{"r", io::num(s.r)},         {"lhs", io::num(s.lhs)},     {"two_T", io::num(s.two_T)},
       {"n_delta", io::num(s.n_delta)}, {"slack", io::num(s.slack)}, {"offset", io::cvec(s.offset)}};
}
inline void from_json(const json& j, SmtLedger& s) {
  s.r = io::get_num(j.at("r"));
  s.lhs = io::get_num(j.at("lhs"));
  s.two_T = io::get_num(j.at("two_T"));
  s.n_delta = io::get_num(j.at("n_delta"));
  s.slack = io::get_num(j.at("slack"));
  s.offset = io::get_cvec(j.at("offset"));
}

inline void to_json(json& j, const HolderParams& h) {
  j = {{"delta", io::num(h.delta)}, {"q", h.q}, {"C", io::num(h.C)}, {"C_err", io::num(h.C_err)}};
}
inline void from_json(const json& j, HolderParams& h) {
  h.delta = io::get_num(j.at("delta"));
  h.q = j.at("q").get<int>();
  h.C = io::get_num(j.at("C"));
  h.C_err = io::get_num(j.at("C_err"));
}

inline void to_json(json& j, const ShiftRow& s) {
  j = {{"r", io::num(s.r)},           {"T_shift", io::num(s.T_shift)}, {"T", io::num(s.T)},
       {"ratio", io::num(s.ratio)},   {"N_shift", io::num(s.N_shift)}, {"N_bound", io::num(s.N_bound)},
       {"counting_holds", s.counting_holds}};
}
inline void from_json(const json& j, ShiftRow& s) {
  s.r = io::get_num(j.at("r"));
  s.T_shift = io::get_num(j.at("T_shift"));
  s.T = io::get_num(j.at("T"));
  s.ratio = io::get_num(j.at("ratio"));
  s.N_shift = io::get_num(j.at("N_shift"));
  s.N_bound = io::get_num(j.at("N_bound"));
  s.counting_holds = j.at("counting_holds").get<bool>();
}

inline void to_json(json& j, const Box& b) {
  j = {{"re_min", io::num(b.re_min)}, {"re_max", io::num(b.re_max)}, {"im_min", io::num(b.im_min)},
       {"im_max", io::num(b.im_max)}};
}
inline void from_json(const json& j, Box& b) {
  b.re_min = io::get_num(j.at("re_min"));
  b.re_max = io::get_num(j.at("re_max"));
  b.im_min = io::get_num(j.at("im_min"));
  b.im_max = io::get_num(j.at("im_max"));
}

inline void to_json(json& j, const PreimagePoint& p) { j = {{"z", io::cnum(p.z)}, {"multiplicity", p.multiplicity}}; }
inline void from_json(const json& j, PreimagePoint& p) {
  p.z = io::get_cnum(j.at("z"));
  p.multiplicity = j.at("multiplicity").get<int>();
}

inline void to_json(json& j, const InvarianceReport& r) {
  json viol = json::array();
  for (cplx z : r.violations) viol.push_back(io::cnum(z));
  j = {{"target", io::target(r.target)}, {"box", r.box},       {"points", r.points},
       {"forward_hits", r.forward_hits}, {"violations", viol}};
}
inline void from_json(const json& j, InvarianceReport& r) {
  r.target = io::get_target(j.at("target"));
  r.box = j.at("box").get<Box>();
  r.points = j.at("points").get<std::vector<PreimagePoint>>();
  r.forward_hits = j.at("forward_hits").get<std::vector<bool>>();
  r.violations.clear();
  for (const auto& z : j.at("violations")) r.violations.push_back(io::get_cnum(z));
}

inline void to_json(json& j, const PeriodicityResult& p) {
  j = {{"is_periodic", p.is_periodic}, {"max_dev", io::num(p.max_dev)}};
}
inline void from_json(const json& j, PeriodicityResult& p) {
  p.is_periodic = j.at("is_periodic").get<bool>();
  p.max_dev = io::get_num(j.at("max_dev"));
}

inline Verdict verdict_from_string(const std::string& s) {
  if (s == "CONSISTENT") return Verdict::Consistent;
  if (s == "GROWTH_ESCAPE") return Verdict::GrowthEscape;
  if (s == "CONTRADICTION") return Verdict::Contradiction;
  throw Error(ErrorKind::Parse, "unknown verdict '" + s + "'");
}

inline void to_json(json& j, const PicardReport& p) {
  j = {{"verdict", to_string(p.verdict)},
       {"invariance", p.invariance},
       {"periodicity", p.periodicity},
       {"hyper_order", p.hyper_order ? json(*p.hyper_order) : json(nullptr)},
       {"all_invariant", p.all_invariant}};
}
inline void from_json(const json& j, PicardReport& p) {
  p.verdict = verdict_from_string(j.at("verdict").get<std::string>());
  p.invariance = j.at("invariance").get<std::vector<InvarianceReport>>();
  p.periodicity = j.at("periodicity").get<PeriodicityResult>();
  if (j.at("hyper_order").is_null())
    p.hyper_order.reset();
  else
    p.hyper_order = j.at("hyper_order").get<GrowthEstimate>();
  p.all_invariant = j.at("all_invariant").get<bool>();
}

inline void to_json(json& j, const ValironRow& v) {
  j = {{"r", io::num(v.r)}, {"T_composed", io::num(v.T_composed)}, {"T_f", io::num(v.T_f)},
       {"degree", v.degree}, {"ratio", io::num(v.ratio)},         {"coeff_T_max", io::num(v.coeff_T_max)}};
}
inline void from_json(const json& j, ValironRow& v) {
  v.r = io::get_num(j.at("r"));
  v.T_composed = io::get_num(j.at("T_composed"));
  v.T_f = io::get_num(j.at("T_f"));
  v.degree = j.at("degree").get<int>();
  v.ratio = io::get_num(j.at("ratio"));
  v.coeff_T_max = io::get_num(j.at("coeff_T_max"));
}

inline void to_json(json& j, const RiccatiReport& r) {
  json adm = json::array(), radii = json::array();
  for (double x : r.admissibility) adm.push_back(io::num(x));
  for (double x : r.radii) radii.push_back(io::num(x));
  j = {{"residual", io::num(r.residual)},
       {"degree", r.degree},
       {"radii", radii},
       {"admissibility", adm},
       {"admissible", r.admissible},
       {"hyper_order", r.hyper_order ? json(*r.hyper_order) : json(nullptr)},
       {"verdict", to_string(r.verdict)}};
}
inline void from_json(const json& j, RiccatiReport& r) {
  r.residual = io::get_num(j.at("residual"));
  r.degree = j.at("degree").get<int>();
  r.radii.clear();
  r.admissibility.clear();
  for (const auto& x : j.at("radii")) r.radii.push_back(io::get_num(x));
  for (const auto& x : j.at("admissibility")) r.admissibility.push_back(io::get_num(x));
  r.admissible = j.at("admissible").get<bool>();
  if (j.at("hyper_order").is_null())
    r.hyper_order.reset();
  else
    r.hyper_order = j.at("hyper_order").get<GrowthEstimate>();
  r.verdict = verdict_from_string(j.at("verdict").get<std::string>());
}

// ---------------------------------------------------------------------------
// CSV (RFC 4180) and SVG

/// Table of string cells, written with CRLF line breaks and quoting where needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) { rows_.push_back(std::move(header)); }

  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }

  static std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\r\n") == std::string::npos) return cell;
    std::string out = "\"";
    for (char ch : cell) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  }

  std::string str() const {
    std::string out;
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += quote(row[i]);
      }
      out += "\r\n";
    }
    return out;
  }

 private:
  std::vector<std::vector<std::string>> rows_;
};

/// Parses RFC 4180 text back into rows of cells.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(cell);
      cell.clear();
      any = true;
    } else if (ch == '\r' || ch == '\n') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(cell);
      rows.push_back(row);
      row.clear();
      cell.clear();
      any = false;
    } else {
      cell += ch;
      any = true;
    }
  }
  if (any || !cell.empty()) {
    row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

inline std::string profile_csv(const NevanlinnaProfile& p) {
  CsvWriter w({"r", "m", "N", "T", "err"});
  for (const auto& row : p.rows) w.add({io::fmt17(row.r), io::fmt17(row.m), io::fmt17(row.N), io::fmt17(row.T), io::fmt17(row.err)});
  return w.str();
}

struct SvgSeries {
  std::string label;
  std::vector<double> x, y;
};

/// Log-log line chart.  Non-positive points are skipped.
inline std::string svg_loglog(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<SvgSeries>& series, std::uint64_t seed) {
  constexpr double W = 640, H = 420, L = 70, R = 20, Tm = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0) || !(s.y[i] > 0) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-9) x1 = x0 + 1;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - Tm - B); };
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<!-- nevan " << kVersion << " seed=" << seed << " -->\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
    << title << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << Tm << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double lx = x0 + (x1 - x0) * k / 4, ly = y0 + (y1 - y0) * k / 4;
    o << "<text x=\"" << f(px(lx)) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << io::fmt17(std::round(std::pow(10.0, lx) * 1000) / 1000) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << f(py(ly) + 4) << "\" text-anchor=\"end\" font-size=\"11\">"
      << io::fmt17(std::round(std::pow(10.0, ly) * 1000) / 1000) << "</text>\n";
  }
  o << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 " << H / 2
    << ")\">" << ylabel << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    std::string pts;
    for (std::size_t i = 0; i < series[s].x.size(); ++i) {
      if (!(series[s].x[i] > 0) || !(series[s].y[i] > 0) || !std::isfinite(series[s].y[i])) continue;
      if (!pts.empty()) pts += ' ';
      pts += f(px(std::log10(series[s].x[i]))) + "," + f(py(std::log10(series[s].y[i])));
    }
    const char* col = colors[s % 5];
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"" << pts << "\"/>\n";
    o << "<text x=\"" << W - R - 4 << "\" y=\"" << Tm + 14 * (s + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
      << col << "\">" << series[s].label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace nevan
