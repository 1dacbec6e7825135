#include "multiren/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "multiren/errors.hpp"

namespace multiren::io {

namespace fs = std::filesystem;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(cplx z) {
  if (z.imag() == 0.0) return fmt(z.real());
  std::string im = fmt(std::abs(z.imag()));
  return fmt(z.real()) + (std::signbit(z.imag()) ? "-" : "+") + im + "i";
}

json mcd_to_json(const Mcd& s) {
  const auto f = s.fields();
  return json{{"elements", f.elements}, {"chains", f.chains}, {"critical", f.critical}, {"pi", f.pi}, {"marked", f.marked}};
}

Mcd mcd_from_json(const json& j) {
  if (!j.is_object()) throw InputError("an m.c.d. must be a JSON object");
  McdFields f;
  try {
    f.elements = j.at("elements").get<int>();
    f.chains = j.at("chains").get<std::vector<std::vector<int>>>();
    f.critical = j.at("critical").get<std::vector<int>>();
    f.pi = j.at("pi").get<std::vector<int>>();
    f.marked = j.at("marked").get<int>();
  } catch (const json::exception& e) {
    throw InputError(std::string("m.c.d. fields: ") + e.what());
  }
  try {
    return Mcd::validate(std::move(f));
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("m.c.d. shape: ") + e.what());
  }
}

json map_to_json(const MultimodalMap& f) { return json{{"n", f.n()}, {"params", f.params()}}; }

MultimodalMap map_from_json(const json& j) {
  std::vector<double> a;
  int n = 0;
  try {
    n = j.at("n").get<int>();
    a = j.at("params").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw InputError(std::string("map fields: ") + e.what());
  }
  if (n != static_cast<int>(a.size()))
    throw InputError("map file: n = " + std::to_string(n) + " but " + std::to_string(a.size()) + " params");
  return MultimodalMap(std::move(a));
}

json read_json_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::invalid_argument("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

Mcd read_mcd_file(const fs::path& p) { return mcd_from_json(read_json_file(p)); }
MultimodalMap read_map_file(const fs::path& p) { return map_from_json(read_json_file(p)); }

void write_atomic(const fs::path& p, std::string_view content) {
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  fs::create_directories(dir);
  const fs::path tmp = dir / ("." + p.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, p);
}

void write_json(const fs::path& p, const json& j) { write_atomic(p, j.dump(2) + "\n"); }

fs::path output_dir(const std::string& explicit_dir) {
  if (!explicit_dir.empty()) return explicit_dir;
  if (const char* env = std::getenv("MULTIREN_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) { row(header); }

Csv& Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw std::logic_error("csv row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

json report_to_json(const SolverReport& r, bool with_trace) {
  json j{{"params", r.params.params()},
         {"fixed_point", r.fixed_point},
         {"residual", r.residual},
         {"iterations", r.iterations},
         {"seed_index", r.seed_index},
         {"clamped", r.clamped},
         {"damping_events", r.trace.size()}};
  if (with_trace) {
    json t = json::array();
    for (const auto& e : r.trace) t.push_back({{"iteration", e.iteration}, {"theta", e.theta}, {"residual", e.residual}});
    j["trace"] = std::move(t);
  }
  return j;
}

json renorm_to_json(const RenormResult& r) {
  json rej = json::array();
  for (const auto& x : r.rejected) rej.push_back({{"period", x.period_real}, {"reason", x.reason}});
  return json{{"period", r.period_real},
              {"period_ext", r.period_ext},
              {"P", {r.P.lo, r.P.hi}},
              {"ell", r.ell},
              {"boundary_points", r.p},
              {"boundary_residual", r.boundary_residual},
              {"boundary_multiplier", r.boundary_multiplier},
              {"sigma", mcd_to_json(r.sigma)},
              {"rejected", rej}};
}

json tower_to_json(const Tower& t) {
  json levels = json::array();
  const auto N = t.cumulative_periods();
  const auto Q = level_half_widths(t);
  for (std::size_t i = 0; i < t.levels.size(); ++i) {
    json l = renorm_to_json(t.levels[i]);
    l["level"] = i + 1;
    l["cumulative_period"] = N[i];
    l["half_width_base"] = Q[i + 1];
    levels.push_back(std::move(l));
  }
  json j{{"complete", t.complete}, {"depth", t.levels.size()}, {"levels", levels}};
  if (!t.complete) j["failure"] = {{"level", t.failed_depth}, {"reason", t.failure}};
  return j;
}

json geometry_to_json(const GeometryReport& g) {
  auto fam = [](const std::vector<RatioStats>& v) {
    json a = json::array();
    for (const auto& s : v)
      a.push_back({{"family", s.family}, {"count", s.count}, {"min", s.min}, {"median", s.median}, {"max", s.max}});
    return a;
  };
  json per = json::array();
  for (const auto& c : g.per_copy) per.push_back(fam(c));
  return json{{"level", g.level}, {"intervals", g.intervals}, {"families", fam(g.families)}, {"per_copy", per}};
}

json fit_to_json(const RateFit& fit) {
  return json{{"alpha", fit.alpha},           {"slope", fit.slope},   {"intercept", fit.intercept},
              {"r2", fit.r2},                 {"burn_in", fit.burn_in}, {"points", fit.points},
              {"converging", fit.converging()}};
}

namespace {

json complex_list(const std::vector<cplx>& v) {
  json a = json::array();
  for (const auto& z : v) a.push_back({z.real(), z.imag()});
  return a;
}

}  // namespace

json bn_to_json(const BnVerdict& v) {
  json j{{"in_bn", v.in_bn()}, {"verdict", to_string(v.failure)}, {"detail", v.detail}};
  j["critical_points"] = complex_list(v.critical_points);
  j["critical_values"] = complex_list(v.critical_values);
  j["distinguished"] = v.distinguished;
  j["partition"] = v.partition;
  return j;
}

json verdict_to_json(const ConnectivityVerdict& v) {
  return json{{"verdict", to_string(v.kind)}, {"step", v.step}, {"copy", v.copy}};
}

std::string distance_csv(const DistanceSeries& s) {
  Csv c({"k", "d_k"});
  for (std::size_t i = 0; i < s.d.size(); ++i) c.row({std::to_string(s.k[i]), fmt(s.d[i])});
  return c.str();
}

std::string cascade_csv(const Cascade& c) {
  const std::size_t n = c.params.empty() ? 0 : c.params.front().size();
  std::vector<std::string> head{"k"};
  for (std::size_t i = 0; i < n; ++i) head.push_back(n == 1 ? "a_k" : "a_k_" + std::to_string(i + 1));
  head.push_back("ratio");
  Csv csv(head);
  for (std::size_t k = 0; k < c.params.size(); ++k) {
    std::vector<std::string> row{std::to_string(k + 1)};
    for (double a : c.params[k]) row.push_back(fmt(a));
    // ratio of index k + 1 uses a_k, a_{k+1}, a_{k+2}
    row.push_back(k >= 1 && k - 1 < c.ratios.size() ? fmt(c.ratios[k - 1]) : "");
    csv.row(row);
  }
  return csv.str();
}

std::string decay_csv(const std::vector<double>& ratios) {
  Csv c({"k", "ratio"});
  for (std::size_t i = 0; i < ratios.size(); ++i) c.row({std::to_string(i + 1), fmt(ratios[i])});
  return c.str();
}

std::string orbit_csv(const MultimodalMap& f, ExtPoint start, int len) {
  Csv c({"step", "copy", "x", "letter"});
  const auto pts = orbit(f, start, len);
  for (std::size_t i = 0; i < pts.size(); ++i)
    c.row({std::to_string(i), std::to_string(pts[i].copy), fmt(pts[i].x),
           std::string(1, static_cast<char>(letter_of(pts[i].x)))});
  return c.str();
}

namespace {

double parse_real(std::string_view s, std::string_view whole) {
  const std::string t(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
  return v;
}

}  // namespace

cplx parse_complex(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  const std::string_view s = text.substr(b, e - b);
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i') return {parse_real(s, text), 0.0};
  const std::string_view body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign
  std::size_t cut = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      cut = i;
      break;
    }
  auto imag_of = [&](std::string_view t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t, text);
  };
  if (cut == std::string_view::npos) return {0.0, imag_of(body)};
  return {parse_real(body.substr(0, cut), text), imag_of(body.substr(cut))};
}

std::vector<cplx> parse_complex_list(std::string_view text) {
  std::vector<cplx> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(parse_complex(cur));
    cur.clear();
  };
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ';' || ch == ',')
      flush();
    else
      cur += ch;
  }
  flush();
  return out;
}

std::string pgm_bytes(const Raster& r) {
  std::int32_t lo = 0, hi = 0;
  for (auto v : r.values)
    if (v > 0) {
      lo = lo == 0 ? v : std::min(lo, v);
      hi = std::max(hi, v);
    }
  std::string out = "P5\n" + std::to_string(r.width) + " " + std::to_string(r.height) + "\n255\n";
  out.reserve(out.size() + r.values.size());
  for (auto v : r.values) {
    unsigned char g = 0;
    if (v > 0) g = hi > lo ? static_cast<unsigned char>(1 + (254L * (v - lo)) / (hi - lo)) : 255;
    out.push_back(static_cast<char>(g));
  }
  return out;
}

json raster_metadata(const Raster& r, const TypeNPoly& p) {
  std::int32_t lo = 0, hi = 0;
  for (auto v : r.values)
    if (v > 0) {
      lo = lo == 0 ? v : std::min(lo, v);
      hi = std::max(hi, v);
    }
  return json{{"width", r.width},
              {"height", r.height},
              {"window", {{"re_min", r.window.re_min}, {"re_max", r.window.re_max}, {"im_min", r.window.im_min}, {"im_max", r.window.im_max}}},
              {"cap", r.cap},
              {"n", p.n()},
              {"params", complex_list(p.a)},
              {"gray", {{"bounded", 0}, {"escape_step_min", lo}, {"escape_step_max", hi}, {"scale", "linear 1..255"}}}};
}

}  // namespace multiren::io
