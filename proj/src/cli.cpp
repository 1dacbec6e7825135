#include "multiren/cli.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "multiren/complex_poly.hpp"
#include "multiren/convergence.hpp"
#include "multiren/errors.hpp"
#include "multiren/io.hpp"
#include "multiren/parallel.hpp"
#include "multiren/realization.hpp"
#include "multiren/renorm.hpp"

namespace multiren::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

// "builtin:NAME" or a path to an m.c.d. file
Mcd load_type(const std::string& text) {
  constexpr std::string_view prefix = "builtin:";
  if (text.rfind(prefix, 0) == 0) return builtin_type(text.substr(prefix.size()));
  return io::read_mcd_file(text);
}

std::vector<double> parse_reals(const std::string& text) {
  std::vector<double> out;
  for (const auto& z : io::parse_complex_list(text)) {
    if (z.imag() != 0.0) throw std::invalid_argument("expected real numbers, got " + io::fmt(z));
    out.push_back(z.real());
  }
  return out;
}

Window parse_window(const std::string& text) {
  const auto v = parse_reals(text);
  if (v.size() != 4) throw std::invalid_argument("window needs re_min,im_min,re_max,im_max");
  Window w{v[0], v[2], v[1], v[3]};
  if (!(w.re_min < w.re_max) || !(w.im_min <= w.im_max)) throw std::invalid_argument("empty window");
  return w;
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw std::invalid_argument("size must be WIDTHxHEIGHT");
  const int w = std::stoi(text.substr(0, x));
  const int h = std::stoi(text.substr(x + 1));
  if (w < 1 || h < 1 || w > 16384 || h > 16384) throw std::invalid_argument("size out of range 1..16384");
  return {w, h};
}

struct SolverOpts {
  SolverConfig cfg;
  bool trace = false;
  void add(CLI::App* c) {
    c->add_option("--tol", cfg.tol, "residual tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--sep", cfg.sep, "minimum separation of comparable coordinates")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--max-iter", cfg.max_iter, "damped iterations per start")
        ->check(CLI::Range(1L, 100000000L))
        ->capture_default_str();
    c->add_option("--seeds", cfg.jitter_seeds, "jittered starts after the equispaced one")
        ->check(CLI::Range(0, 4096))
        ->capture_default_str();
    c->add_option("--seed", cfg.seed, "seed for the jittered starts")->capture_default_str();
    c->add_option("--newton-steps", cfg.newton_steps, "Newton steps that finish a solve (0 disables)")
        ->check(CLI::Range(0, 1000))
        ->capture_default_str();
    c->add_flag("--trace", trace, "include the damping trace in the report");
  }
};

struct MapInput {
  std::string file;
  std::string params;
  void add(CLI::App* c) {
    auto* m = c->add_option("--map", file, "map file {\"n\": n, \"params\": [...]}")->check(CLI::ExistingFile);
    auto* p = c->add_option("--params", params, "inline parameters a_1,...,a_n");
    m->excludes(p);
  }
  bool given() const { return !file.empty() || !params.empty(); }
  MultimodalMap load() const {
    if (!file.empty()) return io::read_map_file(file);
    if (!params.empty()) return MultimodalMap(parse_reals(params));
    throw std::invalid_argument("one of --map or --params is required");
  }
};

// --map/--params, or the Aitken estimate for a repeated type
struct LimitInput {
  MapInput map;
  std::string type = "builtin:doubling";
  int estimate_depth = 10;
  void add(CLI::App* c) {
    map.add(c);
    c->add_option("--type", type, "type whose estimated infinitely renormalizable map is used when no map is given")
        ->capture_default_str();
    c->add_option("--estimate-depth", estimate_depth, "cascade depth of that estimate")
        ->check(CLI::Range(1, 14))
        ->capture_default_str();
  }
  MultimodalMap load() const {
    if (map.given()) return map.load();
    const auto est = estimate_infinite(std::vector<Mcd>(static_cast<std::size_t>(estimate_depth), load_type(type)));
    return MultimodalMap(est.limit_estimate);
  }
};

struct Context {
  std::ostream& out;
  std::ostream& err;
  fs::path dir;
  std::string name;
  fs::path file(const std::string& suffix) const { return dir / (name + suffix); }
  void summary(const json& j) const { out << j.dump() << "\n"; }
};

json mcd_summary(const Mcd& s) {
  json j = io::mcd_to_json(s);
  j["transitive"] = is_transitive(s);
  j["essential"] = is_essential(s);
  return j;
}

struct Command {
  CLI::App* app;
  std::function<int(Context&)> body;
  std::string default_name;
  std::string name_override;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Renormalization of multimodal maps: combinatorics, realization, towers, convergence "
               "experiments and the complex polynomial side.",
               "multiren"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MULTIREN_VERSION);
  app.set_config("--config", "", "TOML/INI file with option values; flags on the command line win");
  int threads = 0;
  std::string out_dir;
  app.add_option("--threads", threads, "worker threads (0 = hardware)")->check(CLI::Range(0, 1024));
  app.add_option("--out-dir", out_dir, "directory for output files (default: $MULTIREN_OUTPUT_DIR or .)");
  app.footer(
      "Exit codes: 0 success, 1 domain error, 2 usage error, 3 numerical failure.\n"
      "Each subcommand prints a one-line JSON summary on stdout; see its --help.");

  std::deque<Command> commands;  // options bind to name_override, so no reallocation
  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& desc, const std::string& output,
                 std::function<int(Context&)> body) -> CLI::App* {
    CLI::App* c = parent->add_subcommand(name, desc);
    c->set_version_flag("--version", MULTIREN_VERSION);
    c->footer("Output: " + output);
    commands.push_back({c, std::move(body), name, ""});
    c->add_option("--name", commands.back().name_override, "file name prefix for outputs (default: " + name + ")");
    return c;
  };

  // ---- mcd ----
  CLI::App* mcd = app.add_subcommand("mcd", "marked combinatorial data");
  mcd->require_subcommand(1);
  mcd->set_version_flag("--version", MULTIREN_VERSION);
  mcd->footer("Types are given as builtin:NAME (" + [] {
    std::string s;
    for (const auto& n : builtin_names()) s += (s.empty() ? "" : ", ") + n;
    return s;
  }() + ") or as a JSON file {\"elements\", \"chains\", \"critical\", \"pi\", \"marked\"}.");

  std::string mcd_in;
  {
    auto* c = sub(mcd, "validate", "check every m.c.d. invariant",
                  "stdout {\"valid\": true, elements, chains, critical, pi, marked, transitive, essential}; "
                  "an invalid file exits 1 with the violated invariant on stderr.",
                  [&](Context& ctx) {
                    json j = mcd_summary(load_type(mcd_in));
                    j["valid"] = true;
                    ctx.summary(j);
                    return kOk;
                  });
    c->add_option("--in", mcd_in, "type")->required();
  }
  std::string outer, inner, product_out;
  {
    auto* c = sub(mcd, "product", "star product inner * outer (outer is the first renormalization type)",
                  "writes the product m.c.d. to --out (default <out-dir>/product.json); stdout is its summary.",
                  [&](Context& ctx) {
                    const Mcd p = star_product(load_type(outer), load_type(inner));
                    const fs::path target = product_out.empty() ? ctx.file(".json") : fs::path(product_out);
                    io::write_json(target, io::mcd_to_json(p));
                    json j = mcd_summary(p);
                    j["file"] = target.string();
                    ctx.summary(j);
                    return kOk;
                  });
    c->add_option("--outer", outer, "outer type")->required();
    c->add_option("--inner", inner, "inner type")->required();
    c->add_option("--out", product_out, "output file");
  }
  int adm_n = 1;
  {
    auto* c = sub(mcd, "admissible", "chains and critical elements both number n", "stdout {\"admissible\": bool}.",
                  [&](Context& ctx) {
                    ctx.summary({{"admissible", is_admissible(load_type(mcd_in), adm_n)}});
                    return kOk;
                  });
    c->add_option("--in", mcd_in, "type")->required();
    c->add_option("--n", adm_n, "number of factors")->required()->check(CLI::Range(1, 64));
  }
  {
    auto* c = sub(mcd, "primitive", "search for a nontrivial star factorization",
                  "stdout {\"primitive\": bool, \"factorization\": {\"outer\", \"inner\"} | null}.",
                  [&](Context& ctx) {
                    const auto f = find_factorization(load_type(mcd_in));
                    json j{{"primitive", !f.has_value()}, {"factorization", nullptr}};
                    if (f) j["factorization"] = {{"outer", io::mcd_to_json(f->first)}, {"inner", io::mcd_to_json(f->second)}};
                    ctx.summary(j);
                    return kOk;
                  });
    c->add_option("--in", mcd_in, "type")->required();
  }
  int element = 0, it_len = 0;
  {
    auto* c = sub(mcd, "itinerary", "itinerary of an element under pi",
                  "stdout {\"element\": x, \"itinerary\": word over L, C, R}.", [&](Context& ctx) {
                    const Mcd s = load_type(mcd_in);
                    if (element < 0 || element >= s.size()) throw std::invalid_argument("element out of range");
                    const int len = it_len > 0 ? it_len : s.size();
                    ctx.summary({{"element", element}, {"itinerary", element_itinerary(s, element, len).str()}});
                    return kOk;
                  });
    c->add_option("--in", mcd_in, "type")->required();
    c->add_option("--element", element, "element index")->required();
    c->add_option("--len", it_len, "word length (default: number of elements)")->check(CLI::Range(0, 1000000));
  }

  // ---- realization ----
  SolverOpts solver;
  std::vector<std::string> types;
  auto solve_and_write = [&](Context& ctx, const MultimodalMap& f, const SolverReport* rep) {
    io::write_json(ctx.file(".map.json"), io::map_to_json(f));
    json j{{"params", f.params()}, {"map", ctx.file(".map.json").string()}};
    if (rep) {
      io::write_json(ctx.file(".report.json"), io::report_to_json(*rep, solver.trace));
      j["residual"] = rep->residual;
      j["report"] = ctx.file(".report.json").string();
    }
    ctx.summary(j);
  };
  {
    auto* c = sub(&app, "realize", "critically finite map of a given type",
                  "<name>.map.json, <name>.report.json (params, fixed_point, residual, iterations, seed_index, "
                  "clamped, optional trace); stdout {\"params\", \"residual\", \"map\", \"report\"}.",
                  [&](Context& ctx) {
                    const Mcd s = load_type(types.at(0));
                    // the solve is repeated by realize(); reuse it for the report
                    const SolverReport rep = solve_fixed_point(s, solver.cfg);
                    const MultimodalMap f = realize(s, solver.cfg);
                    solve_and_write(ctx, f, &rep);
                    return kOk;
                  });
    c->add_option("--type", types, "type (builtin:NAME or file)")->required()->expected(1);
    solver.add(c);
  }
  int repeat = 1;
  {
    auto* c = sub(&app, "realize-seq", "realize sigma_k * ... * sigma_1 and check its tower",
                  "<name>.map.json; stdout {\"params\", \"map\", \"periods\"}.", [&](Context& ctx) {
                    std::vector<Mcd> fs;
                    for (int r = 0; r < repeat; ++r)
                      for (const auto& t : types) fs.push_back(load_type(t));
                    const MultimodalMap f = realize_sequence(fs, solver.cfg);
                    io::write_json(ctx.file(".map.json"), io::map_to_json(f));
                    std::vector<long> periods;
                    long N = 1;
                    for (const auto& s : fs) periods.push_back(N *= s.size() / s.chain_count());
                    ctx.summary({{"params", f.params()}, {"map", ctx.file(".map.json").string()}, {"periods", periods}});
                    return kOk;
                  });
    c->add_option("--type", types, "factor types, sigma_1 first (repeatable)")->required();
    c->add_option("--repeat", repeat, "repeat the factor list")->check(CLI::Range(1, 64))->capture_default_str();
    solver.add(c);
  }
  {
    auto* c = sub(&app, "estimate-inf", "parameters realizing the prefixes and their extrapolated limit",
                  "<name>.json {params, differences, ratios, limit_estimate}, <name>.map.json (the limit); "
                  "stdout {\"limit_estimate\", \"ratios\"}.",
                  [&](Context& ctx) {
                    std::vector<Mcd> fs;
                    for (int r = 0; r < repeat; ++r)
                      for (const auto& t : types) fs.push_back(load_type(t));
                    const auto est = estimate_infinite(fs, solver.cfg);
                    io::write_json(ctx.file(".json"), {{"params", est.params},
                                                       {"differences", est.differences},
                                                       {"ratios", est.ratios},
                                                       {"limit_estimate", est.limit_estimate}});
                    io::write_json(ctx.file(".map.json"), io::map_to_json(MultimodalMap(est.limit_estimate)));
                    ctx.summary({{"limit_estimate", est.limit_estimate}, {"ratios", est.ratios}});
                    return kOk;
                  });
    c->add_option("--type", types, "prefix types, sigma_1 first (repeatable)")->required();
    c->add_option("--repeat", repeat, "repeat the type list, e.g. --type builtin:doubling --repeat 10")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    solver.add(c);
  }

  // ---- renormalization ----
  MapInput map_in;
  int depth = 1;
  int max_period = 16;
  {
    auto* c = sub(&app, "renormalize", "detect one restrictive interval",
                  "<name>.json {period, period_ext, P, ell, boundary_points, boundary_residual, "
                  "boundary_multiplier, sigma, rejected}; stdout {\"period\", \"P\", \"sigma\"}; exit 1 when "
                  "no period up to --max-period works.",
                  [&](Context& ctx) {
                    const MultimodalMap f = map_in.load();
                    DetectOptions opt;
                    opt.max_real_period = max_period;
                    const auto r = detect_with_witnesses(BaseMap(f), opt);
                    if (!r.result) {
                      json rej = json::array();
                      for (const auto& x : r.rejected) rej.push_back({{"period", x.period_real}, {"reason", x.reason}});
                      io::write_json(ctx.file(".json"), {{"renormalizable", false}, {"rejected", rej}});
                      ctx.err << "not renormalizable with real period <= " << max_period << "\n";
                      return kDomain;
                    }
                    json j = io::renorm_to_json(*r.result);
                    io::write_json(ctx.file(".json"), j);
                    ctx.summary({{"period", r.result->period_real}, {"P", j["P"]}, {"sigma", j["sigma"]}});
                    return kOk;
                  });
    map_in.add(c);
    c->add_option("--max-period", max_period, "largest real period tried")->check(CLI::Range(2, 4096))->capture_default_str();
  }
  {
    auto* c = sub(&app, "tower", "successive renormalizations",
                  "<name>.json {complete, depth, levels: [{level, period, cumulative_period, P, sigma, "
                  "boundary_residual, ...}], failure}, <name>.decay.csv (k, ratio); stdout {\"complete\", "
                  "\"depth\", \"periods\"}; exit 1 when the requested depth is not reached.",
                  [&](Context& ctx) {
                    const MultimodalMap f = map_in.load();
                    const Tower t = tower(f, depth, max_period);
                    io::write_json(ctx.file(".json"), io::tower_to_json(t));
                    if (t.levels.size() >= 2) io::write_atomic(ctx.file(".decay.csv"), io::decay_csv(interval_decay(t)));
                    ctx.summary({{"complete", t.complete}, {"depth", t.levels.size()}, {"periods", t.cumulative_periods()}});
                    if (!t.complete) {
                      ctx.err << "renormalization fails at level " << t.failed_depth << ": " << t.failure << "\n";
                      return kDomain;
                    }
                    return kOk;
                  });
    map_in.add(c);
    c->add_option("--depth", depth, "levels requested")->check(CLI::Range(1, 16))->capture_default_str();
    c->add_option("--max-period", max_period, "largest real period tried per level")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
  }
  int geo_level = 0;
  {
    auto* c = sub(&app, "geometry", "ratio statistics of level k and k+1 orbit intervals",
                  "<name>.json {level, intervals, families: [{family, count, min, median, max}], per_copy}; "
                  "stdout the same object.",
                  [&](Context& ctx) {
                    const MultimodalMap f = map_in.load();
                    const Tower t = tower(f, geo_level + 1, max_period);
                    if (!t.complete)
                      throw NotRenormalizableError("level " + std::to_string(t.failed_depth) + ": " + t.failure);
                    const json j = io::geometry_to_json(geometry_report(f, t, geo_level));
                    io::write_json(ctx.file(".json"), j);
                    ctx.summary(j);
                    return kOk;
                  });
    map_in.add(c);
    c->add_option("--level", geo_level, "level k")->check(CLI::Range(0, 15))->capture_default_str();
    c->add_option("--max-period", max_period, "largest real period tried per level")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
  }
  int orbit_len = 16, orbit_copy = 1;
  double orbit_x = 0.0;
  {
    auto* c = sub(&app, "orbit", "extended-map orbit dump",
                  "<name>.csv (step, copy, x, letter); stdout {\"file\"}.", [&](Context& ctx) {
                    const MultimodalMap f = map_in.load();
                    if (orbit_copy < 1 || orbit_copy > f.n()) throw std::invalid_argument("copy out of range");
                    io::write_atomic(ctx.file(".csv"), io::orbit_csv(f, {orbit_copy, orbit_x}, orbit_len));
                    ctx.summary({{"file", ctx.file(".csv").string()}});
                    return kOk;
                  });
    map_in.add(c);
    c->add_option("--len", orbit_len, "points, the start included")->check(CLI::Range(0, 10000000))->capture_default_str();
    c->add_option("--copy", orbit_copy, "starting copy")->capture_default_str();
    c->add_option("--x", orbit_x, "starting point")->check(CLI::Range(-1.0, 1.0))->capture_default_str();
  }

  // ---- experiments ----
  LimitInput limit_in;
  int grid = 512, burn_in = 1, exp_depth = 6;
  {
    auto* c = sub(&app, "converge", "distances between successive renormalizations and their rate",
                  "<name>.csv (k, d_k), <name>.fit.json {alpha, slope, intercept, r2, burn_in, points, "
                  "converging}; stdout {\"d\", \"alpha\", \"r2\"}.",
                  [&](Context& ctx) {
                    const auto s = successive_distance(limit_in.load(), exp_depth, grid, {}, threads);
                    io::write_atomic(ctx.file(".csv"), io::distance_csv(s));
                    const auto fit = fit_rate(s, burn_in);
                    io::write_json(ctx.file(".fit.json"), io::fit_to_json(fit));
                    ctx.summary({{"d", s.d}, {"alpha", fit.alpha}, {"r2", fit.r2}});
                    return kOk;
                  });
    limit_in.add(c);
    c->add_option("--depth", exp_depth, "last k measured")->check(CLI::Range(1, 14))->capture_default_str();
    c->add_option("--grid", grid, "sample points on I")->check(CLI::Range(2, 10000000))->capture_default_str();
    c->add_option("--burn-in", burn_in, "levels left out of the fit")->check(CLI::Range(0, 14))->capture_default_str();
  }
  {
    auto* c = sub(&app, "cascade", "superstable parameters of sigma, sigma*sigma, ...",
                  "<name>.csv (k, a_k, ratio) with ratio (a_k - a_{k-1}) / (a_{k+1} - a_k); stdout {\"params\", "
                  "\"ratios\"}.",
                  [&](Context& ctx) {
                    const auto c = superstable_cascade(load_type(types.at(0)), exp_depth, solver.cfg);
                    io::write_atomic(ctx.file(".csv"), io::cascade_csv(c));
                    ctx.summary({{"params", c.params}, {"ratios", c.ratios}});
                    return kOk;
                  });
    c->add_option("--type", types, "type")->required()->expected(1);
    c->add_option("--depth", exp_depth, "cascade length")->check(CLI::Range(1, 14))->capture_default_str();
    solver.add(c);
  }
  {
    auto* c = sub(&app, "decay", "|P^{k+1}| / |P^k| along a tower",
                  "<name>.csv (k, ratio) for k = 1..depth-1; stdout {\"ratios\"}.", [&](Context& ctx) {
                    const Tower t = tower(limit_in.load(), exp_depth, max_period);
                    if (!t.complete)
                      throw NotRenormalizableError("level " + std::to_string(t.failed_depth) + ": " + t.failure);
                    const auto r = interval_decay(t);
                    io::write_atomic(ctx.file(".csv"), io::decay_csv(r));
                    ctx.summary({{"ratios", r}});
                    return kOk;
                  });
    limit_in.add(c);
    c->add_option("--depth", exp_depth, "tower depth")->check(CLI::Range(2, 14))->capture_default_str();
    c->add_option("--max-period", max_period, "largest real period tried per level")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
  }

  // ---- complex side ----
  std::string a_text, coeff_text, coeff_file, window_text, size_text = "400x400";
  int n_given = 0;
  long cap = 10000;
  int vary = 1;
  auto load_poly = [&]() {
    TypeNPoly p{io::parse_complex_list(a_text)};
    if (p.a.empty()) throw std::invalid_argument("--a needs at least one parameter");
    if (n_given > 0 && n_given != p.n())
      throw std::invalid_argument("--n is " + std::to_string(n_given) + " but --a has " + std::to_string(p.n()) + " values");
    return p;
  };
  auto load_coeffs = [&]() {
    CoeffPoly q;
    if (!coeff_file.empty()) {
      std::ifstream in(coeff_file);
      if (!in) throw std::invalid_argument("cannot open " + coeff_file);
      std::string line;
      std::map<int, cplx> by_power;
      std::getline(in, line);  // header
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto v = parse_reals(line);
        if (v.size() != 3) throw std::invalid_argument("coefficient rows are power,re,im");
        by_power[static_cast<int>(v[0])] = {v[1], v[2]};
      }
      if (by_power.empty()) throw std::invalid_argument("no coefficients in " + coeff_file);
      const int deg = by_power.rbegin()->first;
      for (int k = deg; k >= 0; --k) q.coeffs.push_back(by_power.count(k) ? by_power[k] : cplx{});
    } else {
      q.coeffs = io::parse_complex_list(coeff_text);
    }
    if (q.coeffs.empty()) throw std::invalid_argument("one of --coeffs or --in is required");
    return q;
  };
  auto add_coeff_input = [&](CLI::App* c) {
    auto* a = c->add_option("--coeffs", coeff_text, "coefficients, leading first, e.g. \"1 0 2 0 1\"");
    auto* b = c->add_option("--in", coeff_file, "CSV (power, re, im) as written by compose")->check(CLI::ExistingFile);
    a->excludes(b);
  };
  auto add_a = [&](CLI::App* c, bool required) {
    auto* o = c->add_option("--a", a_text, "parameters a_1 ... a_n of z^2 + a_i, e.g. \"-1+0.2i 0.3\"");
    if (required) o->required();
    c->add_option("--n", n_given, "number of factors (checked against --a)")->check(CLI::Range(1, 12));
  };
  {
    auto* c = sub(&app, "compose", "coefficients of P_{a_n} o ... o P_{a_1}",
                  "<name>.csv (power, re, im); stdout {\"coefficients\": [[re, im], ...]} leading first.",
                  [&](Context& ctx) {
                    const auto q = compose_coeffs(load_poly());
                    io::Csv csv({"power", "re", "im"});
                    json co = json::array();
                    for (std::size_t i = 0; i < q.coeffs.size(); ++i) {
                      csv.row({std::to_string(q.degree() - static_cast<int>(i)), io::fmt(q.coeffs[i].real()),
                               io::fmt(q.coeffs[i].imag())});
                      co.push_back({q.coeffs[i].real(), q.coeffs[i].imag()});
                    }
                    io::write_atomic(ctx.file(".csv"), csv.str());
                    ctx.summary({{"coefficients", co}});
                    return kOk;
                  });
    add_a(c, true);
  }
  {
    auto* c = sub(&app, "decompose", "recover a_1 ... a_n from a monic polynomial of degree 2^n",
                  "<name>.json {decomposable, a: [[re, im], ...]}; stdout the same; exit 1 when the polynomial "
                  "is not a composition of quadratics.",
                  [&](Context& ctx) {
                    const auto d = decompose_coeffs(load_coeffs());
                    json j{{"decomposable", d.has_value()}, {"a", json::array()}};
                    if (d)
                      for (const auto& a : d->a) j["a"].push_back({a.real(), a.imag()});
                    io::write_json(ctx.file(".json"), j);
                    ctx.summary(j);
                    if (!d) {
                      ctx.err << "not a composition of quadratic polynomials\n";
                      return kDomain;
                    }
                    return kOk;
                  });
    add_coeff_input(c);
  }
  {
    auto* c = sub(&app, "bn-test", "membership in B_n",
                  "<name>.json {in_bn, verdict, detail, critical_points, critical_values, distinguished, "
                  "partition}; stdout {\"in_bn\", \"verdict\"} with verdict in_Bn, fails(nd), fails(value_count) or fails(partition).",
                  [&](Context& ctx) {
                    const auto v = bn_test(load_coeffs());
                    io::write_json(ctx.file(".json"), io::bn_to_json(v));
                    ctx.summary({{"in_bn", v.in_bn()}, {"verdict", to_string(v.failure)}});
                    return kOk;
                  });
    add_coeff_input(c);
  }
  {
    auto* c = sub(&app, "connect", "escape test of the critical orbits, at one parameter or over a grid",
                  "one parameter: <name>.json and stdout {verdict, step, copy}. With --window: <name>.csv "
                  "(re(a), im(a), verdict, step) sweeping a_vary over the window on an inclusive WxH lattice, "
                  "stdout {\"connected\", \"disconnected\", \"undecided\"}.",
                  [&](Context& ctx) {
                    TypeNPoly p = load_poly();
                    if (window_text.empty()) {
                      const json j = io::verdict_to_json(is_connected(p, cap));
                      io::write_json(ctx.file(".json"), j);
                      ctx.summary(j);
                      return kOk;
                    }
                    if (vary < 1 || vary > p.n()) throw std::invalid_argument("--vary out of range");
                    const Window w = parse_window(window_text);
                    const auto [W, H] = parse_size(size_text);
                    std::vector<TypeNPoly> ps;
                    for (int y = 0; y < H; ++y)
                      for (int x = 0; x < W; ++x) {
                        const double re = W > 1 ? w.re_min + (w.re_max - w.re_min) * x / (W - 1) : w.re_min;
                        const double im = H > 1 ? w.im_min + (w.im_max - w.im_min) * y / (H - 1) : w.im_min;
                        TypeNPoly q = p;
                        q.a[static_cast<std::size_t>(vary - 1)] = {re, im};
                        ps.push_back(std::move(q));
                      }
                    const auto verdicts = connectivity_grid(ps, cap, threads);
                    io::Csv csv({"re", "im", "verdict", "step"});
                    std::map<std::string, long> counts{{"connected", 0}, {"disconnected", 0}, {"undecided", 0}};
                    for (std::size_t i = 0; i < ps.size(); ++i) {
                      const cplx a = ps[i].a[static_cast<std::size_t>(vary - 1)];
                      const std::string v = to_string(verdicts[i].kind);
                      ++counts[v];
                      csv.row({io::fmt(a.real()), io::fmt(a.imag()), v, std::to_string(verdicts[i].step)});
                    }
                    io::write_atomic(ctx.file(".csv"), csv.str());
                    ctx.summary(json(counts));
                    return kOk;
                  });
    add_a(c, true);
    c->add_option("--cap", cap, "turns of the factor cycle")->check(CLI::Range(1L, 100000000L))->capture_default_str();
    c->add_option("--window", window_text, "re_min,im_min,re_max,im_max for the swept parameter");
    c->add_option("--size", size_text, "lattice WIDTHxHEIGHT")->capture_default_str();
    c->add_option("--vary", vary, "which a_i the window sweeps")->capture_default_str();
  }
  long julia_cap = 500;
  {
    auto* c = sub(&app, "julia", "filled Julia set raster",
                  "<name>.pgm (P5, 8-bit: 0 bounded, 1..255 escape step scaled linearly), <name>.json {width, "
                  "height, window, cap, n, params, gray}; stdout {\"pgm\", \"metadata\", \"bounded_pixels\"}.",
                  [&](Context& ctx) {
                    const TypeNPoly p = load_poly();
                    const Window w = window_text.empty() ? Window{} : parse_window(window_text);
                    const auto [W, H] = parse_size(size_text);
                    const Raster r = render_filled_julia(p, w, W, H, julia_cap, threads);
                    io::write_atomic(ctx.file(".pgm"), io::pgm_bytes(r));
                    io::write_json(ctx.file(".json"), io::raster_metadata(r, p));
                    ctx.summary({{"pgm", ctx.file(".pgm").string()},
                                 {"metadata", ctx.file(".json").string()},
                                 {"bounded_pixels", std::count(r.values.begin(), r.values.end(), 0)}});
                    return kOk;
                  });
    add_a(c, true);
    c->add_option("--window", window_text, "re_min,im_min,re_max,im_max (default -2,-2,2,2)");
    c->add_option("--size", size_text, "raster WIDTHxHEIGHT")->capture_default_str();
    c->add_option("--cap", julia_cap, "iterations of p")->check(CLI::Range(1L, 100000000L))->capture_default_str();
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  if (threads > 0) set_default_threads(threads);
  for (auto& c : commands) {
    if (!c.app->parsed()) continue;
    Context ctx{out, err, io::output_dir(out_dir), c.name_override.empty() ? c.default_name : c.name_override};
    try {
      return c.body(ctx);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return e.numeric() ? kNumeric : kDomain;
    } catch (const std::invalid_argument& e) {
      err << "usage: " << e.what() << "\n";
      return kUsage;
    } catch (const std::out_of_range& e) {
      err << "usage: " << e.what() << "\n";
      return kUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kDomain;
    }
  }
  err << "no subcommand\n";
  return kUsage;
}

}  // namespace multiren::cli
