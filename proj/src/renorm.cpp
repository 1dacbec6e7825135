#include "multiren/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "multiren/errors.hpp"

namespace multiren {

double TypeNMap::eval(double x) const {
  for (int c = 1; c <= n(); ++c) x = factor(c, x);
  return x;
}

double TypeNMap::derivative(double x) const {
  double d = 1.0;
  for (int c = 1; c <= n(); ++c) {
    const auto [v, dv] = factor_jet(c, x);
    d *= dv;
    x = v;
  }
  return d;
}

Interval TypeNMap::image(int copy, Interval J) const {
  const double u = factor(copy, J.lo);
  const double v = factor(copy, J.hi);
  Interval out{std::min(u, v), std::max(u, v)};
  if (J.lo <= kCriticalTol && J.hi >= -kCriticalTol) out.hi = std::max(out.hi, factor(copy, 0.0));
  return out;
}

std::pair<double, double> BaseMap::factor_jet(int copy, double x) const {
  const double a = f_.param(copy);
  return {eval_unimodal(a, x), deriv_unimodal(a, x)};
}

std::pair<double, double> RenormalizedMap::level_jet(int level, int copy, double x) const {
  if (level == 0) {
    const double a = base_.param(copy);
    return {eval_unimodal(a, x), deriv_unimodal(a, x)};
  }
  const RenormResult& r = stack_[static_cast<std::size_t>(level - 1)];
  const int n = r.n;
  const int j = copy - 1;
  const double scale_in = -r.p[static_cast<std::size_t>(j)];
  double y = scale_in * x;
  double dy = scale_in;
  const int start = r.ell[static_cast<std::size_t>(j)];
  const int stop = j + 1 < n ? r.ell[static_cast<std::size_t>(j + 1)] : r.period_ext;
  int c = start % n + 1;
  for (int t = start; t < stop; ++t) {
    const auto [v, d] = level_jet(level - 1, c, y);
    dy *= d;
    y = v;
    c = c % n + 1;
  }
  const double p_out = r.p[static_cast<std::size_t>((j + 1) % n)];
  double out = -y / p_out;
  if (std::abs(out) > 1.0 && std::abs(out) <= 1.0 + 1e-9) out = std::clamp(out, -1.0, 1.0);
  return {out, -dy / p_out};
}

std::pair<double, double> RenormalizedMap::factor_jet(int copy, double x) const {
  return level_jet(depth(), copy, x);
}

long RenormalizedMap::cumulative_period() const {
  long N = 1;
  for (const auto& r : stack_) N *= r.period_real;
  return N;
}

namespace {

std::vector<Interval> interval_orbit(const TypeNMap& g, double s, int k) {
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(k) + 1);
  Interval J{-s, s};
  int copy = 1;
  out.push_back(J);
  for (int i = 0; i < k; ++i) {
    J = g.image(copy, J);
    copy = copy % g.n() + 1;
    out.push_back(J);
  }
  return out;
}

bool disjoint_interiors(const std::vector<Interval>& orb, int k, int n, double tol) {
  for (int i = 0; i < k; ++i)
    for (int j = i + n; j < k; j += n) {
      const auto& A = orb[static_cast<std::size_t>(i)];
      const auto& B = orb[static_cast<std::size_t>(j)];
      if (std::min(A.hi, B.hi) - std::max(A.lo, B.lo) > tol) return false;
    }
  return true;
}

// At a superstable parameter with n >= 2 the critical points share one
// cycle, so (0, j) is an endpoint of F^{ell_j}(P); allow the usual slack.
bool covers_critical(const Interval& J) { return J.lo <= kCriticalTol && J.hi >= -kCriticalTol; }

bool covers_each_critical_once(const std::vector<Interval>& orb, int k, int n) {
  std::vector<int> hits(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < k; ++i)
    if (covers_critical(orb[static_cast<std::size_t>(i)])) hits[static_cast<std::size_t>(i % n)]++;
  return std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; });
}

bool invariant(const std::vector<Interval>& orb, int k, double s) {
  const auto& last = orb[static_cast<std::size_t>(k)];
  return last.lo >= -s - 1e-12 && last.hi <= s + 1e-12;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

Mcd type_of_orbit(const std::vector<Interval>& orbit, const std::vector<int>& ell, int n) {
  const int k = static_cast<int>(orbit.size());
  McdFields raw;
  raw.elements = k;
  for (int i = 0; i < k; ++i) raw.pi.push_back((i + 1) % k);
  for (int c = 0; c < n; ++c) {
    std::vector<int> chain;
    for (int i = c; i < k; i += n) chain.push_back(i);
    std::sort(chain.begin(), chain.end(), [&](int a, int b) {
      return orbit[static_cast<std::size_t>(a)].mid() < orbit[static_cast<std::size_t>(b)].mid();
    });
    raw.chains.push_back(std::move(chain));
  }
  raw.critical = ell;
  raw.marked = 0;
  return Mcd::validate(std::move(raw));
}

// One candidate period; returns the reason for rejection or the result.
std::optional<RenormResult> try_period(const TypeNMap& g, int N, const DetectOptions& opt, std::string& why) {
  const int n = g.n();
  const int k = N * n;
  auto D = [&](double s) { return disjoint_interiors(interval_orbit(g, s, k), k, n, opt.overlap_tol); };
  auto HC = [&](double s) {
    const auto orb = interval_orbit(g, s, k);
    return invariant(orb, k, s) && covers_each_critical_once(orb, k, n);
  };

  const double s_min = 1e-10;
  if (!D(s_min)) {
    why = "orbit intervals overlap already for tiny intervals";
    return std::nullopt;
  }
  double s_D = 1.0;
  if (!D(1.0)) {
    double lo = s_min;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (D(mid) ? lo : hi) = mid;
    }
    s_D = lo;
  }

  int found = 0;
  for (int t = opt.grid; t >= 1; --t)
    if (HC(s_D * t / opt.grid)) {
      found = t;
      break;
    }
  if (found == 0) {
    why = "no symmetric interval is invariant with every critical point covered once";
    return std::nullopt;
  }
  double q = s_D * found / opt.grid;
  if (found < opt.grid) {
    double lo = q;
    double hi = s_D * (found + 1) / opt.grid;
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
      const double mid = 0.5 * (lo + hi);
      (HC(mid) ? lo : hi) = mid;
    }
    q = lo;
  }

  ExtPoint b{1, q};
  for (int i = 0; i < k; ++i) b = g.step(b);
  const double r_plus = std::abs(b.x - q);
  const double r_minus = std::abs(b.x + q);
  const double residual = std::min(r_plus, r_minus);
  if (residual > opt.boundary_tol) {
    why = "boundary point q = " + fmt(q) + " is not periodic (residual " + fmt(residual) + ")";
    return std::nullopt;
  }

  RenormResult r;
  r.n = n;
  r.period_real = N;
  r.period_ext = k;
  r.q = q;
  r.P = Interval{-q, q};
  r.boundary_residual = residual;

  const double p1 = r_plus <= r_minus ? q : -q;
  {
    double x = p1;
    double d = 1.0;
    int copy = 1;
    for (int i = 0; i < k; ++i) {
      const auto [v, dv] = g.factor_jet(copy, x);
      d *= dv;
      x = v;
      copy = copy % n + 1;
    }
    r.boundary_multiplier = d;
    if (std::abs(std::abs(d) - 1.0) <= opt.parabolic_tol)
      throw PrecisionError("boundary periodic point of period " + std::to_string(N) +
                           " is parabolic (multiplier " + fmt(d) + ")");
    if (std::abs(d) < 1.0) {
      why = "boundary periodic point is attracting (multiplier " + fmt(d) + ")";
      return std::nullopt;
    }
  }

  auto orb = interval_orbit(g, q, k);
  orb.pop_back();
  for (int i = 0; i < k; ++i)
    if (covers_critical(orb[static_cast<std::size_t>(i)])) r.ell.push_back(i);
  if (static_cast<int>(r.ell.size()) != n || r.ell.front() != 0) {
    why = "critical points are not met once each";
    return std::nullopt;
  }
  {
    ExtPoint x{1, p1};
    int t = 0;
    for (int e : r.ell) {
      while (t < e) {
        x = g.step(x);
        ++t;
      }
      r.p.push_back(t == 0 ? p1 : x.x);
      const auto& J = orb[static_cast<std::size_t>(e)];
      r.clipped.push_back(std::max(std::abs(J.lo), std::abs(J.hi)) > std::abs(r.p.back()) + 1e-9 ? 1 : 0);
    }
  }
  r.orbit = orb;
  try {
    r.sigma = type_of_orbit(orb, r.ell, n);
  } catch (const Error& e) {
    why = std::string("orbit order is not an m.c.d.: ") + e.what();
    return std::nullopt;
  }
  if (!is_admissible(r.sigma, n)) {
    why = "combinatorial type is not admissible";
    return std::nullopt;
  }
  return r;
}

}  // namespace

DetectOutcome detect_with_witnesses(const TypeNMap& g, const DetectOptions& opt) {
  if (opt.max_real_period < 2) throw std::invalid_argument("maximal real period must be at least 2");
  DetectOutcome out;
  for (int N = 2; N <= opt.max_real_period; ++N) {
    std::string why;
    auto r = try_period(g, N, opt, why);
    if (r) {
      r->rejected = out.rejected;
      out.result = std::move(r);
      return out;
    }
    out.rejected.push_back({N, why});
  }
  return out;
}

std::optional<RenormResult> detect_renormalization(const TypeNMap& g, const DetectOptions& opt) {
  return detect_with_witnesses(g, opt).result;
}

std::optional<RenormResult> detect_renormalization(const TypeNMap& g, int max_real_period) {
  DetectOptions opt;
  opt.max_real_period = max_real_period;
  return detect_renormalization(g, opt);
}

Mcd comb_type(const RenormResult& r) { return type_of_orbit(r.orbit, r.ell, r.n); }

void renormalize(RenormalizedMap& g, const DetectOptions& opt) {
  auto r = detect_renormalization(g, opt);
  if (!r)
    throw NotRenormalizableError("no restrictive interval of real period 2.." +
                                 std::to_string(opt.max_real_period) + " at depth " +
                                 std::to_string(g.depth() + 1));
  g.push(std::move(*r));
}

std::vector<long> Tower::cumulative_periods() const {
  std::vector<long> out;
  long N = 1;
  for (const auto& r : levels) {
    N *= r.period_real;
    out.push_back(N);
  }
  return out;
}

Tower tower(const MultimodalMap& f, int depth, const DetectOptions& opt) {
  Tower t;
  RenormalizedMap g(f);
  for (int d = 1; d <= depth; ++d) {
    try {
      renormalize(g, opt);
    } catch (const NotRenormalizableError& e) {
      t.failed_depth = d;
      t.failure = e.what();
      t.levels = g.stack();
      return t;
    }
  }
  t.levels = g.stack();
  t.complete = true;
  return t;
}

Tower tower(const MultimodalMap& f, int depth, int max_real_period) {
  DetectOptions opt;
  opt.max_real_period = max_real_period;
  return tower(f, depth, opt);
}

std::vector<double> period_ratios(const Tower& t) {
  std::vector<double> out;
  for (const auto& r : t.levels) out.push_back(static_cast<double>(r.period_real));
  return out;
}

bool is_C_bounded(const Tower& t, double C) {
  if (t.levels.size() < 2) throw std::invalid_argument("C-boundedness needs a tower of depth at least 2");
  const auto ratios = period_ratios(t);
  return std::all_of(ratios.begin(), ratios.end(), [&](double r) { return r <= C; });
}

std::vector<double> level_half_widths(const Tower& t) {
  std::vector<double> out{1.0};
  for (const auto& r : t.levels) out.push_back(out.back() * r.q);
  return out;
}

std::vector<double> interval_decay(const Tower& t) {
  if (t.levels.size() < 2) throw std::invalid_argument("interval decay needs a tower of depth at least 2");
  const auto w = level_half_widths(t);
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) out.push_back(w[i + 1] / w[i]);
  return out;
}

std::vector<Interval> level_orbit(const MultimodalMap& f, const Tower& t, int k) {
  const int n = f.n();
  if (k == 0) return std::vector<Interval>(static_cast<std::size_t>(n), Interval{-1.0, 1.0});
  if (k > static_cast<int>(t.levels.size())) throw std::invalid_argument("tower is shallower than the requested level");
  const double Q = level_half_widths(t)[static_cast<std::size_t>(k)];
  const long K = t.cumulative_periods()[static_cast<std::size_t>(k - 1)] * n;
  std::vector<Interval> out;
  out.reserve(static_cast<std::size_t>(K));
  Interval J{-Q, Q};
  for (long i = 0; i < K; ++i) {
    out.push_back(J);
    J = image_interval(f.param(static_cast<int>(i % n) + 1), J);
  }
  return out;
}

namespace {

RatioStats stats(std::string family, std::vector<double> v) {
  RatioStats s;
  s.family = std::move(family);
  s.count = static_cast<int>(v.size());
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  const std::size_t m = v.size() / 2;
  s.median = v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
  return s;
}

}  // namespace

GeometryReport geometry_report(const MultimodalMap& f, const Tower& t, int k) {
  const int n = f.n();
  const int depth = static_cast<int>(t.levels.size());
  if (k < 0 || (k > 0 && depth < k + 1)) throw std::invalid_argument("geometry at level k needs depth k + 1");
  GeometryReport rep;
  rep.level = k;
  const auto parents = level_orbit(f, t, k);
  rep.intervals = static_cast<int>(parents.size());
  std::vector<Interval> children;
  if (depth >= k + 1) children = level_orbit(f, t, k + 1);

  const std::size_t K = parents.size();
  auto collect = [&](int only_copy) {
    std::vector<double> lengths;
    std::vector<double> boundary;
    std::vector<double> gaps;
    for (std::size_t i = 0; i < children.size(); ++i) {
      const std::size_t pi = i % K;
      if (only_copy >= 0 && static_cast<int>(pi % static_cast<std::size_t>(n)) != only_copy) continue;
      const Interval& P = parents[pi];
      const Interval& C = children[i];
      lengths.push_back(C.width() / P.width());
      // a side where child and parent end at the same orbit point of 0 is
      // not a distance to the boundary
      const double tol = 1e-9 * P.width();
      const double left = C.lo - P.lo;
      const double right = P.hi - C.hi;
      if (left > tol && right > tol)
        boundary.push_back(std::min(left, right) / P.width());
      else if (std::max(left, right) > tol)
        boundary.push_back(std::max(left, right) / P.width());
    }
    for (int c = 0; c < n; ++c) {
      if (only_copy >= 0 && c != only_copy) continue;
      std::vector<Interval> row;
      for (std::size_t i = static_cast<std::size_t>(c); i < K; i += static_cast<std::size_t>(n)) row.push_back(parents[i]);
      std::sort(row.begin(), row.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
      for (std::size_t i = 0; i + 1 < row.size(); ++i) {
        const double w = std::min(row[i].width(), row[i + 1].width());
        const double gap = row[i + 1].lo - row[i].hi;
        // neighbours sharing a boundary periodic point touch; skip them
        if (gap > 1e-9 * w) gaps.push_back(gap / w);
      }
    }
    return std::vector<RatioStats>{stats("successor_length", lengths), stats("boundary_distance", boundary),
                                   stats("gap", gaps)};
  };
  rep.families = collect(-1);
  if (n > 1)
    for (int c = 0; c < n; ++c) rep.per_copy.push_back(collect(c));
  return rep;
}

}  // namespace multiren
