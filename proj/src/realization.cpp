#include "multiren/realization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "multiren/errors.hpp"
#include "multiren/parallel.hpp"
#include "multiren/renorm.hpp"

namespace multiren {

std::vector<int> chain_copies(const Mcd& s) {
  const int n = s.chain_count();
  std::vector<int> copy(static_cast<std::size_t>(n), 0);
  int e = s.marked();
  for (int i = 1; i <= n; ++i) {
    auto& slot = copy[static_cast<std::size_t>(s.chain_of(e))];
    if (slot != 0) throw NotAdmissibleError("pi returns to the marked chain before visiting every chain");
    slot = i;
    e = s.pi(e);
  }
  // pi must carry each chain into the next copy as a whole
  for (int a = 0; a < s.size(); ++a) {
    const int from = copy[static_cast<std::size_t>(s.chain_of(a))];
    const int to = copy[static_cast<std::size_t>(s.chain_of(s.pi(a)))];
    if (to != from % n + 1) throw NotAdmissibleError("pi does not shift the chains cyclically");
  }
  return copy;
}

double boundary_distance(const Mcd& s, const KPoint& x) {
  // on a chain the closest comparable pair is an adjacent one once x is
  // order compatible; fall back to all pairs otherwise
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ch : s.chains())
    for (std::size_t i = 0; i < ch.size(); ++i)
      for (std::size_t j = i + 1; j < ch.size(); ++j)
        best = std::min(best, std::abs(x[static_cast<std::size_t>(ch[i])] - x[static_cast<std::size_t>(ch[j])]));
  return best;
}

namespace {

void check_shape(const Mcd& s, const KPoint& x) {
  if (static_cast<int>(x.size()) != s.size())
    throw std::invalid_argument("point has " + std::to_string(x.size()) + " coordinates, type has " +
                                std::to_string(s.size()) + " elements");
}

bool ordered(const Mcd& s, const KPoint& x, bool strict) {
  check_shape(s, x);
  for (double v : x)
    if (!(v >= -1.0 && v <= 1.0)) return false;
  for (const auto& ch : s.chains())
    for (std::size_t i = 0; i + 1 < ch.size(); ++i) {
      const double u = x[static_cast<std::size_t>(ch[i])];
      const double v = x[static_cast<std::size_t>(ch[i + 1])];
      if (strict ? !(u < v) : !(u <= v)) return false;
    }
  return true;
}

struct Prepared {
  std::vector<int> copy_of_chain;
  std::vector<int> critical_of_copy;  // index copy-1
};

Prepared prepare(const Mcd& s) {
  if (!is_transitive(s)) throw NotTransitiveError("pi is not a single cycle");
  Prepared p;
  p.copy_of_chain = chain_copies(s);
  if (!is_admissible(s, s.chain_count())) throw NotAdmissibleError("type is not admissible");
  p.critical_of_copy.assign(static_cast<std::size_t>(s.chain_count()), -1);
  for (int c : s.critical()) p.critical_of_copy[static_cast<std::size_t>(p.copy_of_chain[static_cast<std::size_t>(s.chain_of(c))] - 1)] = c;
  return p;
}

std::vector<double> params_prepared(const Mcd& s, const Prepared& p, const KPoint& x) {
  std::vector<double> a;
  for (int c : p.critical_of_copy)
    a.push_back(std::clamp((x[static_cast<std::size_t>(s.pi(c))] + 1.0) / 2.0, 0.5, 1.0));
  return a;
}

TStep step_prepared(const Mcd& s, const Prepared& p, const KPoint& x) {
  TStep out;
  out.params = params_prepared(s, p, x);
  out.y.assign(x.size(), 0.0);
  for (int e = 0; e < s.size(); ++e) {
    if (s.is_critical(e)) continue;
    const int copy = p.copy_of_chain[static_cast<std::size_t>(s.chain_of(e))];
    const double a = out.params[static_cast<std::size_t>(copy - 1)];
    const double top = 2.0 * a - 1.0;
    double arg = x[static_cast<std::size_t>(s.pi(e))];
    if (arg > top) {
      arg = top;
      ++out.clamped;
    }
    const Letter side = s.position(e) < s.position(s.critical_of(e)) ? Letter::L : Letter::R;
    out.y[static_cast<std::size_t>(e)] = inverse_branch(a, arg, side);
  }
  return out;
}

double max_diff(const KPoint& a, const KPoint& b) {
  double r = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, std::abs(a[i] - b[i]));
  return r;
}

struct SeedRun {
  bool ok = false;
  KPoint x;
  std::vector<double> params;
  double residual = std::numeric_limits<double>::infinity();
  long iterations = 0;
  int clamped = 0;
  std::vector<DampingEvent> trace;
};

constexpr double kThetaFloor = 1.0 / 64.0;

void newton_polish(const Mcd& s, const Prepared& p, SeedRun& run, const SolverConfig& cfg);

SeedRun run_seed(const Mcd& s, const Prepared& p, KPoint x, const SolverConfig& cfg) {
  SeedRun run;
  double theta = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  int decreases = 0;
  run.trace.push_back({0, theta, 0.0});
  for (long it = 0; it < cfg.max_iter; ++it) {
    TStep t = step_prepared(s, p, x);
    run.clamped += t.clamped;
    const double r = max_diff(t.y, x);
    run.iterations = it + 1;
    if (r < run.residual) {
      run.residual = r;
      run.x = x;
    }
    if (r <= cfg.tol && boundary_distance(s, x) >= cfg.sep) {
      run.ok = true;
      run.x = x;
      run.residual = r;
      break;
    }
    if (cfg.newton_steps > 0 && r <= cfg.polish_below) break;
    if (r > prev && theta > kThetaFloor) {
      theta = std::max(theta / 2.0, kThetaFloor);
      decreases = 0;
      run.trace.push_back({it, theta, r});
    } else if (r <= prev && ++decreases >= 10 && theta < 1.0) {
      theta = std::min(1.0, 2.0 * theta);
      decreases = 0;
      run.trace.push_back({it, theta, r});
    }
    prev = r;
    KPoint next(x.size());
    double th = theta;
    for (;;) {
      for (std::size_t i = 0; i < x.size(); ++i) next[i] = (1.0 - th) * x[i] + th * t.y[i];
      if (is_interior(s, next)) break;
      // T(x) sits on a face (clamped pullbacks); stay strictly inside
      if (th <= 1e-6) {
        run.trace.push_back({it, th, r});
        return run;
      }
      th /= 2.0;
    }
    x = std::move(next);
  }
  if (!run.ok && !run.x.empty() && cfg.newton_steps > 0) newton_polish(s, p, run, cfg);
  if (!run.x.empty()) run.params = params_prepared(s, p, run.x);
  return run;
}

// Newton on G(x) = T(x) - x with the analytic Jacobian. T is a pullback
// by the family itself, so DT has one entry per element (through x_{pi(e)})
// plus one per element for the parameter of its copy. Steps are halved
// until the residual drops and the point stays interior.
void newton_polish(const Mcd& s, const Prepared& p, SeedRun& run, const SolverConfig& cfg) {
  const int m = s.size();
  KPoint x = run.x;
  double res = run.residual;
  for (int it = 0; it < cfg.newton_steps && res > cfg.tol; ++it) {
    const auto a = params_prepared(s, p, x);
    const TStep t = step_prepared(s, p, x);
    Eigen::MatrixXd J = -Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd g(m);
    for (int e = 0; e < m; ++e) {
      g(e) = t.y[static_cast<std::size_t>(e)] - x[static_cast<std::size_t>(e)];
      if (s.is_critical(e)) continue;
      const int copy = p.copy_of_chain[static_cast<std::size_t>(s.chain_of(e))];
      const int c = p.critical_of_copy[static_cast<std::size_t>(copy - 1)];
      const double ai = a[static_cast<std::size_t>(copy - 1)];
      const double arg = x[static_cast<std::size_t>(s.pi(e))];
      const double h = 1.0 - (1.0 + arg) / (2.0 * ai);
      if (h <= 0.0) return;  // clamped pullback, no derivative
      const double sg = t.y[static_cast<std::size_t>(e)] < 0 ? -1.0 : 1.0;
      const double root = std::sqrt(h);
      J(e, s.pi(e)) += sg * (-1.0 / (2.0 * ai)) / (2.0 * root);
      const double raw = (x[static_cast<std::size_t>(s.pi(c))] + 1.0) / 2.0;
      if (raw > 0.5 && raw < 1.0) J(e, s.pi(c)) += 0.5 * sg * ((1.0 + arg) / (2.0 * ai * ai)) / (2.0 * root);
    }
    const Eigen::VectorXd dx = J.partialPivLu().solve(-g);
    double lambda = 1.0;
    bool moved = false;
    for (int half = 0; half < 30; ++half, lambda /= 2.0) {
      KPoint next(x.size());
      for (int e = 0; e < m; ++e) next[static_cast<std::size_t>(e)] = x[static_cast<std::size_t>(e)] + lambda * dx(e);
      if (!is_interior(s, next)) continue;
      const double r = max_diff(step_prepared(s, p, next).y, next);
      if (r < res) {
        x = std::move(next);
        res = r;
        moved = true;
        break;
      }
    }
    run.trace.push_back({run.iterations, -lambda, res});
    if (!moved) break;
  }
  if (res < run.residual) {
    run.x = x;
    run.residual = res;
  }
  run.ok = run.residual <= cfg.tol && boundary_distance(s, run.x) >= cfg.sep;
}

KPoint equispaced_seed(const Mcd& s) {
  KPoint x(static_cast<std::size_t>(s.size()), 0.0);
  for (const auto& ch : s.chains()) {
    const double m = static_cast<double>(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i)
      x[static_cast<std::size_t>(ch[i])] = -1.0 + 2.0 * (static_cast<double>(i) + 1.0) / (m + 1.0);
  }
  return x;
}

KPoint jittered_seed(const Mcd& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.999, 0.999);
  KPoint x(static_cast<std::size_t>(s.size()), 0.0);
  for (const auto& ch : s.chains()) {
    std::vector<double> v;
    for (std::size_t i = 0; i < ch.size(); ++i) v.push_back(u(rng));
    std::sort(v.begin(), v.end());
    for (std::size_t i = 1; i < v.size(); ++i)
      if (v[i] - v[i - 1] < 1e-6) v[i] = v[i - 1] + 1e-6;
    for (std::size_t i = 0; i < ch.size(); ++i) x[static_cast<std::size_t>(ch[i])] = std::min(v[i], 0.9999);
  }
  return x;
}

bool better(const SeedRun& a, const SeedRun& b) {
  if (a.ok != b.ok) return a.ok;
  if (a.residual != b.residual) return a.residual < b.residual;
  return a.params < b.params;
}

SolverReport report_of(const SeedRun& r, int index) {
  SolverReport rep;
  rep.fixed_point = r.x;
  rep.params = MultimodalMap(r.params);
  rep.residual = r.residual;
  rep.iterations = r.iterations;
  rep.seed_index = index;
  rep.clamped = r.clamped;
  rep.trace = r.trace;
  return rep;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

bool in_K(const Mcd& s, const KPoint& x) { return ordered(s, x, false); }

bool is_interior(const Mcd& s, const KPoint& x) { return ordered(s, x, true); }

std::vector<double> params_of(const Mcd& s, const KPoint& x) {
  check_shape(s, x);
  return params_prepared(s, prepare(s), x);
}

TStep apply_T_step(const Mcd& s, const KPoint& x) {
  const Prepared p = prepare(s);
  if (!is_interior(s, x)) throw NotInteriorError("point is not in the interior of K");
  return step_prepared(s, p, x);
}

KPoint apply_T(const Mcd& s, const KPoint& x) { return apply_T_step(s, x).y; }

SolverReport solve_fixed_point(const Mcd& s, const SolverConfig& cfg) {
  // checked first: a non-essential type is never transitive, and the
  // essential condition is the one the solver actually needs
  if (!is_essential(s)) throw NotEssentialError("type is not essential; T has no interior fixed point");
  const Prepared p = prepare(s);

  SeedRun first = run_seed(s, p, equispaced_seed(s), cfg);
  if (first.ok) return report_of(first, 0);

  std::vector<SeedRun> runs(static_cast<std::size_t>(std::max(cfg.jitter_seeds, 0)));
  parallel_for(
      runs.size(),
      [&](std::size_t i) { runs[i] = run_seed(s, p, jittered_seed(s, cfg.seed + i), cfg); },
      cfg.threads);
  int best = -1;
  for (std::size_t i = 0; i < runs.size(); ++i)
    if (runs[i].ok && (best < 0 || better(runs[i], runs[static_cast<std::size_t>(best)]))) best = static_cast<int>(i);
  if (best >= 0) return report_of(runs[static_cast<std::size_t>(best)], best + 1);

  double best_res = first.residual;
  for (const auto& r : runs) best_res = std::min(best_res, r.residual);
  std::string trace;
  for (const auto& ev : first.trace)
    trace += " [" + std::to_string(ev.iteration) + ": theta " + fmt(ev.theta) + ", residual " + fmt(ev.residual) + "]";
  throw NoConvergenceError("no seed reached residual " + fmt(cfg.tol) + "; best residual " + fmt(best_res) +
                           "; equispaced trace" + trace);
}

namespace {

void verify_orbit(const MultimodalMap& f, const Mcd& s) {
  Mcd got;
  try {
    got = mcd_of_critically_finite(f, s.size());
  } catch (const Error& e) {
    throw VerificationError(std::string("realized map fails the critical orbit check: ") + e.what());
  }
  if (!is_isomorphic(got, s))
    throw VerificationError("critical orbits of the realized map have a different combinatorial type");
}

}  // namespace

MultimodalMap realize(const Mcd& s, const SolverConfig& cfg) {
  if (s.size() > s.chain_count() && !is_primitive(s)) throw NotPrimitiveError("type factors as a star product");
  const auto rep = solve_fixed_point(s, cfg);
  verify_orbit(rep.params, s);
  return rep.params;
}

MultimodalMap realize_sequence(const std::vector<Mcd>& factors, const SolverConfig& cfg) {
  if (factors.empty()) throw std::invalid_argument("realize_sequence needs at least one type");
  const int n = factors.front().chain_count();
  int n_max = 2;
  for (const auto& s : factors) {
    if (s.chain_count() != n) throw NotAdmissibleError("factors have different numbers of chains");
    if (!is_transitive(s)) throw NotTransitiveError("a factor is not transitive");
    if (!is_admissible(s, n)) throw NotAdmissibleError("a factor is not admissible");
    if (!is_primitive(s)) throw NotPrimitiveError("a factor is not primitive");
    n_max = std::max(n_max, s.size() / n);
  }
  const Mcd product = star_chain(factors);
  const auto rep = solve_fixed_point(product, cfg);
  const MultimodalMap& f = rep.params;
  verify_orbit(f, product);

  const int depth = static_cast<int>(factors.size());
  const Tower t = tower(f, depth, n_max);
  if (!t.complete)
    throw VerificationError("tower detection stops at depth " + std::to_string(t.failed_depth) + ": " + t.failure);
  for (int k = 0; k < depth; ++k)
    if (!is_isomorphic(t.levels[static_cast<std::size_t>(k)].sigma, factors[static_cast<std::size_t>(k)]))
      throw VerificationError("renormalization " + std::to_string(k + 1) + " has an unexpected type");
  return f;
}

InfiniteEstimate estimate_infinite(const std::vector<Mcd>& prefix, const SolverConfig& cfg) {
  if (prefix.empty()) throw std::invalid_argument("estimate_infinite needs a nonempty prefix");
  InfiniteEstimate est;
  for (std::size_t d = 1; d <= prefix.size(); ++d) {
    const std::vector<Mcd> head(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(d));
    est.params.push_back(realize_sequence(head, cfg).params());
  }
  for (std::size_t d = 1; d < est.params.size(); ++d) {
    double m = 0.0;
    for (std::size_t i = 0; i < est.params[d].size(); ++i)
      m = std::max(m, std::abs(est.params[d][i] - est.params[d - 1][i]));
    est.differences.push_back(m);
  }
  for (std::size_t d = 1; d < est.differences.size(); ++d)
    est.ratios.push_back(est.differences[d - 1] > 0 ? est.differences[d] / est.differences[d - 1] : 0.0);
  est.limit_estimate = est.params.back();
  if (est.params.size() >= 3) {
    const auto& p0 = est.params[est.params.size() - 3];
    const auto& p1 = est.params[est.params.size() - 2];
    const auto& p2 = est.params.back();
    for (std::size_t i = 0; i < p2.size(); ++i) {
      const double den = p2[i] - 2.0 * p1[i] + p0[i];
      if (std::abs(den) > 1e-300) est.limit_estimate[i] = p2[i] - (p2[i] - p1[i]) * (p2[i] - p1[i]) / den;
    }
  }
  return est;
}

Mcd builtin_type(const std::string& name) {
  if (name == "doubling") return Mcd::validate({2, {{0, 1}}, {0}, {1, 0}, 0});
  if (name == "tripling-n1") return Mcd::validate({3, {{2, 0, 1}}, {0}, {1, 2, 0}, 0});
  if (name == "trivial") return Mcd();
  if (name == "n2-primitive") return Mcd::validate({6, {{2, 0, 4}, {3, 5, 1}}, {0, 3}, {1, 2, 3, 4, 5, 0}, 0});
  throw std::invalid_argument("unknown builtin type '" + name + "'");
}

std::vector<std::string> builtin_names() { return {"doubling", "tripling-n1", "trivial", "n2-primitive"}; }

}  // namespace multiren
