#include "multiren/real_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "multiren/errors.hpp"

namespace multiren {

namespace {

double checked_x(double x) {
  if (!(x >= -1.0 - kDomainTol && x <= 1.0 + kDomainTol)) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << x << " lies outside [-1, 1]";
    throw DomainError(os.str());
  }
  return std::clamp(x, -1.0, 1.0);
}

}  // namespace

void check_param(double a) {
  if (!(a >= 0.5 && a <= 1.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "parameter " << a << " lies outside [1/2, 1]";
    throw DomainError(os.str());
  }
}

double eval_unimodal(double a, double x) {
  x = checked_x(x);
  return std::clamp(-2.0 * a * x * x + 2.0 * a - 1.0, -1.0, 1.0);
}

double deriv_unimodal(double a, double x) {
  x = checked_x(x);
  return -4.0 * a * x;
}

double inverse_branch(double a, double y, Letter branch) {
  const double top = 2.0 * a - 1.0;
  if (y > top + kDomainTol) {
    std::ostringstream os;
    os.precision(17);
    os << "value " << y << " exceeds the critical value " << top;
    throw RangeError(os.str());
  }
  const double r = std::sqrt(std::max(0.0, (top - y) / (2.0 * a)));
  if (branch == Letter::C) return 0.0;
  return branch == Letter::L ? -r : r;
}

Interval image_interval(double a, Interval J) {
  const double u = eval_unimodal(a, J.lo);
  const double v = eval_unimodal(a, J.hi);
  Interval out{std::min(u, v), std::max(u, v)};
  if (J.lo <= 0.0 && 0.0 <= J.hi) out.hi = 2.0 * a - 1.0;
  return out;
}

MultimodalMap::MultimodalMap(std::vector<double> params) : params_(std::move(params)) {
  if (params_.empty()) throw DomainError("a multimodal map needs at least one factor");
  for (double a : params_) check_param(a);
}

double MultimodalMap::operator()(double x) const {
  x = checked_x(x);
  for (double a : params_) x = eval_unimodal(a, x);
  return x;
}

double MultimodalMap::derivative(double x) const {
  x = checked_x(x);
  double d = 1.0;
  for (double a : params_) {
    d *= deriv_unimodal(a, x);
    x = eval_unimodal(a, x);
  }
  return d;
}

ExtPoint MultimodalMap::step(ExtPoint p) const {
  if (p.copy < 1 || p.copy > n()) throw DomainError("copy index out of range: " + std::to_string(p.copy));
  return ExtPoint{p.copy % n() + 1, eval_unimodal(param(p.copy), p.x)};
}

double eval_multimodal(const MultimodalMap& f, double x) { return f(x); }

ExtPoint extended_step(const MultimodalMap& f, ExtPoint p) { return f.step(p); }

std::vector<ExtPoint> orbit(const MultimodalMap& f, ExtPoint p, int len) {
  std::vector<ExtPoint> out;
  out.reserve(static_cast<std::size_t>(std::max(len, 0)));
  for (int t = 0; t < len; ++t) {
    out.push_back(p);
    if (t + 1 < len) p = f.step(p);
  }
  return out;
}

Letter letter_of(double x) {
  if (std::abs(x) <= kCriticalTol) return Letter::C;
  return x > 0 ? Letter::R : Letter::L;
}

std::vector<double> critical_points(const MultimodalMap& f) {
  std::vector<double> pts;
  for (int r = 1; r <= f.n(); ++r) {
    std::vector<double> level{0.0};
    for (int i = r - 1; i >= 1; --i) {
      const double a = f.param(i);
      const double top = 2.0 * a - 1.0;
      std::vector<double> next;
      for (double y : level) {
        if (y > top + kDomainTol) continue;
        if (std::abs(y - top) <= kDomainTol) {
          next.push_back(0.0);
          continue;
        }
        next.push_back(inverse_branch(a, y, Letter::L));
        next.push_back(inverse_branch(a, y, Letter::R));
      }
      level = std::move(next);
    }
    pts.insert(pts.end(), level.begin(), level.end());
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> merged;
  for (double x : pts)
    if (merged.empty() || x - merged.back() > kCriticalTol) merged.push_back(x);
  return merged;
}

std::vector<double> critical_values(const MultimodalMap& f) {
  std::vector<double> out;
  for (double x : critical_points(f)) out.push_back(f(x));
  return out;
}

Word itinerary(const MultimodalMap& f, ExtPoint p, int len) {
  Word w;
  for (const auto& q : orbit(f, p, len)) w.push_back(letter_of(q.x));
  return w;
}

Word inner_itinerary(const MultimodalMap& f, ExtPoint p) {
  return itinerary(f, p, f.n() - p.copy + 1);
}

Word interval_itinerary(const MultimodalMap& f, int copy, Interval J, int len) {
  Word w;
  for (int t = 0; t < len; ++t) {
    if (J.lo <= kCriticalTol && J.hi >= -kCriticalTol)
      w.push_back(J.hi - J.lo <= 0 ? letter_of(J.lo) : Letter::C);
    else
      w.push_back(J.lo > 0 ? Letter::R : Letter::L);
    J = image_interval(f.param(copy), J);
    copy = copy % f.n() + 1;
  }
  return w;
}

Structure structure_of(const MultimodalMap& f) {
  const auto values = critical_values(f);
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  std::vector<double> ranked;
  for (double v : distinct)
    if (ranked.empty() || v - ranked.back() > 1e-9) ranked.push_back(v);
  if (static_cast<int>(ranked.size()) != f.n())
    throw DegenerateError("map has " + std::to_string(ranked.size()) + " distinct critical values, expected " +
                          std::to_string(f.n()));
  Structure s;
  s.k = static_cast<int>(values.size());
  for (double v : values) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < ranked.size(); ++j)
      if (std::abs(ranked[j] - v) < std::abs(ranked[best] - v)) best = j;
    s.psi.push_back(static_cast<int>(best) + 1);
  }
  return s;
}

std::vector<Word> infer_inner_itineraries(const Structure& s, int n) {
  if (n < 1 || s.k < 1 || static_cast<int>(s.psi.size()) != s.k)
    throw InconsistentStructureError("structure has no critical points or a psi of the wrong length");
  for (int v : s.psi)
    if (v < 1 || v > n) throw InconsistentStructureError("psi value out of range: " + std::to_string(v));

  std::vector<Word> out;
  std::vector<int> c_pos;  // 0-based position of C in each word
  {
    std::vector<Letter> w(static_cast<std::size_t>(n), Letter::L);
    w.back() = Letter::C;
    out.emplace_back(w);
    c_pos.push_back(n - 1);
  }
  for (int j = 1; j < s.k; ++j) {
    // j is the 1-based index of the previous critical point
    int target = -1;
    for (int i = 0; i < j; ++i)
      if (s.psi[static_cast<std::size_t>(i)] == s.psi[static_cast<std::size_t>(j)]) {
        target = c_pos[static_cast<std::size_t>(i)];
        break;
      }
    if (target < 0) target = *std::min_element(c_pos.begin(), c_pos.end()) - 1;
    const int old = c_pos.back();
    if (target < 0 || target >= n || target == old)
      throw InconsistentStructureError("cannot place C for critical point " + std::to_string(j + 1));

    std::vector<Letter> w = out.back().letters();
    w[static_cast<std::size_t>(old)] = Letter::R;
    const std::size_t r_count = static_cast<std::size_t>(std::count(w.begin(), w.end(), Letter::R));
    if ((r_count % 2 == 0) != (j % 2 == 0)) w[static_cast<std::size_t>(old)] = Letter::L;
    w[static_cast<std::size_t>(target)] = Letter::C;
    out.emplace_back(w);
    c_pos.push_back(target);
  }
  return out;
}

Mcd mcd_of_critically_finite(const MultimodalMap& f, int period) {
  const int n = f.n();
  std::vector<ExtPoint> pts;
  std::vector<int> next;
  auto find = [&](ExtPoint p) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (pts[i].copy == p.copy && std::abs(pts[i].x - p.x) <= kOrbitMatchTol) return static_cast<int>(i);
    return -1;
  };
  int budget = period;
  for (int copy = 1; copy <= n; ++copy) {
    const ExtPoint start{copy, 0.0};
    if (find(start) >= 0) continue;
    const int first = static_cast<int>(pts.size());
    pts.push_back(start);
    next.push_back(-1);
    ExtPoint p = start;
    int prev = first;
    while (true) {
      if (--budget < 0)
        throw NotCriticallyFiniteError("critical orbits do not close within " + std::to_string(period) + " points");
      p = f.step(p);
      const int hit = find(p);
      if (hit >= 0) {
        next[static_cast<std::size_t>(prev)] = hit;
        if (hit != first)
          throw NotCriticallyFiniteError("critical point (0, " + std::to_string(copy) +
                                         ") is strictly preperiodic");
        break;
      }
      pts.push_back(p);
      next.push_back(-1);
      next[static_cast<std::size_t>(prev)] = static_cast<int>(pts.size()) - 1;
      prev = static_cast<int>(pts.size()) - 1;
    }
  }

  McdFields raw;
  raw.elements = static_cast<int>(pts.size());
  raw.pi = next;
  raw.marked = 0;
  for (int copy = 1; copy <= n; ++copy) {
    std::vector<int> chain;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (pts[i].copy == copy) chain.push_back(static_cast<int>(i));
    std::sort(chain.begin(), chain.end(), [&](int a, int b) { return pts[a].x < pts[b].x; });
    raw.chains.push_back(std::move(chain));
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (std::abs(pts[i].x) <= kOrbitMatchTol) raw.critical.push_back(static_cast<int>(i));
  return Mcd::validate(std::move(raw));
}

}  // namespace multiren
