#include "multiren/complex_poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "multiren/errors.hpp"
#include "multiren/parallel.hpp"

namespace multiren {

namespace {

// ascending coefficient vectors from here on
using Poly = std::vector<cplx>;

Poly mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, cplx{});
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly compose_ascending(const std::vector<cplx>& a) {
  Poly q{cplx{0.0}, cplx{1.0}};
  for (const cplx& ai : a) {
    q = mul(q, q);
    q[0] += ai;
  }
  return q;
}

CoeffPoly descending(Poly q) {
  std::reverse(q.begin(), q.end());
  return CoeffPoly{std::move(q)};
}

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

int check_monic_power(const CoeffPoly& q) {
  const int d = q.degree();
  if (d < 2 || (d & (d - 1)) != 0) throw DegreeError("degree " + std::to_string(d) + " is not 2^n with n >= 1");
  if (std::abs(q.coeffs.front() - cplx{1.0}) > 1e-12) throw NotMonicError("leading coefficient is not 1");
  int n = 0;
  while ((1 << n) < d) ++n;
  return n;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

struct Aberth {
  std::vector<cplx> roots;
  bool converged = false;
  int sweeps = 0;
};

Aberth aberth(const std::vector<cplx>& coeffs, int max_sweeps, double tol) {
  Aberth out;
  const int d = static_cast<int>(coeffs.size()) - 1;
  if (d <= 0) {
    out.converged = true;
    return out;
  }
  if (coeffs.front() == cplx{}) throw DegreeError("leading coefficient vanishes");
  std::vector<cplx> c(coeffs.size());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs[i] / coeffs.front();
  double bound = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) bound = std::max(bound, std::abs(c[i]));
  const double r = 1.0 + bound;
  auto& z = out.roots;
  for (int k = 0; k < d; ++k) z.push_back(std::polar(r, 2.0 * M_PI * k / d + 0.4));

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double worst = 0.0;
    for (int k = 0; k < d; ++k) {
      cplx p = c[0];
      cplx dp = 0.0;
      for (std::size_t i = 1; i < c.size(); ++i) {
        dp = dp * z[k] + p;
        p = p * z[k] + c[i];
      }
      if (p == cplx{}) continue;
      cplx s = 0.0;
      for (int j = 0; j < d; ++j)
        if (j != k) s += 1.0 / (z[k] - z[j]);
      const cplx w = p / dp;
      const cplx delta = w / (1.0 - w * s);
      if (!std::isfinite(delta.real()) || !std::isfinite(delta.imag())) continue;
      z[k] -= delta;
      worst = std::max(worst, std::abs(delta) / (1.0 + std::abs(z[k])));
    }
    out.sweeps = sweep;
    if (worst <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

cplx CoeffPoly::eval(cplx z) const {
  cplx v = 0.0;
  for (const auto& c : coeffs) v = v * z + c;
  return v;
}

CoeffPoly compose_coeffs(const TypeNPoly& p) {
  if (p.a.empty()) throw DegreeError("a composition needs at least one factor");
  return descending(compose_ascending(p.a));
}

std::optional<TypeNPoly> decompose_coeffs(const CoeffPoly& q) {
  const int n = check_monic_power(q);
  const int d = q.degree();
  TypeNPoly out;
  for (int j = 1; j <= n; ++j) {
    // coefficient of z^{2^n - 2^j} is C_j a_j + V_j; it is affine in a_j, so
    // C_j is its exact derivative, read off from two compositions
    const std::size_t idx = static_cast<std::size_t>(1 << j);  // descending index
    std::vector<cplx> trial = out.a;
    trial.resize(static_cast<std::size_t>(n), cplx{});
    const cplx V = descending(compose_ascending(trial)).coeffs[idx];
    trial[static_cast<std::size_t>(j - 1)] = 1.0;
    const cplx C = descending(compose_ascending(trial)).coeffs[idx] - V;
    out.a.push_back((q.coeffs[idx] - V) / C);
  }
  const CoeffPoly back = compose_coeffs(out);
  const double scale = std::max(1.0, max_abs(q.coeffs));
  for (int i = 0; i <= d; ++i)
    if (std::abs(back.coeffs[static_cast<std::size_t>(i)] - q.coeffs[static_cast<std::size_t>(i)]) > 1e-9 * scale)
      return std::nullopt;
  return out;
}

double escape_radius(const TypeNPoly& p) {
  double r = 4.0;
  for (const auto& a : p.a) r = std::max(r, std::abs(a));
  return r;
}

cplx eval_composition(const TypeNPoly& p, cplx z) {
  for (const auto& a : p.a) z = z * z + a;
  return z;
}

std::string to_string(ConnectivityVerdict::Kind k) {
  switch (k) {
    case ConnectivityVerdict::Kind::Connected:
      return "connected";
    case ConnectivityVerdict::Kind::Disconnected:
      return "disconnected";
    case ConnectivityVerdict::Kind::Undecided:
      return "undecided";
  }
  return "undecided";
}

ConnectivityVerdict is_connected(const TypeNPoly& p, long cap) {
  if (cap < 1) throw std::invalid_argument("iteration cap must be at least 1");
  const int n = p.n();
  if (n < 1) throw DegreeError("a composition needs at least one factor");
  ConnectivityVerdict v;
  for (int i = 0; i < n; ++i)
    if (std::abs(p.a[static_cast<std::size_t>(i)]) >= 4.0) {
      v.kind = ConnectivityVerdict::Kind::Disconnected;
      v.step = 0;
      v.copy = i + 1;
      return v;
    }
  const double R = escape_radius(p);
  constexpr int kMaxCycle = 64;
  bool settled = true;
  for (int start = 0; start < n; ++start) {
    // history of the orbit at the start copy, one entry per full turn
    std::vector<cplx> ring(kMaxCycle + 1);
    cplx z = 0.0;
    int copy = start;
    long step = 0;
    for (long turn = 1; turn <= cap; ++turn) {
      for (int f = 0; f < n; ++f) {
        z = z * z + p.a[static_cast<std::size_t>(copy)];
        copy = (copy + 1) % n;
        ++step;
        if (std::abs(z) >= R) {
          v.kind = ConnectivityVerdict::Kind::Disconnected;
          v.step = step;
          v.copy = start + 1;
          return v;
        }
      }
      ring[static_cast<std::size_t>(turn % (kMaxCycle + 1))] = z;
    }
    if (cap <= kMaxCycle) {
      settled = false;
      continue;
    }
    bool cyc = false;
    for (int per = 1; per <= kMaxCycle && !cyc; ++per)
      cyc = std::abs(z - ring[static_cast<std::size_t>((cap - per) % (kMaxCycle + 1))]) <= 1e-9;
    settled = settled && cyc;
  }
  v.kind = settled ? ConnectivityVerdict::Kind::Connected : ConnectivityVerdict::Kind::Undecided;
  return v;
}

std::vector<ConnectivityVerdict> connectivity_grid(const std::vector<TypeNPoly>& ps, long cap, int threads) {
  std::vector<ConnectivityVerdict> out(ps.size());
  parallel_for(ps.size(), [&](std::size_t i) { out[i] = is_connected(ps[i], cap); }, threads);
  return out;
}

Raster render_filled_julia(const TypeNPoly& p, const Window& w, int width, int height, long cap, int threads) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("raster size must be positive");
  if (cap < 1) throw std::invalid_argument("iteration cap must be at least 1");
  if (p.a.empty()) throw DegreeError("a composition needs at least one factor");
  Raster r;
  r.width = width;
  r.height = height;
  r.window = w;
  r.cap = cap;
  r.values.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  const double R = escape_radius(p);
  const double dx = (w.re_max - w.re_min) / width;
  const double dy = (w.im_max - w.im_min) / height;
  parallel_for(
      static_cast<std::size_t>(height),
      [&](std::size_t row) {
        const double im = w.im_max - (static_cast<double>(row) + 0.5) * dy;
        for (int col = 0; col < width; ++col) {
          cplx z{w.re_min + (col + 0.5) * dx, im};
          std::int32_t value = 0;
          for (long it = 1; it <= cap && value == 0; ++it)
            for (const auto& a : p.a) {
              z = z * z + a;
              if (std::abs(z) >= R) {
                value = static_cast<std::int32_t>(it);
                break;
              }
            }
          r.values[row * static_cast<std::size_t>(width) + static_cast<std::size_t>(col)] = value;
        }
      },
      threads);
  return r;
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
  const auto res = aberth(coeffs, 200, 1e-12);
  if (!res.converged) throw RootFindingError("Aberth iteration did not converge in 200 sweeps");
  return res.roots;
}

std::string to_string(BnVerdict::Failure f) {
  switch (f) {
    case BnVerdict::Failure::None:
      return "in_Bn";
    case BnVerdict::Failure::Degenerate:
      return "fails(nd)";
    case BnVerdict::Failure::ValueCount:
      return "fails(value_count)";
    case BnVerdict::Failure::Partition:
      return "fails(partition)";
  }
  return "fails";
}

BnVerdict bn_test(const CoeffPoly& q) {
  const int n = check_monic_power(q);
  const int d = q.degree();
  BnVerdict v;

  std::vector<cplx> dq;
  for (int i = 0; i < d; ++i) dq.push_back(q.coeffs[static_cast<std::size_t>(i)] * static_cast<double>(d - i));
  const auto res = aberth(dq, 200, 1e-12);
  v.critical_points = res.roots;
  auto closest_pair = [&] {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < res.roots.size(); ++i)
      for (std::size_t j = i + 1; j < res.roots.size(); ++j) m = std::min(m, std::abs(res.roots[i] - res.roots[j]));
    return m;
  };
  if (!res.converged) {
    // a multiple root of q' slows the iteration to a linear crawl with the
    // approximations huddled around it; anything else is a genuine failure
    const double m = closest_pair();
    if (m < 1e-4) {
      v.failure = BnVerdict::Failure::Degenerate;
      v.detail = "critical points coalesce (closest pair " + fmt(m) + ", iteration stalled)";
      return v;
    }
    throw RootFindingError("Aberth iteration on q' did not converge in 200 sweeps");
  }
  if (static_cast<int>(res.roots.size()) != d - 1) {
    v.failure = BnVerdict::Failure::Degenerate;
    v.detail = "found " + std::to_string(res.roots.size()) + " critical points";
    return v;
  }
  const double m = closest_pair();
  if (m < 1e-8) {
    v.failure = BnVerdict::Failure::Degenerate;
    v.detail = "two critical points closer than 1e-8 (" + fmt(m) + ")";
    return v;
  }

  for (const auto& c : v.critical_points) v.critical_values.push_back(q.eval(c));
  const std::size_t k = v.critical_values.size();
  const double tol = 1e-7 * std::max(1.0, max_abs(v.critical_values));
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (std::abs(v.critical_values[i] - v.critical_values[j]) <= tol) parent[root(i)] = root(j);
  std::vector<std::vector<int>> clusters;
  std::vector<int> cluster_of(k, -1);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t r = root(i);
    if (cluster_of[r] < 0) {
      cluster_of[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(cluster_of[r])].push_back(static_cast<int>(i));
  }
  double intra = 0.0;
  double inter = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const double g = std::abs(v.critical_values[i] - v.critical_values[j]);
      if (root(i) == root(j))
        intra = std::max(intra, g);
      else
        inter = std::min(inter, g);
    }
  if (clusters.size() > 1 && intra > 1e-3 * inter) {
    v.failure = BnVerdict::Failure::ValueCount;
    v.detail = "critical values do not separate cleanly (spread " + fmt(intra) + " vs gap " + fmt(inter) + ")";
    return v;
  }
  if (static_cast<int>(clusters.size()) != n) {
    v.failure = BnVerdict::Failure::ValueCount;
    v.detail = std::to_string(clusters.size()) + " distinct critical values, expected " + std::to_string(n);
    return v;
  }

  v.distinguished = 0;
  for (std::size_t i = 1; i < k; ++i)
    if (std::abs(v.critical_points[i]) < std::abs(v.critical_points[static_cast<std::size_t>(v.distinguished)]))
      v.distinguished = static_cast<int>(i);
  // q(L_i) atomic forces each L_i to be one whole value class
  std::sort(clusters.begin(), clusters.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (int i = 0; i < n; ++i)
    if (clusters[static_cast<std::size_t>(i)].size() != (std::size_t{1} << i)) {
      v.failure = BnVerdict::Failure::Partition;
      v.detail = "value classes do not have sizes 1, 2, ..., 2^(n-1)";
      return v;
    }
  if (clusters.front().front() != v.distinguished) {
    v.failure = BnVerdict::Failure::Partition;
    v.detail = "the critical point nearest 0 shares its value with another critical point";
    return v;
  }
  v.partition = clusters;
  return v;
}

double normalization_alpha(const std::vector<double>& a) {
  if (a.empty()) throw DegreeError("a composition needs at least one factor");
  const int n = static_cast<int>(a.size());
  double log_abs = (std::ldexp(1.0, n) - 1.0) * std::log(2.0);
  bool negative = true;
  for (int i = 0; i < n; ++i) {
    const double ai = a[static_cast<std::size_t>(i)];
    if (ai == 0.0) throw ZeroParamError("parameter a_" + std::to_string(i + 1) + " is zero");
    const double power = std::ldexp(1.0, n - 1 - i);
    log_abs += power * std::log(std::abs(ai));
    if (ai < 0 && i == n - 1) negative = !negative;  // only the odd power keeps a sign
  }
  const double mag = std::exp(log_abs / (std::ldexp(1.0, n) - 1.0));
  return negative ? -mag : mag;
}

TypeNPoly normalize_to_poln(const std::vector<double>& a) {
  const double alpha = normalization_alpha(a);
  TypeNPoly out;
  double scale = alpha;
  for (double ai : a) {
    // scale_i f_a(z / scale_{i-1}) = z^2 + c needs scale_i = -scale_{i-1}^2 / (2a)
    const double next = -scale * scale / (2.0 * ai);
    out.a.emplace_back(next * (2.0 * ai - 1.0));
    scale = next;
  }
  if (std::abs(scale - alpha) > 1e-9 * std::abs(alpha))
    throw VerificationError("rescalings do not close up: " + fmt(scale) + " vs alpha " + fmt(alpha));

  // expand alpha f(z / alpha) directly and compare
  Poly g{cplx{0.0}, cplx{1.0 / alpha}};
  for (double ai : a) {
    g = mul(g, g);
    for (auto& c : g) c *= -2.0 * ai;
    g[0] += 2.0 * ai - 1.0;
  }
  for (auto& c : g) c *= alpha;
  const CoeffPoly want = descending(g);
  const CoeffPoly got = compose_coeffs(out);
  const double tol = 1e-9 * std::max(1.0, max_abs(want.coeffs));
  for (std::size_t i = 0; i < want.coeffs.size(); ++i)
    if (std::abs(want.coeffs[i] - got.coeffs[i]) > tol)
      throw VerificationError("normalized composition does not match alpha f(z / alpha)");
  return out;
}

}  // namespace multiren
