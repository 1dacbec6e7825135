#pragma once

// Reference computations for the tests. Nothing here touches the library:
// the quadratic family, bisection and the period-doubling renormalization are
// written out directly.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

inline double fa(double a, double x) { return -2.0 * a * x * x + 2.0 * a - 1.0; }

inline double iterate(double a, double x, int k) {
  for (int i = 0; i < k; ++i) x = fa(a, x);
  return x;
}

template <class F>
double bisect(F g, double lo, double hi, int steps = 200) {
  double glo = g(lo);
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// superstable parameters of period 2^k, k = 0..K; each one is bracketed
// between the previous two
inline std::vector<double> cascade(int K) {
  std::vector<double> a{0.5, bisect([](double s) { return iterate(s, 0.0, 2); }, 0.7, 0.9)};
  for (int k = 2; k <= K; ++k) {
    const double gap = a[k - 1] - a[k - 2];
    const int period = 1 << k;
    a.push_back(bisect([&](double s) { return iterate(s, 0.0, period); }, a[k - 1] + 0.1 * gap, a[k - 1] + 0.4 * gap));
  }
  return a;
}

using Fn = std::function<double(double)>;

// g -> -g(g(p x)) / p with p the fixed point of g in (0, 1); valid for even
// unimodal g with g(+-1) = -1 that are once renormalizable of period two
inline Fn doubling_renormalize(const Fn& g) {
  const double p = bisect([&](double x) { return g(x) - x; }, 0.0, 1.0);
  return [g, p](double x) { return -g(g(p * x)) / p; };
}

using cplx = std::complex<double>;

// critical points of P_{a_n} o ... o P_{a_1}: zeros of every partial
// composition q_j, j < n, found by pulling back the roots of z^2 + a_j
inline std::vector<cplx> critical_points(const std::vector<cplx>& a) {
  std::vector<cplx> crit{0.0};
  for (std::size_t j = 1; j < a.size(); ++j) {
    std::vector<cplx> targets{std::sqrt(-a[j - 1]), -std::sqrt(-a[j - 1])};
    for (std::size_t i = j - 1; i >= 1; --i) {
      std::vector<cplx> pulled;
      for (const cplx& t : targets) {
        const cplx r = std::sqrt(t - a[i - 1]);
        pulled.push_back(r);
        pulled.push_back(-r);
      }
      targets = pulled;
    }
    crit.insert(crit.end(), targets.begin(), targets.end());
  }
  return crit;
}

// every critical orbit of p stays within radius for the given iterations
inline bool critical_orbits_bounded(const std::vector<cplx>& a, double radius = 1e6, int iterations = 10000) {
  for (cplx z : critical_points(a))
    for (int it = 0; it < iterations; ++it) {
      for (const cplx& c : a) z = z * z + c;
      if (std::abs(z) > radius) return false;
    }
  return true;
}

}  // namespace oracle
