#include "multiren/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "multiren/errors.hpp"
#include "multiren/parallel.hpp"

namespace multiren {

namespace {

double eval_level(const RenormalizedMap& g, int level, double x) {
  for (int c = 1; c <= g.n(); ++c) x = g.level_jet(level, c, x).first;
  return x;
}

}  // namespace

DistanceSeries successive_distance(const MultimodalMap& f, int depth, int grid, const DetectOptions& opt,
                                   int threads) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (grid < 2) throw std::invalid_argument("grid needs at least two points");
  RenormalizedMap g(f);
  for (int level = 1; level <= depth + 1; ++level) {
    try {
      renormalize(g, opt);
    } catch (const NotRenormalizableError& e) {
      throw NotRenormalizableError("level " + std::to_string(level) + ": " + e.what());
    }
    const auto& st = g.stack();
    if (!is_isomorphic(st.back().sigma, st.front().sigma))
      throw NonStationaryTypeError("type at level " + std::to_string(level) + " differs from level 1");
  }

  DistanceSeries out;
  out.grid = grid;
  std::vector<double> diff(static_cast<std::size_t>(grid));
  for (int k = 0; k <= depth; ++k) {
    parallel_for(
        static_cast<std::size_t>(grid),
        [&](std::size_t i) {
          const double x = -1.0 + 2.0 * static_cast<double>(i) / (grid - 1);
          diff[i] = std::abs(eval_level(g, k, x) - eval_level(g, k + 1, x));
        },
        threads);
    out.k.push_back(k);
    out.d.push_back(*std::max_element(diff.begin(), diff.end()));
  }
  return out;
}

RateFit fit_rate(const DistanceSeries& s, int burn_in) {
  if (burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
  std::vector<double> xs, ys;
  for (std::size_t i = static_cast<std::size_t>(burn_in); i < s.d.size(); ++i) {
    if (!(s.d[i] > 1e-14)) continue;
    xs.push_back(s.k[i]);
    ys.push_back(std::log(s.d[i]));
  }
  if (xs.size() < 3)
    throw InsufficientDataError("rate fit needs three points above 1e-14, got " + std::to_string(xs.size()));
  const double m = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.burn_in = burn_in;
  fit.points = static_cast<int>(xs.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.alpha = std::exp(fit.slope);
  double ss_res = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss_res += e * e;
  }
  // a flat series is fitted exactly
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

Cascade superstable_cascade(const Mcd& sigma, int depth, const SolverConfig& cfg) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  const auto est = estimate_infinite(std::vector<Mcd>(static_cast<std::size_t>(depth), sigma), cfg);
  Cascade out;
  out.params = est.params;
  for (std::size_t i = 0; i + 1 < est.differences.size(); ++i)
    out.ratios.push_back(est.differences[i] / est.differences[i + 1]);
  return out;
}

}  // namespace multiren
