#pragma once

#include <vector>

#include "multiren/mcd.hpp"
#include "multiren/real_dynamics.hpp"
#include "multiren/realization.hpp"
#include "multiren/renorm.hpp"

namespace multiren {

struct DistanceSeries {
  std::vector<int> k;
  /// d_k = sup over the grid of |R^k f(x) - R^{k+1} f(x)|.
  std::vector<double> d;
  int grid = 0;
};

/// Renormalizes f depth + 1 times and measures d_k for k = 0..depth on grid
/// equispaced points of I, comparing the full compositions of consecutive
/// levels. Throws NotRenormalizableError, NonStationaryTypeError when a
/// level's type is not isomorphic to the first one.
DistanceSeries successive_distance(const MultimodalMap& f, int depth, int grid, const DetectOptions& opt = {},
                                   int threads = 0);

struct RateFit {
  double alpha = 1.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int burn_in = 1;
  /// Points that entered the fit (after burn-in, d_k > 1e-14).
  int points = 0;
  bool converging() const { return alpha < 1.0; }
};

/// Least squares of log d_k against k over entries from index burn_in on,
/// skipping d_k <= 1e-14; alpha = exp(slope). A flat series has r2 = 1.
/// Throws InsufficientDataError with fewer than three usable points.
RateFit fit_rate(const DistanceSeries& s, int burn_in = 1);

struct Cascade {
  /// Parameters of the maps realizing sigma * ... * sigma, k = 1..depth.
  std::vector<std::vector<double>> params;
  /// (a_k - a_{k-1}) / (a_{k+1} - a_k) for k = 2..depth-1, differences in
  /// the max norm.
  std::vector<double> ratios;
};

Cascade superstable_cascade(const Mcd& sigma, int depth, const SolverConfig& cfg = {});

}  // namespace multiren
