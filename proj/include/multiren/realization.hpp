#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multiren/mcd.hpp"
#include "multiren/real_dynamics.hpp"

namespace multiren {

/// A point of K_sigma: one coordinate in [-1, 1] per element of A(sigma).
using KPoint = std::vector<double>;

/// Copy (1..n) of each chain: the chain of the marked element is copy 1 and
/// pi carries copy i to copy i + 1. Throws NotAdmissibleError when pi does
/// not move whole chains cyclically.
std::vector<int> chain_copies(const Mcd& s);

/// Minimum of |x_a - x_b| over distinct comparable pairs; infinity when no
/// chain has two elements.
double boundary_distance(const Mcd& s, const KPoint& x);

/// x is order compatible (a < b implies x_a <= x_b) with every coordinate in
/// [-1, 1]; interior when all those inequalities are strict.
bool in_K(const Mcd& s, const KPoint& x);
bool is_interior(const Mcd& s, const KPoint& x);

/// Parameters lambda(x): a_i = (x_{pi(c_i)} + 1) / 2 clamped to [1/2, 1].
std::vector<double> params_of(const Mcd& s, const KPoint& x);

struct TStep {
  KPoint y;
  std::vector<double> params;
  /// Pullbacks whose argument exceeded the critical value and was clamped.
  int clamped = 0;
};

/// One application of the pullback operator. Throws NotInteriorError,
/// NotAdmissibleError, NotTransitiveError.
TStep apply_T_step(const Mcd& s, const KPoint& x);
KPoint apply_T(const Mcd& s, const KPoint& x);

struct SolverConfig {
  double tol = 1e-12;
  double sep = 1e-8;
  long max_iter = 100000;
  int jitter_seeds = 32;
  /// Once the damped residual is below polish_below (or the iteration cap
  /// is hit) up to newton_steps Newton steps finish the solve; 0 disables.
  double polish_below = 1e-6;
  int newton_steps = 20;
  std::uint64_t seed = 20240611;
  /// 0 uses default_threads().
  int threads = 0;
};

/// A change of damping; Newton steps are recorded with theta = -(step size).
struct DampingEvent {
  long iteration = 0;
  double theta = 1.0;
  double residual = 0.0;
};

struct SolverReport {
  KPoint fixed_point;
  MultimodalMap params{std::vector<double>{1.0}};
  double residual = 0.0;
  long iterations = 0;
  /// 0 is the equispaced start, 1.. the jittered ones.
  int seed_index = 0;
  int clamped = 0;
  std::vector<DampingEvent> trace;
};

/// Damped iteration x <- (1 - theta) x + theta T(x), theta halved when the
/// residual grows (never below 1/64) and doubled back after ten decreases.
/// Starts from an equispaced order-respecting point; if that fails, from
/// cfg.jitter_seeds jittered points in parallel, keeping the lowest residual
/// (ties: lexicographically smallest parameters). Throws NotEssentialError,
/// NotAdmissibleError, NotTransitiveError, NoConvergenceError.
SolverReport solve_fixed_point(const Mcd& s, const SolverConfig& cfg = {});

/// Critically finite map of type s, checked with mcd_of_critically_finite.
/// Throws NotPrimitiveError besides the solver errors, VerificationError
/// when the check fails.
MultimodalMap realize(const Mcd& s, const SolverConfig& cfg = {});

/// Realizes s_k * ... * s_1 and checks both the critical orbit type and that
/// tower detection recovers s_1, s_2, ... in order.
MultimodalMap realize_sequence(const std::vector<Mcd>& factors, const SolverConfig& cfg = {});

struct InfiniteEstimate {
  /// Parameters realized for the prefixes of length 1..k.
  std::vector<std::vector<double>> params;
  /// Max-norm distance between consecutive parameter vectors.
  std::vector<double> differences;
  /// Ratios of consecutive differences.
  std::vector<double> ratios;
  /// Component-wise Aitken extrapolation of the last three vectors; equal
  /// to the last one below depth 3.
  std::vector<double> limit_estimate;
};

InfiniteEstimate estimate_infinite(const std::vector<Mcd>& prefix, const SolverConfig& cfg = {});

/// doubling, tripling-n1, trivial, n2-primitive.
Mcd builtin_type(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace multiren
