#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multiren/mcd.hpp"
#include "multiren/real_dynamics.hpp"

namespace multiren {

/// A multimodal map of type n given factor by factor. Every factor is an
/// even unimodal map of I with its maximum at 0 and both endpoints sent to -1.
class TypeNMap {
 public:
  virtual ~TypeNMap() = default;
  virtual int n() const = 0;
  /// Value and derivative of the factor acting on copy 1..n.
  virtual std::pair<double, double> factor_jet(int copy, double x) const = 0;

  double factor(int copy, double x) const { return factor_jet(copy, x).first; }
  ExtPoint step(ExtPoint p) const { return {p.copy % n() + 1, factor(p.copy, p.x)}; }
  /// The composition of all n factors, copy 1 first.
  double eval(double x) const;
  double derivative(double x) const;
  Interval image(int copy, Interval J) const;
};

class BaseMap final : public TypeNMap {
 public:
  explicit BaseMap(MultimodalMap f) : f_(std::move(f)) {}
  int n() const override { return f_.n(); }
  std::pair<double, double> factor_jet(int copy, double x) const override;
  const MultimodalMap& map() const { return f_; }

 private:
  MultimodalMap f_;
};

struct Rejection {
  int period_real = 0;
  std::string reason;
};

/// A restrictive interval P = [-q, q] of copy 1 with real period N and its
/// first-return data, in the coordinates of the map it was detected on.
struct RenormResult {
  int n = 1;
  int period_real = 0;
  int period_ext = 0;
  double q = 0.0;
  Interval P;
  /// Times 0 = ell[0] < ... < ell[n-1] < period_ext at which the orbit of P
  /// covers a critical point.
  std::vector<int> ell;
  /// Signed boundary periodic point of P_j = [-|p_j|, |p_j|]; p[0] = F^k(q).
  /// A_j(x) = -x / p_j sends P_j onto I with p_j going to -1.
  std::vector<double> p;
  /// F^i(P) for i < period_ext; the interval i lies on copy i mod n + 1.
  std::vector<Interval> orbit;
  /// The orbit interval at time ell[j] reaches beyond |p_j|.
  std::vector<char> clipped;
  double boundary_residual = 0.0;
  double boundary_multiplier = 0.0;
  /// Smaller real periods and the check each one failed.
  std::vector<Rejection> rejected;
  Mcd sigma;

  double affine(int j, double x) const { return -x / p[static_cast<std::size_t>(j)]; }
  double affine_inverse(int j, double x) const { return -p[static_cast<std::size_t>(j)] * x; }
};

/// The base map followed by a stack of renormalizations. Factor j of the
/// deepest level is A_{j+1} o F^{ell_{j+1} - ell_j} o A_j^{-1}, evaluated by
/// iterating the level below; nothing is ever expanded into coefficients.
class RenormalizedMap final : public TypeNMap {
 public:
  explicit RenormalizedMap(MultimodalMap base) : base_(std::move(base)) {}
  int n() const override { return base_.n(); }
  std::pair<double, double> factor_jet(int copy, double x) const override;

  int depth() const { return static_cast<int>(stack_.size()); }
  const std::vector<RenormResult>& stack() const { return stack_; }
  const MultimodalMap& base() const { return base_; }
  void push(RenormResult r) { stack_.push_back(std::move(r)); }
  /// Extended map of the given level (0 = base).
  std::pair<double, double> level_jet(int level, int copy, double x) const;
  /// Base-map iterates per real iterate of the deepest level.
  long cumulative_period() const;

 private:
  MultimodalMap base_;
  std::vector<RenormResult> stack_;
};

struct DetectOptions {
  int max_real_period = 16;
  int grid = 2048;
  double overlap_tol = 1e-13;
  double boundary_tol = 1e-9;
  double parabolic_tol = 1e-6;
};

/// Restrictive interval of minimal real period N in [2, max_real_period].
/// For each N, with k = N n: the largest s for which the orbit intervals of
/// [-s, s] have disjoint interiors is found by bisection; below it the
/// largest s with F^k([-s, s]) inside [-s, s] and every critical point
/// covered once is located by a grid scan and bisection; that s = q must be
/// a boundary periodic point. Throws PrecisionError when the boundary is
/// parabolic.
std::optional<RenormResult> detect_renormalization(const TypeNMap& g, const DetectOptions& opt = {});

struct DetectOutcome {
  std::optional<RenormResult> result;
  /// One entry per rejected candidate period, ascending.
  std::vector<Rejection> rejected;
};
DetectOutcome detect_with_witnesses(const TypeNMap& g, const DetectOptions& opt = {});
std::optional<RenormResult> detect_renormalization(const TypeNMap& g, int max_real_period);

/// A = orbit intervals, chains by copy in real-line order, pi the shift,
/// critical intervals those containing 0, mark P.
Mcd comb_type(const RenormResult& r);

/// Detects and pushes one more level; throws NotRenormalizableError.
void renormalize(RenormalizedMap& g, const DetectOptions& opt = {});

struct Tower {
  std::vector<RenormResult> levels;
  bool complete = false;
  int failed_depth = 0;
  std::string failure;

  std::vector<long> cumulative_periods() const;
};

/// Levels 1..depth; stops at the first failing level and records it.
Tower tower(const MultimodalMap& f, int depth, const DetectOptions& opt = {});
Tower tower(const MultimodalMap& f, int depth, int max_real_period);

/// N_{k+1} / N_k for the cumulative periods, N_0 = 1.
std::vector<double> period_ratios(const Tower& t);
/// All period ratios at most C. Throws std::invalid_argument below depth 2.
bool is_C_bounded(const Tower& t, double C);

/// Base-coordinate half-width of P at levels 0..depth (level 0 is I): partial
/// products of the q's.
std::vector<double> level_half_widths(const Tower& t);
/// |P^{k+1}| / |P^k| in base coordinates for k = 1..depth-1; entry i is
/// k = i + 1. Throws std::invalid_argument below depth 2.
std::vector<double> interval_decay(const Tower& t);

struct RatioStats {
  std::string family;
  int count = 0;
  double min = 0.0;
  double median = 0.0;
  double max = 0.0;
};

struct GeometryReport {
  int level = 0;
  int intervals = 0;
  std::vector<RatioStats> families;
  /// Same statistics restricted to each copy (n > 1).
  std::vector<std::vector<RatioStats>> per_copy;
};

/// Orbit intervals of level k and k+1 in base coordinates, summarised as
/// three ratio families: child length over parent length, distance from a
/// child to the parent's boundary over the parent length, and gaps between
/// neighbouring level-k intervals over the smaller neighbour. Endpoints
/// shared by construction (orbit points of 0, touching neighbours) are left
/// out of the last two. Needs depth
/// at least k + 1; level 0 uses I on every copy.
GeometryReport geometry_report(const MultimodalMap& f, const Tower& t, int k);

/// Orbit of the level-k interval under the base extended map.
std::vector<Interval> level_orbit(const MultimodalMap& f, const Tower& t, int k);

}  // namespace multiren
