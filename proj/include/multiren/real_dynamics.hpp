#pragma once

#include <vector>

#include "multiren/mcd.hpp"
#include "multiren/word.hpp"

namespace multiren {

inline constexpr double kDomainTol = 1e-12;
/// |x| at or below this counts as the critical point in itineraries.
inline constexpr double kCriticalTol = 1e-10;

/// f_a(x) = -2a x^2 + 2a - 1 on I = [-1, 1], a in [1/2, 1].
double eval_unimodal(double a, double x);
double deriv_unimodal(double a, double x);
/// Preimage of y under f_a on the L (negative) or R (positive) side.
/// Throws RangeError when y exceeds the critical value 2a - 1.
double inverse_branch(double a, double y, Letter branch);
/// Throws DomainError unless a lies in [1/2, 1].
void check_param(double a);

/// A point of the extended map: copy in 1..n.
struct ExtPoint {
  int copy = 1;
  double x = 0.0;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
};

/// Image of J under f_a: hull of the endpoint images, plus the critical
/// value when J contains 0.
Interval image_interval(double a, Interval J);

/// f = f_{a_n} o ... o f_{a_1}; factor a_1 acts first.
class MultimodalMap {
 public:
  explicit MultimodalMap(std::vector<double> params);

  int n() const { return static_cast<int>(params_.size()); }
  const std::vector<double>& params() const { return params_; }
  /// Parameter of the factor acting on copy i (1-based).
  double param(int copy) const { return params_[static_cast<std::size_t>(copy - 1)]; }

  double operator()(double x) const;
  double derivative(double x) const;
  ExtPoint step(ExtPoint p) const;

 private:
  std::vector<double> params_;
};

double eval_multimodal(const MultimodalMap& f, double x);
ExtPoint extended_step(const MultimodalMap& f, ExtPoint p);
/// p, F(p), ..., F^{len-1}(p).
std::vector<ExtPoint> orbit(const MultimodalMap& f, ExtPoint p, int len);

Letter letter_of(double x);

/// Critical points of f in I, ascending: the preimages of 0 under the
/// partial compositions f_{r-1} o ... o f_1 for r = 1..n.
std::vector<double> critical_points(const MultimodalMap& f);
/// f at each critical point, aligned with critical_points().
std::vector<double> critical_values(const MultimodalMap& f);

Word itinerary(const MultimodalMap& f, ExtPoint p, int len);
/// Letters of p through copy n: length n - copy + 1.
Word inner_itinerary(const MultimodalMap& f, ExtPoint p);
/// C at step t when F^t(J) contains 0, otherwise the side of F^t(J).
Word interval_itinerary(const MultimodalMap& f, int copy, Interval J, int len);

struct Structure {
  int k = 0;
  /// psi[i] in 1..n is the rank of f at the (i+1)-th critical point among
  /// the ascending distinct critical values.
  std::vector<int> psi;
};

/// Throws DegenerateError unless f has n distinct critical values (1e-9).
Structure structure_of(const MultimodalMap& f);

/// Inner itineraries of the ordered critical points, rebuilt from the
/// structure alone. The first is L..LC; each next one changes the previous
/// word in two places: the old C becomes the letter giving the lap between
/// them its orientation (lap j + 1 increases iff j is even), and C moves to
/// the position shared with an earlier point of the same critical value, or
/// one before the leftmost C used so far when the value is new.
/// Throws InconsistentStructureError when no position is available.
std::vector<Word> infer_inner_itineraries(const Structure& s, int n);

/// The m.c.d. of a map whose critical points (0, i) are all periodic, with
/// combined orbit length at most `period`. Element 0 is (0, 1) and the ids
/// follow the orbit order. Throws NotCriticallyFiniteError.
Mcd mcd_of_critically_finite(const MultimodalMap& f, int period);

inline constexpr double kOrbitMatchTol = 1e-8;

}  // namespace multiren
