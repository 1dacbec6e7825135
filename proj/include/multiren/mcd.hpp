#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "multiren/word.hpp"

namespace multiren {

/// Unchecked fields of a marked combinatorial data, as read from a file or
/// assembled by a construction. Elements are the indices 0..elements-1; each
/// chain lists a class of mutually comparable elements in increasing order.
struct McdFields {
  int elements = 0;
  std::vector<std::vector<int>> chains;
  std::vector<int> critical;
  std::vector<int> pi;
  int marked = 0;
};

/// A validated marked combinatorial data <A, <, A^c, pi, c>.
///
/// Instances are only produced by validate() (or by constructions that end
/// in validate()), so every Mcd satisfies:
///   - the chains partition the elements and each chain holds exactly one
///     critical element;
///   - pi folds around every critical element: a < b < d implies
///     pi(a) < pi(b) < pi(d), and d < b < a implies pi(a) < pi(b) < pi(d);
///   - every element is pi^i(d) for some critical d and i >= 0.
class Mcd {
 public:
  /// The one-element type: a single fixed critical element.
  Mcd();

  /// Checks every invariant by exhaustive enumeration. Throws
  /// PartitionError, CriticalCountError, FoldingError or ReachabilityError;
  /// std::invalid_argument for malformed shapes (pi of the wrong length,
  /// indices out of range, marked element not critical).
  static Mcd validate(McdFields raw);

  int size() const { return static_cast<int>(pi_.size()); }
  int chain_count() const { return static_cast<int>(chains_.size()); }
  int critical_count() const { return static_cast<int>(critical_.size()); }

  const std::vector<std::vector<int>>& chains() const { return chains_; }
  const std::vector<int>& chain(int c) const { return chains_[static_cast<std::size_t>(c)]; }
  const std::vector<int>& critical() const { return critical_; }
  const std::vector<int>& pi() const { return pi_; }

  int pi(int e) const { return pi_[static_cast<std::size_t>(e)]; }
  int marked() const { return marked_; }
  int chain_of(int e) const { return chain_of_[static_cast<std::size_t>(e)]; }
  int position(int e) const { return position_[static_cast<std::size_t>(e)]; }
  bool is_critical(int e) const { return is_critical_[static_cast<std::size_t>(e)]; }
  /// The unique critical element comparable with e.
  int critical_of(int e) const { return chain_critical_[static_cast<std::size_t>(chain_of(e))]; }

  /// a < b: same chain and a listed before b.
  bool precedes(int a, int b) const {
    return chain_of(a) == chain_of(b) && position(a) < position(b);
  }
  bool comparable(int a, int b) const { return chain_of(a) == chain_of(b); }

  McdFields fields() const;

 private:
  std::vector<std::vector<int>> chains_;
  std::vector<int> critical_;
  std::vector<int> pi_;
  int marked_ = 0;

  std::vector<int> chain_of_;
  std::vector<int> position_;
  std::vector<char> is_critical_;
  std::vector<int> chain_critical_;
};

bool is_transitive(const Mcd& s);

/// Every pair a < b is weakly separated by a critical element after a common
/// number of pi iterations. Searched directly, up to size()^2 iterations per
/// adjacent pair.
bool is_essential(const Mcd& s);

/// pi^i(x) for the least i >= 0 that lands on a critical element.
int first_entry(const Mcd& s, int x);
/// first_entry(pi(x)).
int first_return(const Mcd& s, int x);

/// Letter i is R when pi^i(x) lies above the critical element of its chain,
/// C when it is critical and L when it lies below.
Word element_itinerary(const Mcd& s, int x, int len);

/// Inverse of pi; throws NotTransitiveError unless pi is a single cycle.
std::vector<int> pi_inverse(const Mcd& s);

/// Orientation sign of the element x: with i >= 0 minimal such that
/// pi^{-i}(x) lies in pi(A^c), the sign of the length-i itinerary of
/// pi^{-i}(x). Requires a transitive s (NotTransitiveError otherwise).
int sign_at(const Mcd& s, int x);

/// The product sigma2 * sigma1: sigma1 is the outer (first renormalization)
/// type and every one of its elements is blown up into a chain of sigma2,
/// order-reversed where sign_at(sigma1, .) is -1. Throws NotTransitiveError
/// when sigma1 is not transitive and CriticalMismatchError when the critical
/// counts differ.
Mcd star_product(const Mcd& sigma1, const Mcd& sigma2);

/// sigma_k * ... * sigma_1 for sigma_1 first.
Mcd star_chain(const std::vector<Mcd>& factors);

/// A witness (sigma1, sigma2) with star_product(sigma1, sigma2) isomorphic to
/// s and both factors nontrivial, or nullopt. Throws SizeLimitError beyond
/// kPrimitiveSearchLimit elements and NotTransitiveError for intransitive s.
std::optional<std::pair<Mcd, Mcd>> find_factorization(const Mcd& s);
bool is_primitive(const Mcd& s);

inline constexpr int kPrimitiveSearchLimit = 32;

/// A bijection preserving criticals, chains, order, pi and the mark.
std::optional<std::vector<int>> find_isomorphism(const Mcd& a, const Mcd& b);
bool is_isomorphic(const Mcd& a, const Mcd& b);

/// Chains and critical elements both number n.
bool is_admissible(const Mcd& s, int n);

}  // namespace multiren
