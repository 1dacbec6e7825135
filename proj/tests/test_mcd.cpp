#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "multiren/errors.hpp"
#include "multiren/mcd.hpp"
#include "mcd_oracle.hpp"

using namespace multiren;
using oracle::brute_valid;
using oracle::random_fields;

namespace {

Mcd doubling() { return Mcd::validate({2, {{0, 1}}, {0}, {1, 0}, 0}); }
Mcd period_three() { return Mcd::validate({3, {{2, 0, 1}}, {0}, {1, 2, 0}, 0}); }
Mcd fixed_point() { return Mcd::validate({1, {{0}}, {0}, {0}, 0}); }

Mcd relabel(const Mcd& s, const std::vector<int>& p) {
  McdFields f;
  f.elements = s.size();
  for (const auto& ch : s.chains()) {
    std::vector<int> c;
    for (int e : ch) c.push_back(p[static_cast<std::size_t>(e)]);
    f.chains.push_back(c);
  }
  std::reverse(f.chains.begin(), f.chains.end());
  for (int c : s.critical()) f.critical.push_back(p[static_cast<std::size_t>(c)]);
  f.pi.resize(static_cast<std::size_t>(s.size()));
  for (int e = 0; e < s.size(); ++e) f.pi[p[e]] = p[s.pi(e)];
  f.marked = p[s.marked()];
  return Mcd::validate(f);
}

// superstable parameter of f_a(x) = -2a x^2 + 2a - 1 with 0 of the given period
double superstable(int period, double lo, double hi) {
  auto g = [&](double a) {
    double x = 0;
    for (int i = 0; i < period; ++i) x = -2 * a * x * x + 2 * a - 1;
    return x;
  };
  double glo = g(lo);
  for (int i = 0; i < 200; ++i) {
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

// combinatorics of the critical orbit of f_a read off the real line
Mcd orbit_type(double a, int period) {
  std::vector<double> xs;
  double x = 0;
  for (int i = 0; i < period; ++i) {
    xs.push_back(x);
    x = -2 * a * x * x + 2 * a - 1;
  }
  std::vector<int> order(static_cast<std::size_t>(period));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return xs[i] < xs[j]; });
  McdFields f;
  f.elements = period;
  f.chains = {order};
  f.critical = {0};
  for (int i = 0; i < period; ++i) f.pi.push_back((i + 1) % period);
  f.marked = 0;
  return Mcd::validate(f);
}

}  // namespace

TEST_CASE("validate examples") {
  const Mcd d = doubling();
  CHECK(d.size() == 2);
  CHECK(d.precedes(0, 1));
  CHECK_THROWS_AS(Mcd::validate({2, {{0, 1}}, {0, 1}, {1, 0}, 0}), CriticalCountError);
  CHECK_THROWS_AS(Mcd::validate({2, {{0}}, {0}, {1, 0}, 0}), PartitionError);
  CHECK_THROWS_AS(Mcd::validate({2, {{0, 1}, {1}}, {0}, {1, 0}, 0}), PartitionError);
  CHECK_THROWS_AS(Mcd::validate({2, {{0, 1}}, {0}, {0, 0}, 0}), ReachabilityError);
  CHECK_THROWS_AS(Mcd::validate({2, {{0, 1}}, {0}, {1, 0}, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Mcd::validate({0, {}, {}, {}, 0}), std::invalid_argument);
  // increasing triple below the critical element mapped out of order
  CHECK_THROWS_AS(Mcd::validate({3, {{0, 1, 2}}, {2}, {1, 0, 2}, 2}), FoldingError);

  const McdFields f{3, {{0, 1, 2}}, {1}, {2, 0, 1}, 1};
  bool ok = true;
  try {
    Mcd::validate(f);
  } catch (const Error&) {
    ok = false;
  }
  CHECK(ok == brute_valid(f));
}

TEST_CASE("validate agrees with a brute-force checker on random structures") {
  std::mt19937_64 rng(12345);
  int accepted = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 5);
    const McdFields f = random_fields(rng, m);
    bool ok = true;
    try {
      Mcd::validate(f);
    } catch (const Error&) {
      ok = false;
    }
    accepted += ok ? 1 : 0;
    REQUIRE_MESSAGE(ok == brute_valid(f), "trial " << trial);
  }
  CHECK(accepted > 50);
}

TEST_CASE("transitivity") {
  CHECK(is_transitive(doubling()));
  CHECK(is_transitive(period_three()));
  const Mcd two_cycles = Mcd::validate({4, {{0, 1}, {2, 3}}, {0, 2}, {1, 0, 3, 2}, 0});
  CHECK_FALSE(is_transitive(two_cycles));
  CHECK_THROWS_AS(sign_at(two_cycles, 1), NotTransitiveError);
}

TEST_CASE("essential") {
  CHECK(is_essential(doubling()));
  CHECK(is_essential(period_three()));
  CHECK(is_essential(star_product(doubling(), doubling())));
  // the 2-cycle {2, 3} to the right of the critical element is never split
  const Mcd bad = Mcd::validate({5, {{0, 1, 2, 3, 4}}, {1}, {2, 4, 3, 2, 0}, 1});
  CHECK_FALSE(is_essential(bad));
}

TEST_CASE("first entry and return") {
  const Mcd d = doubling();
  CHECK(first_entry(d, 0) == 0);
  CHECK(first_entry(d, 1) == 0);
  CHECK(first_return(d, 0) == 0);
  const Mcd dd = star_product(d, d);
  for (int x = 0; x < dd.size(); ++x) {
    int y = x;
    int steps = 0;
    while (!dd.is_critical(y)) {
      y = dd.pi(y);
      ++steps;
    }
    CHECK(steps < dd.size());
    CHECK(first_entry(dd, x) == y);
  }
}

TEST_CASE("element itineraries") {
  const Mcd d = doubling();
  CHECK(element_itinerary(d, 0, 4).str() == "CRCR");
  CHECK(element_itinerary(d, 1, 2).str() == "RC");
  CHECK(element_itinerary(fixed_point(), 0, 3).str() == "CCC");
  CHECK(element_itinerary(period_three(), 0, 3).str() == "CRL");
}

TEST_CASE("sign at an element") {
  const Mcd d = doubling();
  CHECK(sign_at(d, 1) == 1);
  CHECK(sign_at(d, 0) == -1);
  const Mcd t = period_three();
  for (int c : t.critical()) CHECK(sign_at(t, t.pi(c)) == 1);
  CHECK(sign_at(t, 2) == -1);
  CHECK(sign_at(t, 0) == -1);  // pi^{-2}(0) = 1 with itinerary "RL"
}

TEST_CASE("star product of the doubling type with itself") {
  const Mcd d = doubling();
  const Mcd dd = star_product(d, d);
  CHECK(dd.size() == 4);
  CHECK(dd.critical_count() == 1);
  CHECK(is_transitive(dd));
  const double a4 = superstable(4, 0.82, 0.88);
  CHECK(is_isomorphic(dd, orbit_type(a4, 4)));
  const double a8 = superstable(8, 0.8760, 0.8900);
  CHECK(is_isomorphic(star_product(dd, d), orbit_type(a8, 8)));
  CHECK(is_isomorphic(star_product(d, dd), orbit_type(a8, 8)));
  CHECK(is_isomorphic(star_chain({d, d, d}), orbit_type(a8, 8)));
}

TEST_CASE("star product with the fixed type keeps the element count") {
  const Mcd t = period_three();
  CHECK(star_product(t, fixed_point()).size() == t.size());
  CHECK(is_isomorphic(star_product(t, fixed_point()), t));
  CHECK(is_isomorphic(star_product(fixed_point(), t), t));
}

TEST_CASE("star product errors") {
  const Mcd two_crit = Mcd::validate({2, {{0}, {1}}, {0, 1}, {1, 0}, 0});
  CHECK_THROWS_AS(star_product(doubling(), two_crit), CriticalMismatchError);
  const Mcd two_cycles = Mcd::validate({4, {{0, 1}, {2, 3}}, {0, 2}, {1, 0, 3, 2}, 0});
  CHECK_THROWS_AS(star_product(two_cycles, two_crit), NotTransitiveError);
}

TEST_CASE("star product preserves validity and the critical count") {
  std::vector<Mcd> one{doubling(), period_three(), fixed_point()};
  for (const auto& a : one)
    for (const auto& b : one)
      for (const auto& c : one) {
        const Mcd p = star_product(star_product(a, b), c);
        CHECK(p.critical_count() == 1);
        CHECK(p.size() == a.size() * b.size() * c.size());
        CHECK(is_transitive(p));
        // associativity on these samples
        CHECK(is_isomorphic(p, star_product(a, star_product(b, c))));
      }
  const Mcd two = Mcd::validate({6, {{2, 0, 4}, {5, 3, 1}}, {0, 3}, {1, 2, 3, 4, 5, 0}, 0});
  const Mcd p = star_product(two, Mcd::validate({2, {{0}, {1}}, {0, 1}, {1, 0}, 0}));
  CHECK(p.critical_count() == 2);
  CHECK(is_admissible(p, 2));
}

TEST_CASE("primitivity") {
  CHECK(is_primitive(doubling()));
  CHECK(is_primitive(period_three()));
  CHECK_FALSE(is_primitive(star_product(doubling(), doubling())));
  const Mcd dt = star_product(doubling(), period_three());
  auto w = find_factorization(dt);
  REQUIRE(w.has_value());
  CHECK(is_isomorphic(star_product(w->first, w->second), dt));
  CHECK_FALSE(is_primitive(star_product(period_three(), doubling())));
  const Mcd big = star_chain({doubling(), doubling(), doubling(), doubling(), doubling(), doubling()});
  CHECK_THROWS_AS(is_primitive(big), SizeLimitError);
  const Mcd two_cycles = Mcd::validate({4, {{0, 1}, {2, 3}}, {0, 2}, {1, 0, 3, 2}, 0});
  CHECK_THROWS_AS(is_primitive(two_cycles), NotTransitiveError);
}

TEST_CASE("isomorphism") {
  const Mcd d = doubling();
  CHECK(is_isomorphic(d, d));
  CHECK(is_isomorphic(d, Mcd::validate({2, {{1, 0}}, {1}, {1, 0}, 1})));
  CHECK_FALSE(is_isomorphic(d, Mcd::validate({2, {{1, 0}}, {0}, {1, 0}, 0})));
  CHECK_FALSE(is_isomorphic(d, period_three()));

  // equivalence relation on relabelings of a few types
  std::mt19937_64 rng(7);
  std::vector<Mcd> pool;
  for (const Mcd& base : {star_product(d, d), period_three(), star_product(period_three(), d)}) {
    for (int r = 0; r < 3; ++r) {
      std::vector<int> p(static_cast<std::size_t>(base.size()));
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
      pool.push_back(relabel(base, p));
    }
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    CHECK(is_isomorphic(pool[i], pool[i]));
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const bool ij = is_isomorphic(pool[i], pool[j]);
      CHECK(ij == is_isomorphic(pool[j], pool[i]));
      CHECK(ij == (i / 3 == j / 3));
      for (std::size_t k = 0; k < pool.size(); ++k)
        if (ij && is_isomorphic(pool[j], pool[k])) CHECK(is_isomorphic(pool[i], pool[k]));
    }
  }

  // two critical elements: the half-turn t -> t + 3 is a symmetry, while
  // moving the mark on an asymmetric variant is not
  const Mcd two = Mcd::validate({6, {{2, 0, 4}, {5, 3, 1}}, {0, 3}, {1, 2, 3, 4, 5, 0}, 0});
  CHECK(is_isomorphic(two, relabel(two, {3, 4, 5, 0, 1, 2})));
  const Mcd lopsided = Mcd::validate({6, {{2, 0, 4}, {3, 5, 1}}, {0, 3}, {1, 2, 3, 4, 5, 0}, 0});
  McdFields moved = lopsided.fields();
  moved.marked = 3;
  CHECK_FALSE(is_isomorphic(lopsided, Mcd::validate(moved)));
}

TEST_CASE("admissibility") {
  CHECK(is_admissible(doubling(), 1));
  CHECK_FALSE(is_admissible(doubling(), 2));
  const Mcd two = Mcd::validate({6, {{2, 0, 4}, {5, 3, 1}}, {0, 3}, {1, 2, 3, 4, 5, 0}, 0});
  CHECK(is_admissible(two, 2));
  CHECK_FALSE(is_admissible(two, 1));
}
