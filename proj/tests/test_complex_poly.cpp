#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "multiren/complex_poly.hpp"
#include "multiren/errors.hpp"

using namespace multiren;

namespace {

cplx random_c(std::mt19937_64& rng, double r) {
  std::uniform_real_distribution<double> u(-r, r);
  return {u(rng), u(rng)};
}

// plain boundedness of every critical orbit of p itself: critical points
// are 0 and the preimages of 0 under the partial compositions
bool oracle_bounded(const TypeNPoly& p) {
  // zeros of q_j = P_{a_j} o ... o P_{a_1}, j = 0..n-1, with q_0(z) = z
  std::vector<cplx> crit{0.0};
  for (int j = 1; j < p.n(); ++j) {
    // q_j(z) = 0  <=>  q_{j-1}(z) = +-sqrt(-a_j), pulled back through q_{j-1}
    std::vector<cplx> targets{std::sqrt(-p.a[static_cast<std::size_t>(j - 1)]),
                              -std::sqrt(-p.a[static_cast<std::size_t>(j - 1)])};
    for (int i = j - 1; i >= 1; --i) {
      std::vector<cplx> pulled;
      for (const cplx& t : targets) {
        const cplx r = std::sqrt(t - p.a[static_cast<std::size_t>(i - 1)]);
        pulled.push_back(r);
        pulled.push_back(-r);
      }
      targets = pulled;
    }
    crit.insert(crit.end(), targets.begin(), targets.end());
  }
  for (cplx z : crit) {
    for (int it = 0; it < 10000; ++it) {
      z = eval_composition(p, z);
      if (std::abs(z) > 1e6) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("compose and decompose examples") {
  const auto q = compose_coeffs({{1.0, 0.0}});
  REQUIRE(q.coeffs.size() == 5);
  const std::vector<double> want{1, 0, 2, 0, 1};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(q.coeffs[i] - want[i]) < 1e-15);

  const auto d = decompose_coeffs(CoeffPoly{{1.0, 0.0, 2.0, 0.0, 1.0}});
  REQUIRE(d);
  CHECK(std::abs(d->a[0] - cplx{1.0}) < 1e-15);
  CHECK(std::abs(d->a[1]) < 1e-15);

  CHECK_FALSE(decompose_coeffs(CoeffPoly{{1.0, 1.0, 0.0, 0.0, 0.0}}));
  CHECK_THROWS_AS(decompose_coeffs(CoeffPoly{{2.0, 0.0, 1.0}}), NotMonicError);
  CHECK_THROWS_AS(decompose_coeffs(CoeffPoly{{1.0, 0.0, 0.0, 1.0}}), DegreeError);
  CHECK_THROWS_AS(decompose_coeffs(CoeffPoly{{1.0}}), DegreeError);

  // n = 1 is z^2 + a
  const auto one = decompose_coeffs(CoeffPoly{{1.0, 0.0, cplx{0.3, -0.2}}});
  REQUIRE(one);
  CHECK(std::abs(one->a[0] - cplx{0.3, -0.2}) < 1e-15);
}

TEST_CASE("decompose inverts compose") {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 3;
    TypeNPoly p;
    for (int i = 0; i < n; ++i) p.a.push_back(random_c(rng, 2.0));
    const auto back = decompose_coeffs(compose_coeffs(p));
    REQUIRE(back);
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(back->a[static_cast<std::size_t>(i)] - p.a[static_cast<std::size_t>(i)]));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("escape radius") {
  CHECK(escape_radius({{0.0, 0.0, 0.0}}) == 4.0);
  CHECK(escape_radius({{5.0}}) == 5.0);
  CHECK(escape_radius({{cplx{3.0, 4.0}, 1.0}}) == doctest::Approx(5.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 500; ++trial) {
    TypeNPoly p;
    for (int i = 0; i < 1 + trial % 4; ++i) p.a.push_back(random_c(rng, 6.0));
    const double R = escape_radius(p);
    cplx z = std::polar(R, angle(rng));
    std::size_t copy = 0;
    for (int step = 0; step < 20 && std::abs(z) < 1e100; ++step) {
      const cplx w = z * z + p.a[copy];
      CHECK(std::abs(w) >= 2.0 * std::abs(z));
      z = w;
      copy = (copy + 1) % p.a.size();
    }
  }
}

TEST_CASE("connectivity examples") {
  const auto cheb = is_connected({{-2.0}}, 10000);
  CHECK(cheb.kind == ConnectivityVerdict::Kind::Connected);

  const auto one = is_connected({{1.0}}, 10000);
  CHECK(one.kind == ConnectivityVerdict::Kind::Disconnected);
  CHECK(one.step <= 3);

  const auto big = is_connected({{5.0, 0.0}}, 10000);
  CHECK(big.kind == ConnectivityVerdict::Kind::Disconnected);
  CHECK(big.step == 0);

  CHECK(is_connected({{0.0}}, 100).kind == ConnectivityVerdict::Kind::Connected);
  CHECK_THROWS_AS(is_connected({{0.0}}, 0), std::invalid_argument);
}

TEST_CASE("connectivity agrees with plain boundedness") {
  // n = 1 real slice and an n = 2 sample of real parameter pairs
  std::vector<TypeNPoly> ps;
  for (int i = 0; i < 120; ++i) ps.push_back({{-2.5 + 3.0 * (i + 0.5) / 120.0}});
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) ps.push_back({{-2.6 + 5.2 * (i + 0.5) / 16.0, -2.6 + 5.2 * (j + 0.5) / 16.0}});
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) ps.push_back({{random_c(rng, 6.0), random_c(rng, 6.0)}});
  const auto verdicts = connectivity_grid(ps, 10000);
  int decided = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (verdicts[i].kind == ConnectivityVerdict::Kind::Undecided) continue;
    ++decided;
    const bool bounded = oracle_bounded(ps[i]);
    CHECK(bounded == (verdicts[i].kind == ConnectivityVerdict::Kind::Connected));
    bool big = false;
    for (const auto& a : ps[i].a) big = big || std::abs(a) >= 4.0;
    if (big) CHECK_FALSE(bounded);
  }
  CHECK(decided > static_cast<int>(ps.size()) / 2);
}

TEST_CASE("filled Julia rasters") {
  const Window w{-1.5, 1.5, -1.5, 1.5};
  const auto disk = render_filled_julia({{0.0}}, w, 61, 61, 200, 1);
  const double px = 3.0 / 61;
  for (int y = 0; y < 61; ++y)
    for (int x = 0; x < 61; ++x) {
      const double re = -1.5 + (x + 0.5) * px;
      const double im = 1.5 - (y + 0.5) * px;
      const double r = std::hypot(re, im);
      if (r < 1.0 - 1e-9) CHECK(disk.at(x, y) == 0);
      if (r > 1.0 + 1e-9) CHECK(disk.at(x, y) > 0);
    }

  const Window wide{-2.5, 2.5, -1.5, 1.5};
  const auto seg = render_filled_julia({{-2.0}}, wide, 100, 60, 500, 0);
  const auto seg1 = render_filled_julia({{-2.0}}, wide, 100, 60, 500, 1);
  CHECK(seg.values == seg1.values);
  int bounded = 0;
  for (int y = 0; y < 60; ++y)
    for (int x = 0; x < 100; ++x) {
      if (seg.at(x, y) != 0) continue;
      ++bounded;
      // only pixels whose centre lies within a pixel or so of [-2, 2]
      const double im = 1.5 - (y + 0.5) * 3.0 / 60;
      CHECK(std::abs(im) < 0.1);
    }
  CHECK(bounded == 0);  // no pixel centre sits exactly on the segment

  const auto quick = render_filled_julia({{cplx{-0.1, 0.65}, 0.2}}, wide, 40, 30, 1, 2);
  for (auto v : quick.values) CHECK((v == 0 || v == 1));
  CHECK_THROWS_AS(render_filled_julia({{0.0}}, w, 0, 10, 5), std::invalid_argument);
}

TEST_CASE("polynomial roots") {
  // (z - 1)(z - 2)(z + i) = z^3 + (i - 3) z^2 + (2 - 3i) z + 2i
  const auto r = polynomial_roots({1.0, cplx{-3.0, 1.0}, cplx{2.0, -3.0}, cplx{0.0, 2.0}});
  REQUIRE(r.size() == 3);
  for (const cplx want : {cplx{1.0}, cplx{2.0}, cplx{0.0, -1.0}}) {
    double best = 1.0;
    for (const auto& z : r) best = std::min(best, std::abs(z - want));
    CHECK(best < 1e-12);
  }
}

TEST_CASE("B_n test") {
  SUBCASE("the n = 2 normal form") {
    const double v = 0.3;
    const auto res = bn_test(CoeffPoly{{1.0, 0.0, -2.0, 0.0, 1.0 + v}});
    REQUIRE(res.in_bn());
    REQUIRE(res.partition.size() == 2);
    CHECK(std::abs(res.critical_points[static_cast<std::size_t>(res.partition[0][0])]) < 1e-12);
    for (int i : res.partition[1]) CHECK(std::abs(std::abs(res.critical_points[static_cast<std::size_t>(i)]) - 1.0) < 1e-12);
    CHECK(std::abs(res.critical_values[static_cast<std::size_t>(res.partition[1][0])] - v) < 1e-12);
  }
  SUBCASE("degenerate critical point") {
    const auto res = bn_test(CoeffPoly{{1.0, 1.0, 0.0, 0.0, 0.0}});
    CHECK(res.failure == BnVerdict::Failure::Degenerate);
  }
  SUBCASE("compositions are in B_n, perturbations are not") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 60; ++trial) {
      const int n = 2 + trial % 2;
      TypeNPoly p;
      for (int i = 0; i < n; ++i) p.a.push_back(random_c(rng, 1.5));
      auto q = compose_coeffs(p);
      const auto res = bn_test(q);
      CHECK(res.in_bn());
      CHECK(res.partition.size() == static_cast<std::size_t>(n));

      auto tiny = q;
      for (std::size_t i = 1; i < tiny.coeffs.size(); ++i) tiny.coeffs[i] += random_c(rng, 1e-13);
      CHECK(bn_test(tiny).in_bn());

      auto moved = q;
      for (std::size_t i = 1; i < moved.coeffs.size(); ++i) moved.coeffs[i] += random_c(rng, 1e-2);
      CHECK_FALSE(bn_test(moved).in_bn());
    }
  }
  SUBCASE("for n = 2 membership implies decomposability") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      // monic quartics of the shape (z^2 + b)^2 + c z + v: in B_2 only when c = 0
      const cplx b = random_c(rng, 1.5);
      const cplx v = random_c(rng, 1.5);
      const cplx c = trial % 2 ? random_c(rng, 0.5) : cplx{};
      const CoeffPoly q{{1.0, 0.0, 2.0 * b, c, b * b + v}};
      if (bn_test(q).in_bn()) CHECK(decompose_coeffs(q));
    }
  }
  CHECK_THROWS_AS(bn_test(CoeffPoly{{3.0, 0.0, 1.0}}), NotMonicError);
  CHECK_THROWS_AS(bn_test(CoeffPoly{{1.0, 0.0, 0.0, 1.0}}), DegreeError);
}

TEST_CASE("normalization of the real family") {
  const auto one = normalize_to_poln({1.0});
  CHECK(normalization_alpha({1.0}) == doctest::Approx(-2.0));
  CHECK(std::abs(one.a[0] - cplx{-2.0}) < 1e-12);

  const auto half = normalize_to_poln({0.5});
  CHECK(normalization_alpha({0.5}) == doctest::Approx(-1.0));
  CHECK(std::abs(half.a[0]) < 1e-12);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.5, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a;
    for (int i = 0; i < 1 + trial % 4; ++i) a.push_back(trial % 3 ? u(rng) : -u(rng));
    const auto p = normalize_to_poln(a);
    for (const auto& c : p.a) CHECK(c.imag() == 0.0);
    // alpha f(x / alpha) = p(x) pointwise
    const double alpha = normalization_alpha(a);
    for (double x : {-0.7, 0.1, 0.9}) {
      double y = x;
      for (double ai : a) y = -2.0 * ai * y * y + 2.0 * ai - 1.0;
      const cplx want = alpha * y;
      const cplx got = eval_composition(p, alpha * x);
      CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
  CHECK_THROWS_AS(normalize_to_poln({0.7, 0.0}), ZeroParamError);
}
