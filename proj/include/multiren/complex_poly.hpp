#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace multiren {

using cplx = std::complex<double>;

/// p = P_{a_n} o ... o P_{a_1} with P_a(z) = z^2 + a; a_1 acts first.
struct TypeNPoly {
  std::vector<cplx> a;
  int n() const { return static_cast<int>(a.size()); }
};

/// Monic polynomial of degree 2^n, coefficients from the leading one down:
/// coeffs[0] = 1 multiplies z^{2^n}, coeffs.back() is the constant term.
struct CoeffPoly {
  std::vector<cplx> coeffs;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  cplx eval(cplx z) const;
};

CoeffPoly compose_coeffs(const TypeNPoly& p);

/// Solves the triangular system for a_1, a_2, ... one coefficient at a time
/// and re-composes; nullopt when the result does not reproduce q within
/// 1e-9 (relative to the largest coefficient). Throws NotMonicError,
/// DegreeError.
std::optional<TypeNPoly> decompose_coeffs(const CoeffPoly& q);

/// max(4, |a_1|, ..., |a_n|): past this modulus every factor at least
/// doubles |z|.
double escape_radius(const TypeNPoly& p);

/// p(z) through the factors, one step per factor.
cplx eval_composition(const TypeNPoly& p, cplx z);

struct ConnectivityVerdict {
  enum class Kind { Connected, Disconnected, Undecided };
  Kind kind = Kind::Undecided;
  /// Factor step at which a critical orbit left the escape disk
  /// (disconnected only); 0 when the |a_i| >= 4 filter decided.
  long step = 0;
  /// Which critical orbit, as the copy 1..n of its critical point.
  int copy = 0;
};

std::string to_string(ConnectivityVerdict::Kind k);

/// Follows the critical point 0 of every factor through the factor cycle for
/// cap full turns. Escape is certain; staying bounded is not, so a bounded
/// run is reported Connected only when every critical orbit has settled on
/// a cycle of at most 64 turns (to 1e-9), and Undecided otherwise.
ConnectivityVerdict is_connected(const TypeNPoly& p, long cap);

/// is_connected over many parameter vectors, in parallel, results in input
/// order.
std::vector<ConnectivityVerdict> connectivity_grid(const std::vector<TypeNPoly>& ps, long cap, int threads = 0);

struct Window {
  double re_min = -2.0;
  double re_max = 2.0;
  double im_min = -2.0;
  double im_max = 2.0;
};

struct Raster {
  int width = 0;
  int height = 0;
  Window window;
  long cap = 0;
  /// Row-major from the top row (largest imaginary part); 0 = bounded for
  /// cap iterations of p, otherwise the iteration of p during which the
  /// orbit left the escape disk.
  std::vector<std::int32_t> values;
  std::int32_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)]; }
};

/// Pixel centres are sampled; rows run in parallel.
Raster render_filled_julia(const TypeNPoly& p, const Window& w, int width, int height, long cap, int threads = 0);

/// Roots of a polynomial given leading coefficient first, by Aberth
/// iteration (200 sweeps, corrections below 1e-12). Throws RootFindingError.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

struct BnVerdict {
  enum class Failure { None, Degenerate, ValueCount, Partition };
  Failure failure = Failure::None;
  bool in_bn() const { return failure == Failure::None; }
  std::string detail;
  std::vector<cplx> critical_points;
  std::vector<cplx> critical_values;
  /// Critical point taken as the distinguished one (nearest to 0).
  int distinguished = -1;
  /// L_0, ..., L_{n-1} as indices into critical_points.
  std::vector<std::vector<int>> partition;
};

std::string to_string(BnVerdict::Failure f);

/// Membership in B_n: 2^n - 1 distinct critical points (closer than 1e-8
/// counts as degenerate), exactly n critical values, and a partition
/// L_0, ..., L_{n-1} of the critical points with |L_i| = 2^i,
/// L_0 = {distinguished} and each q(L_i) a single value. Throws NotMonicError,
/// DegreeError, RootFindingError.
BnVerdict bn_test(const CoeffPoly& q);

/// alpha f(z / alpha) for f = f_{a_n} o ... o f_{a_1} with f_a(x) =
/// -2a x^2 + 2a - 1, written as a composition of z^2 + c_i. alpha is the
/// real root of alpha^{2^n - 1} = -2^{2^n - 1} a_1^{2^{n-1}} ... a_n^1
/// (a_1 acts first here, so it carries the largest power). Throws
/// ZeroParamError, VerificationError if the expansion check fails.
TypeNPoly normalize_to_poln(const std::vector<double>& a);

/// The scaling alpha used by normalize_to_poln.
double normalization_alpha(const std::vector<double>& a);

}  // namespace multiren
