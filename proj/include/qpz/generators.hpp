#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "qpz/divisor.hpp"
#include "qpz/quasipoly.hpp"

namespace qpz {

// Rotation angles are only accepted through their cotangent, drawn from a
// fixed list of quadratic irrationals.
enum class AlphaTag { Sqrt2, Sqrt3, Golden, InvSqrt2 };

std::string_view alpha_name(AlphaTag tag);
std::optional<AlphaTag> parse_alpha(std::string_view name);

struct AlphaValues {
  long double cot = 0.0L;
  long double sin = 0.0L;
  long double cos = 0.0L;
};

/// sin = 1/sqrt(1+c^2), cos = c/sqrt(1+c^2) for c = cot alpha.
AlphaValues alpha_values(AlphaTag tag);

struct RotatedLattice {
  AlphaTag alpha = AlphaTag::Sqrt2;
  double strip_halfwidth = 1.0;
  double im_bound = 0.0;
};

/// Columns 2^k + i n 2^k for 1 <= k <= k_max and |n 2^k| <= im_bound, in the
/// window Re in (1, 2^k_max + 1).
Divisor example1(int k_max, double im_bound);

/// Lattice points (m + i n) e^{i alpha} with |Re| < 1 and |Im| <= im_bound.
Divisor example2(AlphaTag tag, double im_bound);
Divisor example2(const RotatedLattice& lattice);

struct KroneckerSolution {
  std::int64_t m = 0;
  std::int64_t n = 0;
  long double value = 0.0L;  // m cos alpha - n sin alpha
};

struct KroneckerResult {
  std::vector<KroneckerSolution> solutions;  // ascending m
  std::int64_t max_gap = 0;                  // between consecutive accepted m
};

/// All |m| <= m_max with |m cos alpha - n sin alpha| < delta, n the nearest
/// integer to m cot alpha.
KroneckerResult kronecker_solutions(AlphaTag tag, double delta, std::int64_t m_max);

/// tau = m sin alpha + n cos alpha.
double almost_period_from_solution(std::int64_t m, std::int64_t n, AlphaTag tag);

/// Frequencies uniform in [-lambda_span, lambda_span], coefficients on the
/// annulus 0.5 <= |a| <= 2; reproducible from the seed.
Quasipolynomial random_quasipolynomial(int n_terms, double lambda_span, std::uint64_t seed);

/// n_lines cosh factors on distinct vertical lines inside Re in (-1, 1),
/// omega in [0.7, 1.5], beta in [-0.5, 0.5], C on the annulus.
PeriodicProductForm random_product_form(int n_lines, std::uint64_t seed);

}  // namespace qpz
