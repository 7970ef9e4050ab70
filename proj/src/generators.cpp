#include "qpz/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qpz {

namespace {

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

cd annulus_coeff(std::mt19937_64& g) {
  const double r = 0.5 + 1.5 * uniform01(g);
  const double th = 2.0 * kPi * uniform01(g);
  return std::polar(r, th);
}

}  // namespace

std::string_view alpha_name(AlphaTag tag) {
  switch (tag) {
    case AlphaTag::Sqrt2: return "sqrt2";
    case AlphaTag::Sqrt3: return "sqrt3";
    case AlphaTag::Golden: return "golden";
    case AlphaTag::InvSqrt2: return "inv_sqrt2";
  }
  return "sqrt2";
}

std::optional<AlphaTag> parse_alpha(std::string_view name) {
  for (AlphaTag t : {AlphaTag::Sqrt2, AlphaTag::Sqrt3, AlphaTag::Golden, AlphaTag::InvSqrt2}) {
    if (alpha_name(t) == name) return t;
  }
  return std::nullopt;
}

AlphaValues alpha_values(AlphaTag tag) {
  long double c = 0.0L;
  switch (tag) {
    case AlphaTag::Sqrt2: c = std::sqrt(2.0L); break;
    case AlphaTag::Sqrt3: c = std::sqrt(3.0L); break;
    case AlphaTag::Golden: c = (1.0L + std::sqrt(5.0L)) / 2.0L; break;
    case AlphaTag::InvSqrt2: c = 1.0L / std::sqrt(2.0L); break;
  }
  const long double r = std::sqrt(1.0L + c * c);
  return {c, 1.0L / r, c / r};
}

Divisor example1(int k_max, double im_bound) {
  if (k_max < 1 || k_max > 30) throw Error(ErrorCode::InvalidArgument, "k_max must lie in [1, 30]");
  if (!(im_bound >= 0.0)) throw Error(ErrorCode::InvalidArgument, "im_bound must be non-negative");
  std::vector<DivisorPoint> pts;
  for (int k = 1; k <= k_max; ++k) {
    const double step = std::ldexp(1.0, k);
    const auto n_max = static_cast<std::int64_t>(std::floor(im_bound / step));
    for (std::int64_t n = -n_max; n <= n_max; ++n) pts.push_back({cd(step, static_cast<double>(n) * step), 1});
  }
  const double pad = 1e-9 * std::max(1.0, im_bound);
  return Divisor(std::move(pts), StripWindow(1.0, std::ldexp(1.0, k_max) + 1.0, -im_bound - pad, im_bound + pad));
}

Divisor example2(AlphaTag tag, double im_bound) {
  return example2(RotatedLattice{tag, 1.0, im_bound});
}

Divisor example2(const RotatedLattice& lat) {
  if (!(lat.im_bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "im_bound must be positive");
  if (!(lat.strip_halfwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "strip half-width must be positive");
  const AlphaValues a = alpha_values(lat.alpha);
  const long double h = lat.strip_halfwidth, B = lat.im_bound;
  // m = Re cos + Im sin, n = Im cos - Re sin on the rotated-back lattice.
  const auto M = static_cast<std::int64_t>(std::ceil(h * a.cos + B * a.sin));
  std::vector<DivisorPoint> pts;
  for (std::int64_t m = -M; m <= M; ++m) {
    const long double mc = m * a.cos;
    const auto n0 = static_cast<std::int64_t>(std::floor((mc - h) / a.sin)) - 1;
    const auto n1 = static_cast<std::int64_t>(std::ceil((mc + h) / a.sin)) + 1;
    for (std::int64_t n = n0; n <= n1; ++n) {
      const long double re = mc - n * a.sin;
      const long double im = m * a.sin + n * a.cos;
      if (!(std::fabs(re) < h) || !(std::fabs(im) <= B)) continue;
      const cd p(static_cast<double>(re), static_cast<double>(im));
      if (std::abs(p.real()) >= lat.strip_halfwidth) continue;
      pts.push_back({p, 1});
    }
  }
  return Divisor(std::move(pts),
                 StripWindow(-lat.strip_halfwidth, lat.strip_halfwidth, -lat.im_bound, lat.im_bound));
}

KroneckerResult kronecker_solutions(AlphaTag tag, double delta, std::int64_t m_max) {
  if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  if (m_max < 0) throw Error(ErrorCode::InvalidArgument, "m_max must be non-negative");
  const AlphaValues a = alpha_values(tag);
  KroneckerResult out;
  for (std::int64_t m = -m_max; m <= m_max; ++m) {
    const std::int64_t n = std::llround(m * a.cot);
    const long double v = m * a.cos - n * a.sin;
    if (std::fabs(v) < delta) out.solutions.push_back({m, n, v});
  }
  for (std::size_t k = 1; k < out.solutions.size(); ++k) {
    out.max_gap = std::max(out.max_gap, out.solutions[k].m - out.solutions[k - 1].m);
  }
  return out;
}

double almost_period_from_solution(std::int64_t m, std::int64_t n, AlphaTag tag) {
  const AlphaValues a = alpha_values(tag);
  return static_cast<double>(m * a.sin + n * a.cos);
}

Quasipolynomial random_quasipolynomial(int n_terms, double lambda_span, std::uint64_t seed) {
  if (n_terms < 2) throw Error(ErrorCode::InvalidArgument, "n_terms must be at least 2");
  if (!(lambda_span > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_span must be positive");
  std::mt19937_64 g(seed);
  std::vector<double> lambdas;
  while (static_cast<int>(lambdas.size()) < n_terms) {
    const double l = lambda_span * (2.0 * uniform01(g) - 1.0);
    if (std::find(lambdas.begin(), lambdas.end(), l) == lambdas.end()) lambdas.push_back(l);
  }
  std::sort(lambdas.begin(), lambdas.end());
  std::vector<Term> terms;
  for (double l : lambdas) terms.push_back({l, annulus_coeff(g)});
  return Quasipolynomial(std::move(terms));
}

PeriodicProductForm random_product_form(int n_lines, std::uint64_t seed) {
  if (n_lines < 1 || n_lines > 8) throw Error(ErrorCode::InvalidArgument, "n_lines must lie in [1, 8]");
  std::mt19937_64 g(seed);
  PeriodicProductForm f;
  f.omega = 0.7 + 0.8 * uniform01(g);
  f.beta = uniform01(g) - 0.5;
  f.c = annulus_coeff(g);
  // One line per slot of width 1.6/n inside (-0.8, 0.8), jittered within the
  // middle half of the slot.
  const double slot = 1.6 / n_lines;
  for (int k = 0; k < n_lines; ++k) {
    const double x = -0.8 + slot * (k + 0.25 + 0.5 * uniform01(g));
    const double ib = kPi * uniform01(g);
    f.offsets.emplace_back(-x * f.omega, ib);
  }
  return canonical(f);
}

}  // namespace qpz
