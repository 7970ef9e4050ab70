#include <cmath>
#include <set>
#include <utility>

#include "doctest.h"
#include "qpz/generators.hpp"
#include "qpz/period_engine.hpp"
#include "qpz/zero_finder.hpp"

using namespace qpz;

TEST_CASE("alpha whitelist") {
  for (AlphaTag t : {AlphaTag::Sqrt2, AlphaTag::Sqrt3, AlphaTag::Golden, AlphaTag::InvSqrt2}) {
    CHECK(parse_alpha(alpha_name(t)) == t);
    const AlphaValues a = alpha_values(t);
    CHECK(std::fabs(a.sin * a.sin + a.cos * a.cos - 1.0L) < 1e-18L);
    CHECK(std::fabs(a.cos / a.sin - a.cot) < 1e-18L);
  }
  CHECK(!parse_alpha("pi").has_value());
  CHECK(alpha_values(AlphaTag::Golden).cot * alpha_values(AlphaTag::Golden).cot ==
        doctest::Approx(static_cast<double>(alpha_values(AlphaTag::Golden).cot) + 1.0));
}

TEST_CASE("example 1") {
  const Divisor d = example1(1, 5.0);
  REQUIRE(d.size() == 5);
  for (int n = -2; n <= 2; ++n) CHECK(d.points()[n + 2].point == cd(2.0, 2.0 * n));
  const Divisor e = example1(3, 64.0);
  std::set<double> cols;
  for (const auto& p : e.points()) cols.insert(p.point.real());
  CHECK(cols == std::set<double>{2.0, 4.0, 8.0});
  CHECK(e.size() == 65 + 33 + 17);
  CHECK(min_gap(difference_set(e, e, 64.0)).gap > 0.0);
  CHECK_THROWS_AS(example1(0, 5.0), Error);
}

TEST_CASE("example 2 matches an exhaustive lattice scan") {
  const double B = 20.0;
  const Divisor d = example2(AlphaTag::Sqrt2, B);
  const AlphaValues a = alpha_values(AlphaTag::Sqrt2);
  std::set<std::pair<long long, long long>> brute;
  const long long K = 40;  // |m|, |n| <= |z| <= sqrt(1 + B^2) < 21
  for (long long m = -K; m <= K; ++m) {
    for (long long n = -K; n <= K; ++n) {
      const long double re = m * a.cos - n * a.sin, im = m * a.sin + n * a.cos;
      if (std::fabs(re) < 1.0L && std::fabs(im) <= B) brute.insert({m, n});
    }
  }
  CHECK(d.size() == brute.size());
  for (const auto& p : d.points()) CHECK(std::abs(p.point.real()) < 1.0);
}

TEST_CASE("example 2 is stable under a larger bound") {
  const Divisor small = example2(AlphaTag::Golden, 30.0);
  const Divisor big = example2(AlphaTag::Golden, 90.0);
  const Divisor back = big.restricted(small.window());
  REQUIRE(back.size() == small.size());
  for (std::size_t k = 0; k < small.size(); ++k) CHECK(back.points()[k] == small.points()[k]);
}

TEST_CASE("example 2 has no exact period up to 50") {
  const Divisor d = example2(AlphaTag::Sqrt2, 100.0);
  const StripWindow win = d.window();
  int hits = 0;
  for (int k = 1; k <= 50000; ++k) hits += verify_period(d, 1e-3 * k, win, 1e-6) ? 1 : 0;
  CHECK(hits == 0);
}

TEST_CASE("kronecker solutions") {
  const KroneckerResult r = kronecker_solutions(AlphaTag::Sqrt2, 0.05, 10000);
  const AlphaValues a = alpha_values(AlphaTag::Sqrt2);
  bool has_zero = false;
  for (const auto& s : r.solutions) {
    CHECK(std::fabs(s.value) < 0.05L);
    has_zero = has_zero || (s.m == 0 && s.n == 0);
  }
  CHECK(has_zero);
  // Exhaustive over n near m cot alpha.
  std::set<std::pair<long long, long long>> brute, got;
  for (long long m = -10000; m <= 10000; ++m) {
    const auto c = static_cast<long long>(std::floor(m * a.cot));
    for (long long n = c - 2; n <= c + 3; ++n) {
      if (std::fabs(m * a.cos - n * a.sin) < 0.05L) brute.insert({m, n});
    }
  }
  for (const auto& s : r.solutions) got.insert({s.m, s.n});
  CHECK(got == brute);
  CHECK(r.max_gap > 0);
  CHECK(r.max_gap < 100);
  // Continued-fraction oracle: scanning accepted m > 0 upward, each new
  // record of |m cot a - n| is a best approximation, hence a convergent
  // denominator of sqrt 2; and every such denominator with a small enough
  // value is accepted.
  const std::set<long long> conv{1, 2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741};
  long double best = 1.0L;
  int records = 0;
  for (const auto& s : r.solutions) {
    if (s.m <= 0) continue;
    const long double e = std::fabs(s.m * a.cot - s.n);
    if (e < best) {
      best = e;
      ++records;
      CHECK(conv.count(s.m) == 1);
    }
  }
  CHECK(records >= 5);
  for (long long q : conv) {
    const long double v = std::fabs(q * a.cos - std::llround(q * a.cot) * a.sin);
    CHECK((v < 0.05L) == (got.count({q, std::llround(q * a.cot)}) == 1));
  }
}

TEST_CASE("almost periods from kronecker solutions") {
  CHECK(almost_period_from_solution(0, 0, AlphaTag::Sqrt2) == 0.0);
  const KroneckerResult r = kronecker_solutions(AlphaTag::Sqrt2, 0.05, 200);
  const Divisor d = example2(AlphaTag::Sqrt2, 200.0);
  const StripWindow inner(-0.9, 0.9, -50, 50);
  const AlphaValues a = alpha_values(AlphaTag::Sqrt2);
  const double slope = static_cast<double>(a.cos * a.cos / a.sin + a.sin);
  int checked = 0;
  for (const auto& s : r.solutions) {
    const double tau = almost_period_from_solution(s.m, s.n, AlphaTag::Sqrt2);
    CHECK(std::abs(tau - slope * s.m) < 0.05 * static_cast<double>(a.cot));
    if (std::abs(tau) > 140.0) continue;
    CHECK(is_almost_period(d, tau, 0.06, inner));
    ++checked;
  }
  CHECK(checked > 3);
}

TEST_CASE("random instances are reproducible") {
  const Quasipolynomial a = random_quasipolynomial(5, 3.0, 11), b = random_quasipolynomial(5, 3.0, 11);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.terms()[k].lambda == b.terms()[k].lambda);
    CHECK(a.terms()[k].coeff == b.terms()[k].coeff);
    CHECK(std::abs(a.terms()[k].coeff) >= 0.5);
    CHECK(std::abs(a.terms()[k].coeff) <= 2.0);
  }
  const PeriodicProductForm f = random_product_form(3, 4), g = random_product_form(3, 4);
  CHECK(f.offsets == g.offsets);
  CHECK(f.omega >= 0.7);
  CHECK(f.omega <= 1.5);
  CHECK_THROWS_AS(random_quasipolynomial(1, 1.0, 0), Error);
}

TEST_CASE("two-term quasipolynomials have the expected period") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Quasipolynomial q = random_quasipolynomial(2, 2.0, seed);
    const double dl = q.lambda_top() - q.lambda_bottom();
    const double T = 2 * kPi / dl;
    // a e^{l1 z} + b e^{l2 z} = 0 on Re z = log|b/a| / (l1 - l2), l1 > l2.
    const double x = std::log(std::abs(q.terms()[1].coeff / q.terms()[0].coeff)) / dl;
    const StripWindow win(x - 1, x + 1, 0.1, 0.1 + 40 * T);
    // Absolute residuals cannot beat rounding in the term sizes times the
    // height, so the tolerance follows that floor.
    double scale = 0.0;
    for (const Term& t : q.terms()) scale += std::abs(t.coeff) * std::exp(t.lambda * (x + 1));
    const double tol = 1e-13 * scale * (1.0 + win.im_max);
    const ZeroList zl = find_zeros(q, win, tol);
    CHECK(zl.total_multiplicity() == 40);
    const Divisor z = Divisor::from_zeros(zl);
    const StripWindow subs[] = {win};
    // Zero positions on a tall window carry errors of order eps * Im / dl,
    // so differences are matched at the cluster tolerance.
    DecomposeOptions opts;
    opts.extract.match_tol = kTolCluster;
    const DecomposeResult r = decompose(z, z, subs, {}, opts);
    CHECK(std::abs(r.z.parts[0].period - T) < 1e-11 * T);
  }
}
