#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "qpz/divisor.hpp"
#include "qpz/generators.hpp"

using namespace qpz;

namespace {

// Points x + i(offset + step n) with |Im| <= bound.
Divisor progression(double step, double bound, double x = 0.0, double offset = 0.0, int mult = 1) {
  std::vector<DivisorPoint> pts;
  const int n = static_cast<int>(std::floor(bound / step)) + 2;
  for (int k = -n; k <= n; ++k) {
    const double y = offset + step * k;
    if (std::abs(y) <= bound) pts.push_back({cd(x, y), mult});
  }
  return Divisor(pts, StripWindow(-1, 1, -bound, bound));
}

}  // namespace

TEST_CASE("divisor validation") {
  const StripWindow w(-1, 1, 0, 1);
  CHECK_THROWS_AS(Divisor({{cd(0, 0.5), 0}}, w), Error);
  CHECK_THROWS_AS(Divisor({{cd(2, 0.5), 1}}, w), Error);
  CHECK_THROWS_AS(Divisor({{cd(1, 0.5), 1}}, w), Error);  // open in Re
  CHECK_NOTHROW(Divisor({{cd(0, 1.0), 1}}, w));           // closed in Im
  CHECK_THROWS_AS(Divisor({{cd(0, 0.5), 1}, {cd(0, 0.5), 1}}, w), Error);
  const Divisor d({{cd(0, 0.9), 1}, {cd(0.5, 0.1), 2}, {cd(0, 0.1), 1}}, w);
  CHECK(d.points()[0].point == cd(0, 0.1));
  CHECK(d.total_multiplicity() == 4);
  CHECK(d.min_separation() == doctest::Approx(0.5));
  CHECK(d.nearest(cd(0.4, 0.1), 0.2).value() == 1);
  CHECK(!d.nearest(cd(0.25, 0.5), 0.2).has_value());
}

TEST_CASE("difference set against brute force") {
  const Divisor z = example2(AlphaTag::Sqrt2, 6.0);
  const Divisor w = progression(kPi, 6.0, 0.3);
  const std::vector<cd> d = difference_set(z, w, 4.0);
  std::vector<cd> brute;
  for (const auto& a : z.points()) {
    for (const auto& b : w.points()) {
      const cd x = a.point - b.point;
      if (std::abs(x.imag()) > 4.0) continue;
      if (std::none_of(brute.begin(), brute.end(), [&](cd y) { return std::abs(x - y) <= 1e-12; })) brute.push_back(x);
    }
  }
  CHECK(d.size() == brute.size());
  for (cd x : brute) {
    CHECK(std::any_of(d.begin(), d.end(), [&](cd y) { return std::abs(x - y) <= 1e-12; }));
  }
  CHECK(std::is_sorted(d.begin(), d.end(), im_re_less));
}

TEST_CASE("min gap") {
  const std::vector<cd> one{cd(0, 1)};
  CHECK_THROWS_AS(min_gap(one), Error);
  const std::vector<cd> three{cd(0, 0), cd(0, 3), cd(0, 0.75)};
  const MinGap g = min_gap(three);
  CHECK(g.gap == doctest::Approx(0.75));
  CHECK(g.gamma == 0.5);
}

TEST_CASE("translation matching on a progression") {
  const Divisor z = progression(kPi, 60.0);
  const StripWindow inner(-0.9, 0.9, -20, 20);
  const MatchResult m = match_translation(z, kPi, 0.05, inner);
  CHECK(m.ok);
  CHECK(m.certified);
  CHECK(m.max_displacement < 1e-12);
  CHECK(!is_almost_period(z, kPi / 2, 0.05, inner));
  CHECK(is_almost_period(z, 3 * kPi + 0.04, 0.05, inner));
  CHECK(!is_almost_period(z, 3 * kPi + 0.06, 0.05, inner));
  CHECK_THROWS_AS(match_translation(z, 45.0, 0.05, inner), Error);
}

TEST_CASE("matching respects multiplicities") {
  std::vector<DivisorPoint> pts;
  for (int k = -10; k <= 10; ++k) pts.push_back({cd(0, 2.0 * k), k % 2 == 0 ? 2 : 1});
  const Divisor z(pts, StripWindow(-1, 1, -20, 20));
  const StripWindow inner(-0.5, 0.5, -8, 8);
  CHECK(is_almost_period(z, 4.0, 0.1, inner));
  CHECK(!is_almost_period(z, 2.0, 0.1, inner));
}

TEST_CASE("almost-period scan of a progression") {
  const Divisor z = progression(kPi, 60.0, 0.0, 0.5);
  const StripWindow inner(-0.9, 0.9, -25, 25);
  const AlmostPeriodReport r = scan_almost_periods(z, 0.05, inner, 30.0, 0.0125, Exec::Serial);
  REQUIRE(r.taus.size() == 19);
  for (std::size_t k = 0; k < r.taus.size(); ++k) {
    CHECK(std::abs(r.taus[k] - kPi * (static_cast<double>(k) - 9.0)) < 1e-9);
    CHECK(r.taus[k] == -r.taus[r.taus.size() - 1 - k]);
  }
  CHECK(r.density_gap == doctest::Approx(kPi).epsilon(1e-9));
  const AlmostPeriodReport p = scan_almost_periods(z, 0.05, inner, 30.0, 0.0125, Exec::Parallel);
  CHECK(p.taus == r.taus);
  CHECK(p.displacements == r.displacements);
  CHECK_THROWS_AS(scan_almost_periods(z, 0.05, inner, 30.0, 0.02), Error);
}

TEST_CASE("common almost periods of two progressions") {
  const Divisor z = progression(2.0, 60.0, 0.0);
  const Divisor w = progression(3.0, 60.0, 0.5);
  const AlmostPeriodReport r = common_almost_periods(z, w, 0.05, StripWindow(-0.9, 0.9, -20, 20), 30.0, 0.0125);
  std::vector<double> want;
  for (int k = -5; k <= 5; ++k) want.push_back(6.0 * k);
  REQUIRE(r.taus.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(r.taus[k] - want[k]) < 1e-9);
}

TEST_CASE("almost periods of a progression close under sum and difference") {
  const Divisor z = progression(kPi, 80.0);
  const StripWindow inner(-0.8, 0.8, -10, 10);
  CHECK(lemma1_check(z, 2 * kPi + 0.01, kPi - 0.01, 0.05, inner));
  CHECK_THROWS_AS(lemma1_check(z, 2 * kPi + 0.2, kPi, 0.05, inner), Error);
}

TEST_CASE("common density gap stays under the bound") {
  const int cls[] = {0, -1, 2};
  CHECK(lemma2_gap_bound(1.5, 0.1, cls) == doctest::Approx(6.0));
  CHECK_THROWS_AS(lemma2_gap_bound(1.0, 0.1, std::span<const int>()), Error);
  const Divisor z = progression(kPi, 80.0);
  const Divisor w = progression(kPi, 80.0, 0.5, 1.0);
  const StripWindow inner(-0.9, 0.9, -20, 20);
  const AlmostPeriodReport rz = scan_almost_periods(z, 0.05, inner, 30.0, 0.0125);
  const AlmostPeriodReport rw = scan_almost_periods(w, 0.05, inner, 30.0, 0.0125);
  const std::vector<int> classes = lemma2_classes(rz, rw, kPi, 0.05);
  REQUIRE(!classes.empty());
  CHECK(classes[0] == 0);
  CHECK(lemma2_gap_bound(kPi, 0.05, classes) >= kPi);
}
