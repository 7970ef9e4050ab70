#include <cmath>
#include <random>

#include "doctest.h"
#include "qpz/generators.hpp"
#include "qpz/quasipoly.hpp"

using namespace qpz;

namespace {

Quasipolynomial two_cosh() { return Quasipolynomial({{1.0, 1.0}, {-1.0, 1.0}}); }

}  // namespace

TEST_CASE("construction validates and sorts") {
  CHECK_THROWS_AS(Quasipolynomial({}), Error);
  CHECK_THROWS_AS(Quasipolynomial({{1.0, 1.0}, {1.0, 2.0}}), Error);
  CHECK_THROWS_AS(Quasipolynomial({{1.0, 0.0}}), Error);
  CHECK_THROWS_AS(Quasipolynomial({{NAN, 1.0}}), Error);
  const Quasipolynomial q({{-2.0, 1.0}, {3.0, cd(0, 1)}, {0.5, 2.0}});
  CHECK(q.lambda_top() == 3.0);
  CHECK(q.lambda_bottom() == -2.0);
  CHECK(q.terms()[1].lambda == 0.5);
  CHECK(q.max_coeff_abs() == 2.0);
}

TEST_CASE("evaluation matches 2cosh") {
  const Quasipolynomial q = two_cosh();
  for (cd z : {cd(0.3, 0.7), cd(-1.2, 5.0), cd(2.0, -3.0)}) {
    CHECK(std::abs(eval(q, z) - 2.0 * std::cosh(z)) < 1e-13 * std::abs(2.0 * std::cosh(z)) + 1e-15);
  }
}

TEST_CASE("scaled evaluation survives overflow") {
  const Quasipolynomial q = two_cosh();
  const ScaledValue v = eval_scaled(q, cd(800.0, 1.0));
  CHECK(std::isfinite(v.log_abs()));
  CHECK(v.log_abs() == doctest::Approx(800.0).epsilon(1e-12));
  CHECK(std::abs(std::arg(v.mantissa) - 1.0) < 1e-12);
  const ScaledValue w = eval_scaled(q, cd(-800.0, 1.0));
  CHECK(w.log_abs() == doctest::Approx(800.0).epsilon(1e-12));
}

TEST_CASE("derivative and translation") {
  CHECK_THROWS_AS(derivative(Quasipolynomial({{0.0, 3.0}})), Error);
  const Quasipolynomial q({{2.0, cd(1, 1)}, {0.0, 5.0}, {-1.0, 0.5}});
  const Quasipolynomial d = derivative(q);
  CHECK(d.size() == 2);
  const cd z(0.2, 0.4);
  const double h = 1e-6;
  const cd fd = (eval(q, z + h) - eval(q, z - h)) / (2 * h);
  CHECK(std::abs(eval(d, z) - fd) < 1e-7);
  const Quasipolynomial t = translate(q, 1.3);
  CHECK(std::abs(eval(t, z) - eval(q, z + cd(0, 1.3))) < 1e-13);
}

TEST_CASE("product expansion: 2cosh") {
  PeriodicProductForm f;
  f.c = 2.0;
  f.offsets = {0.0};
  const Quasipolynomial q = expand_product(f);
  REQUIRE(q.size() == 2);
  CHECK(q.terms()[0].lambda == 1.0);
  CHECK(q.terms()[1].lambda == -1.0);
  CHECK(std::abs(q.terms()[0].coeff - 1.0) < 1e-15);
  CHECK(std::abs(q.terms()[1].coeff - 1.0) < 1e-15);
}

TEST_CASE("product expansion agrees with direct product evaluation") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const PeriodicProductForm f = random_product_form(1 + static_cast<int>(seed % 3), seed);
    const Quasipolynomial q = expand_product(f);
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int k = 0; k < 20; ++k) {
      const cd z(u(g), 4 * u(g));
      const cd direct = f.eval(z);
      CHECK(std::abs(eval(q, z) - direct) < 1e-12 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("cancelled exponents are dropped with a warning") {
  PeriodicProductForm f;
  f.offsets = {0.0, cd(0.0, kPi / 2)};
  std::vector<std::string> warnings;
  const Quasipolynomial q = expand_product(f, &warnings);
  CHECK(q.size() == 2);
  CHECK(warnings.size() == 1);
}

TEST_CASE("canonical form keeps the function") {
  PeriodicProductForm f;
  f.c = cd(1.0, -0.5);
  f.beta = 0.2;
  f.omega = -1.3;
  f.offsets = {cd(0.4, 4.0), cd(-0.3, -1.0)};
  const PeriodicProductForm c = canonical(f);
  CHECK(c.omega > 0.0);
  for (cd b : c.offsets) {
    CHECK(b.imag() >= 0.0);
    CHECK(b.imag() < kPi);
  }
  CHECK(c.offsets[0].real() <= c.offsets[1].real());
  for (cd z : {cd(0.1, 0.2), cd(-0.7, 3.0)}) CHECK(std::abs(c.eval(z) - f.eval(z)) < 1e-12 * std::abs(f.eval(z)));
  CHECK_THROWS_AS(canonical(PeriodicProductForm{1.0, 0.0, 0.0, {0.0}}), Error);
}

TEST_CASE("canonical offsets near a multiple of pi") {
  // Im b a hair below 0 or below pi: both are the class of 0 and the
  // function must survive the wrap.
  for (double im : {-1e-15, kPi - 1e-15, -kPi - 1e-15}) {
    PeriodicProductForm f;
    f.c = cd(2.0, 0.0);
    f.omega = 1.0;
    f.offsets = {cd(0.1, im)};
    const PeriodicProductForm c = canonical(f);
    CHECK(c.offsets[0].imag() == 0.0);
    for (cd z : {cd(0.3, 0.4), cd(-0.5, 2.0)}) CHECK(std::abs(c.eval(z) - f.eval(z)) < 1e-12 * std::abs(f.eval(z)));
  }
}

TEST_CASE("sup_diff and its bound") {
  const StripWindow w(-1, 1, 0, 5);
  const Quasipolynomial a = two_cosh();
  const Quasipolynomial b({{1.0, 1.0}, {-1.0, 1.0 + 1e-6}});
  CHECK(sup_diff(a, a, w, default_grid_step(w)) == 0.0);
  const double s = sup_diff(a, b, w, default_grid_step(w));
  // |1e-6 e^{-z}| is largest at Re z = -1.
  CHECK(s == doctest::Approx(1e-6 * std::exp(1.0)).epsilon(1e-9));
  CHECK(sup_diff_bound(a, b, w, default_grid_step(w)) >= s);
}
