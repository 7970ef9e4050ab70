#include <cmath>
#include <cstdlib>
#include <cstring>

#include "doctest.h"
#include "qpz/generators.hpp"
#include "qpz/kernels.hpp"
#include "qpz/quasipoly.hpp"

using namespace qpz;

namespace {

bool bit_equal(const std::vector<cd>& a, const std::vector<cd>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cd)) == 0;
}

}  // namespace

TEST_CASE("grid covering includes both edges") {
  const Grid g = Grid::covering(StripWindow(0, 1, 0, 2), 0.25);
  CHECK(g.n_re == 5);
  CHECK(g.n_im == 9);
  CHECK(g.point(0) == cd(0, 0));
  CHECK(g.point(g.size() - 1) == cd(1, 2));
  CHECK_THROWS_AS(Grid::covering(StripWindow(0, 1, 0, 1), 0.0), Error);
}

TEST_CASE("serial and parallel kernels are bit-identical") {
  const Quasipolynomial q = random_quasipolynomial(6, 3.0, 7);
  const Quasipolynomial r = random_quasipolynomial(6, 3.0, 8);
  const Grid g = Grid::covering(StripWindow(-2, 2, -10, 10), 0.05);
  CHECK(bit_equal(eval_grid(q, g, Exec::Serial), eval_grid(q, g, Exec::Parallel)));
  const double s1 = max_abs_diff(q, r, g, Exec::Serial);
  const double s2 = max_abs_diff(q, r, g, Exec::Parallel);
  CHECK(std::memcmp(&s1, &s2, sizeof s1) == 0);
  auto f = [&](cd z) { return std::abs(eval(q, z)); };
  CHECK(grid_max(g, f, Exec::Serial) == grid_max(g, f, Exec::Parallel));
  CHECK(grid_min(g, f, Exec::Serial) == grid_min(g, f, Exec::Parallel));
  std::vector<double> taus;
  for (int k = 0; k < 1000; ++k) taus.push_back(0.01 * k);
  auto cost = [](double t) { return std::sin(t) * std::exp(-t); };
  CHECK(scan_costs(taus, cost, Exec::Serial) == scan_costs(taus, cost, Exec::Parallel));
}

TEST_CASE("grid reductions skip NaN samples") {
  const Grid g = Grid::covering(StripWindow(0, 1, 0, 1), 0.5);
  auto f = [](cd z) { return z.real() == 0.5 ? std::nan("") : z.imag(); };
  CHECK(grid_max(g, f, Exec::Serial) == 1.0);
  CHECK(grid_min(g, f, Exec::Parallel) == 0.0);
}

TEST_CASE("QP_THREADS caps the team and selects the serial path at 1") {
  setenv("QP_THREADS", "1", 1);
  CHECK(configure_threads_from_env() == 1);
  CHECK(default_exec() == Exec::Serial);
  setenv("QP_THREADS", "4", 1);
  CHECK(configure_threads_from_env() == 4);
  CHECK(default_exec() == Exec::Parallel);
  setenv("QP_THREADS", "zero", 1);
  CHECK(configure_threads_from_env() == 0);
  unsetenv("QP_THREADS");
  set_thread_cap(0);
}
