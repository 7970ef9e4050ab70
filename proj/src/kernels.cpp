#include "qpz/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include <omp.h>

#include "qpz/quasipoly.hpp"

namespace qpz {

namespace {
int g_thread_cap = 0;
}

void set_thread_cap(int n) {
  g_thread_cap = n > 0 ? n : 0;
  omp_set_num_threads(n > 0 ? n : omp_get_num_procs());
}

int configure_threads_from_env() {
  const char* raw = std::getenv("QP_THREADS");
  if (raw == nullptr) return 0;
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (end == raw || *end != '\0' || n <= 0 || n > 4096) return 0;
  set_thread_cap(static_cast<int>(n));
  return static_cast<int>(n);
}

Exec default_exec() { return g_thread_cap == 1 ? Exec::Serial : Exec::Parallel; }

Grid Grid::covering(const StripWindow& w, double step) {
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid step must be positive");
  Grid g;
  g.window = w;
  g.n_re = static_cast<std::size_t>(std::ceil(w.width() / step)) + 1;
  g.n_im = static_cast<std::size_t>(std::ceil(w.height() / step)) + 1;
  return g;
}

cd Grid::point(std::size_t k) const {
  const std::size_t i = k % n_re;
  const std::size_t j = k / n_re;
  const double x = n_re == 1 ? window.re_min
                             : window.re_min + window.width() * static_cast<double>(i) / (n_re - 1);
  const double y = n_im == 1 ? window.im_min
                             : window.im_min + window.height() * static_cast<double>(j) / (n_im - 1);
  return {x, y};
}

void parallel_fill(std::size_t n, const std::function<double(std::size_t)>& fn,
                   std::vector<double>& out, Exec exec) {
  out.assign(n, 0.0);
  if (exec == Exec::Serial) {
    for (std::size_t k = 0; k < n; ++k) out[k] = fn(k);
    return;
  }
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) out[k] = fn(static_cast<std::size_t>(k));
}

std::vector<cd> eval_grid(const Quasipolynomial& qp, const Grid& grid, Exec exec) {
  std::vector<cd> out(grid.size());
  const auto count = static_cast<std::ptrdiff_t>(grid.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t k = 0; k < count; ++k) out[k] = eval(qp, grid.point(k));
    return out;
  }
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < count; ++k) out[k] = eval(qp, grid.point(k));
  return out;
}

double max_abs_diff(const Quasipolynomial& f, const Quasipolynomial& g, const Grid& grid,
                    Exec exec) {
  return grid_max(grid, [&](cd z) { return std::abs(eval(f, z) - eval(g, z)); }, exec);
}

double grid_max(const Grid& grid, const std::function<double(cd)>& fn, Exec exec) {
  std::vector<double> vals;
  parallel_fill(grid.size(), [&](std::size_t k) { return fn(grid.point(k)); }, vals, exec);
  double best = 0.0;
  for (double v : vals) {
    if (!std::isnan(v) && v > best) best = v;
  }
  return best;
}

double grid_min(const Grid& grid, const std::function<double(cd)>& fn, Exec exec) {
  std::vector<double> vals;
  parallel_fill(grid.size(), [&](std::size_t k) { return fn(grid.point(k)); }, vals, exec);
  double best = std::numeric_limits<double>::infinity();
  for (double v : vals) {
    if (!std::isnan(v) && v < best) best = v;
  }
  return best;
}

std::vector<double> scan_costs(const std::vector<double>& taus,
                               const std::function<double(double)>& cost, Exec exec) {
  std::vector<double> out;
  parallel_fill(taus.size(), [&](std::size_t k) { return cost(taus[k]); }, out, exec);
  return out;
}

}  // namespace qpz
