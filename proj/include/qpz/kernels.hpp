#pragma once

// Data-parallel inner loops. Every kernel has a plain serial path kept as the
// reference implementation; the OpenMP path writes each result into its own
// slot and reductions happen afterwards in index order, so both paths give
// bit-identical output.

#include <cstddef>
#include <functional>
#include <vector>

#include "qpz/common.hpp"

namespace qpz {

class Quasipolynomial;

enum class Exec { Serial, Parallel };

/// Default policy for library calls; Parallel unless QP_THREADS=1.
Exec default_exec();

/// Reads QP_THREADS and caps the OpenMP team size. Returns the cap in force
/// (0 when the variable is unset or invalid).
int configure_threads_from_env();

/// Caps the OpenMP team size; n <= 0 restores the runtime default.
void set_thread_cap(int n);

/// Closed rectangular grid of pitch <= step covering a window, row-major in
/// Im then Re.
struct Grid {
  StripWindow window;
  std::size_t n_re = 0;
  std::size_t n_im = 0;

  static Grid covering(const StripWindow& w, double step);
  std::size_t size() const { return n_re * n_im; }
  cd point(std::size_t k) const;
};

/// out[k] = fn(k) for k in [0, n).
void parallel_fill(std::size_t n, const std::function<double(std::size_t)>& fn,
                   std::vector<double>& out, Exec exec);

std::vector<cd> eval_grid(const Quasipolynomial& qp, const Grid& grid, Exec exec);

/// max_k |f(p_k) - g(p_k)| over the grid.
double max_abs_diff(const Quasipolynomial& f, const Quasipolynomial& g, const Grid& grid,
                    Exec exec);

/// Generic sampled maximum of a real-valued function over a grid; NaN
/// samples are skipped.
double grid_max(const Grid& grid, const std::function<double(cd)>& fn, Exec exec);
double grid_min(const Grid& grid, const std::function<double(cd)>& fn, Exec exec);

/// costs[j] = cost(tau_j) for the given tau values.
std::vector<double> scan_costs(const std::vector<double>& taus,
                               const std::function<double(double)>& cost, Exec exec);

}  // namespace qpz
