#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpz/common.hpp"
#include "qpz/kernels.hpp"
#include "qpz/quasipoly.hpp"
#include "qpz/zero_finder.hpp"

namespace qpz {

// Where an offset's vertical line sits relative to the factor's window.
// Right: series in w = exp(2 pi z / T); Left: series in 1/w.
enum class OffsetSide { Inside, Right, Left };

std::string_view side_name(OffsetSide s);

struct TailCorrection {
  OffsetSide side = OffsetSide::Right;
  // Q(z) = sum_{m=1..d} coeffs[m-1] * u^m with u = w (Right) or 1/w (Left).
  std::vector<cd> coeffs;
  double bound = 0.0;  // certified sup |log h - Q| on the region
  double ratio = 0.0;  // geometric ratio of the series on the region
};

inline constexpr double kDefaultBudget = 1e-6;
inline constexpr double kOffsetEdgeTol = 1e-9;

/// Truncated series of log(1 - u c) at the smallest degree whose geometric
/// tail bound ratio^{d+1} / ((d+1)(1-ratio)) is below eps. `radius` bounds
/// |u| on the region. eps = +inf gives the empty polynomial with the bound
/// -log(1 - ratio). Throws RadiusTooLarge when ratio >= 1.
TailCorrection tail_correction(cd a, double T, double radius, double eps, OffsetSide side);

struct PeriodicFactor {
  double period = 0.0;
  std::vector<cd> offsets;  // 0 <= Im a < T
  std::vector<TailCorrection> corrections;  // one per offset; empty coeffs for Inside
  StripWindow window;  // window the orientation refers to

  /// prod_j h_j(w) exp(-Q_j), with h_j = 1 - w exp(-2 pi a_j / T) for Inside
  /// and Right offsets and 1 - exp(2 pi a_j / T) / w for Left ones.
  cd eval(cd z) const;
  /// The j-th factor h_j exp(-Q_j).
  cd eval_offset(std::size_t j, cd z) const;
  /// Something with the phase of eval(z) and a magnitude that cannot overflow.
  cd phase_value(cd z) const;
};

/// eps_budget: one entry per offset, a single entry applied to all, or empty
/// (kDefaultBudget split evenly). Offsets are reduced to 0 <= Im a < T.
PeriodicFactor build_factor(std::span<const cd> offsets, double T, const StripWindow& window,
                            std::span<const double> eps_budget = {});

/// Max of | |h_j exp(-Q_j)| - 1 | over about `samples` points of
/// Re in window x Im in [0, T), for every corrected offset. Throws
/// BoundViolated when a modulus leaves (exp(-bound_j), exp(bound_j)).
double verify_tail_bound(const PeriodicFactor& factor, const StripWindow& window, int samples,
                         Exec exec = default_exec());

struct QuotientCertificate {
  double min_modulus = 0.0;
  int zero_count = 0;
  int f_zeros = 0;       // with multiplicity
  int factor_zeros = 0;  // with multiplicity
  std::size_t grid_points = 0;
  double exclusion_radius = 0.0;
  bool passed = false;
};

struct QuotientOptions {
  double tol_zero = kDefaultTolZero;
  double match_tol = 1e-7;  // factor zero vs zero of f
  double grid_step = 0.0;   // 0: window diameter / 256
  WindingOptions winding;
  Exec exec = default_exec();
};

QuotientCertificate quotient_certify(const Quasipolynomial& f, std::span<const PeriodicFactor> factors,
                                     const StripWindow& window, const QuotientOptions& opts = {});

struct LineCluster {
  double re = 0.0;
  int count = 0;       // zeros on the line, with multiplicity
  double spacing = 0.0;  // 0 when the line has a single zero in the window
};

struct FitResult {
  PeriodicProductForm form;
  double residual = 0.0;
  std::vector<LineCluster> clusters;
};

FitResult fit_cosh_form(const Quasipolynomial& qp, const ZeroList& zeros, const StripWindow& window);

}  // namespace qpz
