#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qpz/common.hpp"
#include "qpz/kernels.hpp"
#include "qpz/quasipoly.hpp"

namespace qpz {

struct ZeroEntry {
  cd point;
  int multiplicity = 1;
  double residual = 0.0;  // |Q(point)|
};

struct ZeroList {
  std::vector<ZeroEntry> entries;  // sorted by (Im, Re)
  StripWindow window;
  double tol_zero = kDefaultTolZero;
  double tol_cluster = kTolCluster;
  double min_separation = 0.0;  // smallest pairwise distance; +inf for < 2 entries

  int total_multiplicity() const;
};

struct WindingOptions {
  double clearance_rel = 1e-9;  // |Q| must exceed this times max |a_n| on the contour
  int initial_samples = 64;     // per side
  int max_doublings = 20;
};

/// One function whose phase is tracked along a contour. `value` may return
/// any complex number with the right argument (a rescaled value is fine);
/// `clearance` is the smallest admissible |value| on the contour.
struct PhaseSource {
  std::function<cd(cd)> value;
  double clearance = 0.0;
  int sign = 1;
  // Longest first-pass step along the contour (0: no limit). Long sides are
  // sampled at least this finely so fast rotations cannot alias.
  double pitch = 0.0;
};

/// Sum of sign_s * winding(source_s) around the rectangle boundary, by
/// adaptive phase tracking: every segment is bisected until each source's
/// phase increment is below pi/2.
int winding_number(std::span<const PhaseSource> sources, const StripWindow& rect,
                   const WindingOptions& opts = {});

PhaseSource phase_source(const Quasipolynomial& qp, const WindingOptions& opts = {});

/// Argument-principle zero count inside rect. Throws ZeroOnBoundary or
/// PhaseAmbiguity.
int count_zeros(const Quasipolynomial& qp, const StripWindow& rect,
                const WindingOptions& opts = {});

struct PerturbedCount {
  int count = 0;
  StripWindow rect;
  int attempts = 0;
};

/// count_zeros with the deterministic retry: on ZeroOnBoundary every bound
/// is moved by +jitter (cumulatively) and the count repeated, up to 5 times.
PerturbedCount count_zeros_perturbed(const Quasipolynomial& qp, const StripWindow& rect,
                                     double jitter, const WindingOptions& opts = {});

/// Damped Newton iteration z <- z - Q/Q'. Throws NonConvergence after
/// max_iter steps without |Q| < tol_zero.
cd newton_polish(const Quasipolynomial& qp, cd z0, double tol_zero, int max_iter = 60);

struct FindOptions {
  double tol_zero = kDefaultTolZero;
  double tol_cluster = kTolCluster;
  int max_newton = 60;
  WindingOptions winding;
  Exec exec = default_exec();
};

/// All zeros of qp inside rect with multiplicities, by recursive
/// quadrisection and Newton polishing.
ZeroList find_zeros(const Quasipolynomial& qp, const StripWindow& rect, double tol_zero);
ZeroList find_zeros(const Quasipolynomial& qp, const StripWindow& rect, const FindOptions& opts);

}  // namespace qpz
