#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qpz/common.hpp"
#include "qpz/kernels.hpp"

namespace qpz {

struct ZeroList;

struct DivisorPoint {
  cd point;
  int mult = 1;

  bool operator==(const DivisorPoint&) const = default;
};

/// Finite window of a divisor: distinct points with positive multiplicities,
/// all inside the window, sorted by (Im, Re).
class Divisor {
 public:
  Divisor(std::vector<DivisorPoint> points, StripWindow window);

  static Divisor from_zeros(const ZeroList& zeros);

  const std::vector<DivisorPoint>& points() const { return points_; }
  const StripWindow& window() const { return window_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  int total_multiplicity() const;

  /// Smallest distance between two distinct points (+inf for fewer than 2).
  double min_separation() const { return min_separation_; }

  /// Points inside w (window semantics), re-windowed to w.
  Divisor restricted(const StripWindow& w) const;

  /// Indices of points with |p - q| < radius, in storage order.
  std::vector<std::size_t> within(cd q, double radius) const;

  /// Index of the point nearest to q among those with |p - q| < radius.
  std::optional<std::size_t> nearest(cd q, double radius) const;

 private:
  std::vector<DivisorPoint> points_;
  StripWindow window_;
  double min_separation_;
};

inline constexpr double kDedupTolerance = 1e-12;

/// Distinct differences z - w with |Im(z - w)| <= im_bound, deduplicated at
/// 1e-12 and sorted by (Im, Re).
std::vector<cd> difference_set(const Divisor& z, const Divisor& w, double im_bound);

struct MinGap {
  double gap = 0.0;    // smallest distance between distinct elements
  double gamma = 0.0;  // min(gap, 1/2)
};

/// Throws TooFewElements unless the list has two distinct values.
MinGap min_gap(std::span<const cd> diffs);

struct MatchResult {
  bool ok = false;
  bool certified = false;        // nearest-neighbour matching provably unique
  double max_displacement = 0.0; // over the mandatory matched points
  std::size_t mandatory = 0;     // point copies that had to be matched
  std::size_t optional = 0;      // near-boundary copies excused from matching
};

/// Two-sided translation matching: Z∩inner shifted by +i tau and by -i tau
/// must each be matched into Z, multiplicity-respecting, moving every point
/// by less than eps. Points within eps of the boundary of `inner` are
/// optional. Throws MarginViolation when inner, or inner shifted by
/// +-tau, is not inside the divisor window with margin eps.
MatchResult match_translation(const Divisor& z, double tau, double eps, const StripWindow& inner);

bool is_almost_period(const Divisor& z, double tau, double eps, const StripWindow& inner);

/// Max over mandatory source points (both directions) of the distance to the
/// nearest divisor point; +inf when some source has no point within radius.
double translation_cost(const Divisor& z, double tau, double eps, const StripWindow& inner,
                        double radius);

struct AlmostPeriodReport {
  double epsilon = 0.0;
  std::vector<double> taus;           // sorted ascending, symmetric about 0
  std::vector<double> displacements;  // max matching displacement per tau
  double density_gap = 0.0;           // +inf when fewer than two taus
  double scan_min = 0.0;
  double scan_max = 0.0;
  double step = 0.0;
  StripWindow inner;
  bool certified = true;
};

/// Scans tau in [-tau_max, tau_max] at pitch `step` (<= eps/4), refines each
/// run of grid hits by golden-section search on the matching cost and keeps
/// the values that verify.
AlmostPeriodReport scan_almost_periods(const Divisor& z, double eps, const StripWindow& inner,
                                       double tau_max, double step, Exec exec = default_exec());

/// The taus verified simultaneously for both divisors.
AlmostPeriodReport common_almost_periods(const Divisor& z, const Divisor& w, double eps,
                                         const StripWindow& inner, double tau_max, double step,
                                         Exec exec = default_exec());

/// Checks that tau1 - tau2 and tau1 + tau2 are 2 eps-almost-periods on inner,
/// after confirming tau1 and tau2 at eps on inner enlarged by eps.
bool lemma1_check(const Divisor& z, double tau1, double tau2, double eps, const StripWindow& inner);

/// Density-gap certificate L (max |k_s| + 2) of the pigeonhole construction.
double lemma2_gap_bound(double L, double eps, std::span<const int> classes);

/// Runs the pigeonhole construction on two scan reports: for each interval
/// [kL, (k+1)L] the first tau of each report gives residues n(k), m(k) on
/// the eps/2 grid; the first k (by |k|) of every distinct n(k) - m(k) is kept.
std::vector<int> lemma2_classes(const AlmostPeriodReport& rz, const AlmostPeriodReport& rw,
                                double L, double eps);

}  // namespace qpz
