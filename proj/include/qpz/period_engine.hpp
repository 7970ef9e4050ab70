#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qpz/common.hpp"
#include "qpz/divisor.hpp"
#include "qpz/kernels.hpp"

namespace qpz {

inline constexpr double kTolRealPeriod = 1e-8;

struct ExtractOptions {
  double tol_real_period = kTolRealPeriod;
  // Allowed drift of a matched difference z - w -> z' - w'.
  double match_tol = 2e-10;
};

struct PeriodCertificate {
  double period = 0.0;
  cd anchor;
  cd anchor_image;
  double tau_used = 0.0;
  double gamma = 0.0;
  double R = 0.0;
  std::vector<StripWindow> verified_windows;
  bool two_sided = false;
  std::uint64_t quadruples_checked = 0;
  std::uint64_t points_exited = 0;
  // Largest M for which anchor +- iMT was confirmed to stay on its line.
  std::int64_t realness_steps = 0;
  double tol_real_period = kTolRealPeriod;
  double match_tol = 0.0;
};

/// Largest gap between consecutive Im coordinates of Z and of W inside the
/// window (the height every horizontal slab needs to meet both).
double estimate_R(const Divisor& z, const Divisor& w, const StripWindow& window);

/// Half the smallest gap among differences z - w with |Im| <= 2R + 3,
/// capped at 1/2.
double estimate_gamma(const Divisor& z, const Divisor& w, double R);

PeriodCertificate extract_period(const Divisor& z, const Divisor& w, double tau, double gamma,
                                 const StripWindow& window, const ExtractOptions& opts = {});

/// Every point of Z in the window maps under +-iT onto a point of Z within
/// tol with equal multiplicity, unless the image leaves the divisor window.
/// False when nothing could be checked.
bool verify_period(const Divisor& z, double T, const StripWindow& window, double tol);

/// Smallest verifying candidate among T/q (q <= 64) and the Im-differences
/// below T along the anchor's vertical line.
double minimal_period(const Divisor& z, double T, const StripWindow& window, double tol);

/// Same, requiring the candidate to verify for both divisors.
double minimal_common_period(const Divisor& z, const Divisor& w, double T, const StripWindow& window,
                             double tol);

inline constexpr std::int64_t kMaxDenominator = 1'000'000;
// A convergent p/q of a measured ratio r is accepted only when
// q^2 |r - p/q| is below this: far better than the 1/q^2 any real number gets.
inline constexpr double kSignificance = 1e-3;

struct Commensurability {
  double common_unit = 0.0;
  std::vector<std::int64_t> multipliers;
};

Commensurability commensurate(std::span<const double> periods, double tol);

struct DecompositionPart {
  Divisor part;
  double period = 0.0;
  StripWindow substrip;
};

struct Decomposition {
  std::vector<DecompositionPart> parts;
  double common_unit = 0.0;
  std::vector<std::int64_t> multipliers;
};

struct DecomposeOptions {
  double tau_max = 0.0;  // 0: a quarter of each substrip's height
  double period_tol = 1e-8;
  double commensurate_tol = 1e-9;
  ExtractOptions extract;
  Exec exec = default_exec();
};

struct DecomposeResult {
  Decomposition z;
  Decomposition w;
  std::vector<PeriodCertificate> certificates;
  std::vector<double> gammas;
};

/// Substrips must be nested and increasing. Part k of Z is Z on S_k minus S_{k-1}.
DecomposeResult decompose(const Divisor& z, const Divisor& w, std::span<const StripWindow> substrips,
                          std::span<const double> gamma_list, const DecomposeOptions& opts = {});

}  // namespace qpz
