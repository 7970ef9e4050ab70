#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qpz {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Tolerance hierarchy shared by the zero finder and everything downstream:
// tol_zero <= 1e-10 < tol_cluster << gamma / 4.
inline constexpr double kDefaultTolZero = 1e-12;
inline constexpr double kTolCluster = 1e-8;

enum class ErrorCode {
  InvalidArgument,
  ParseError,
  ConstantDerivative,
  ZeroOnBoundary,
  PhaseAmbiguity,
  NonConvergence,
  TooFewElements,
  MarginViolation,
  EmptyClasses,
  EmptyDivisor,
  NoUniqueTranslate,
  NonRealPeriod,
  PropagationBreak,
  Incommensurable,
  DecompositionIncomplete,
  OffsetOnBoundary,
  RadiusTooLarge,
  BoundViolated,
  ZeroMismatch,
  NoLineStructure,
  SpacingMismatch,
  SpectrumMismatch,
};

std::string_view error_name(ErrorCode code);

// Input-side failures (bad arguments, unparsable files) versus failures of
// the numerics on valid input. The CLI maps these to exit codes 2 and 3.
bool is_input_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Axis-aligned rectangle {re_min < Re z < re_max, im_min <= Im z <= im_max}.
/// Used both for vertical substrips (finite windows of them) and for the
/// contour rectangles of the argument principle.
struct StripWindow {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  StripWindow() = default;
  StripWindow(double re_lo, double re_hi, double im_lo, double im_hi);

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double diameter() const;
  cd center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }

  /// Window membership: open in Re, closed in Im.
  bool contains(cd z) const;
  /// Closed in both directions.
  bool contains_closed(cd z) const;
  bool contains_strictly(cd z) const;
  bool contains(const StripWindow& other) const;

  /// Distance from an interior point to the nearest edge (negative outside).
  double edge_distance(cd z) const;

  StripWindow shrunk(double d_re, double d_im) const;
  StripWindow expanded(double d) const { return shrunk(-d, -d); }
  StripWindow shifted_im(double dy) const;

  bool operator==(const StripWindow&) const = default;
};

/// Orders complex numbers by (Im, Re): the canonical order of zero lists.
inline bool im_re_less(cd a, cd b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

}  // namespace qpz
