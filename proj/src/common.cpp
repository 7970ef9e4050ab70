#include "qpz/common.hpp"

#include <algorithm>
#include <cmath>

namespace qpz {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConstantDerivative: return "ConstantDerivative";
    case ErrorCode::ZeroOnBoundary: return "ZeroOnBoundary";
    case ErrorCode::PhaseAmbiguity: return "PhaseAmbiguity";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::TooFewElements: return "TooFewElements";
    case ErrorCode::MarginViolation: return "MarginViolation";
    case ErrorCode::EmptyClasses: return "EmptyClasses";
    case ErrorCode::EmptyDivisor: return "EmptyDivisor";
    case ErrorCode::NoUniqueTranslate: return "NoUniqueTranslate";
    case ErrorCode::NonRealPeriod: return "NonRealPeriod";
    case ErrorCode::PropagationBreak: return "PropagationBreak";
    case ErrorCode::Incommensurable: return "Incommensurable";
    case ErrorCode::DecompositionIncomplete: return "DecompositionIncomplete";
    case ErrorCode::OffsetOnBoundary: return "OffsetOnBoundary";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::ZeroMismatch: return "ZeroMismatch";
    case ErrorCode::NoLineStructure: return "NoLineStructure";
    case ErrorCode::SpacingMismatch: return "SpacingMismatch";
    case ErrorCode::SpectrumMismatch: return "SpectrumMismatch";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  return code == ErrorCode::InvalidArgument || code == ErrorCode::ParseError ||
         code == ErrorCode::MarginViolation || code == ErrorCode::EmptyClasses ||
         code == ErrorCode::TooFewElements;
}

StripWindow::StripWindow(double re_lo, double re_hi, double im_lo, double im_hi)
    : re_min(re_lo), re_max(re_hi), im_min(im_lo), im_max(im_hi) {
  if (!(re_lo < re_hi) || !(im_lo < im_hi) || !std::isfinite(re_lo) ||
      !std::isfinite(re_hi) || !std::isfinite(im_lo) || !std::isfinite(im_hi)) {
    throw Error(ErrorCode::InvalidArgument, "window needs re_min < re_max and im_min < im_max");
  }
}

double StripWindow::diameter() const { return std::hypot(width(), height()); }

bool StripWindow::contains(cd z) const {
  return z.real() > re_min && z.real() < re_max && z.imag() >= im_min && z.imag() <= im_max;
}

bool StripWindow::contains_closed(cd z) const {
  return z.real() >= re_min && z.real() <= re_max && z.imag() >= im_min && z.imag() <= im_max;
}

bool StripWindow::contains_strictly(cd z) const {
  return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
}

bool StripWindow::contains(const StripWindow& o) const {
  return o.re_min >= re_min && o.re_max <= re_max && o.im_min >= im_min && o.im_max <= im_max;
}

double StripWindow::edge_distance(cd z) const {
  return std::min({z.real() - re_min, re_max - z.real(), z.imag() - im_min, im_max - z.imag()});
}

StripWindow StripWindow::shrunk(double d_re, double d_im) const {
  return StripWindow(re_min + d_re, re_max - d_re, im_min + d_im, im_max - d_im);
}

StripWindow StripWindow::shifted_im(double dy) const {
  return StripWindow(re_min, re_max, im_min + dy, im_max + dy);
}

}  // namespace qpz
