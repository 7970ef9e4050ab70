#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qpz/io.hpp"

namespace qpz::cli {

// Exit codes of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

enum class Verdict { Periodic, NoDiscreteDifferences, Inconclusive };
std::string_view verdict_name(Verdict v);

struct AnalyzeParams {
  double eps = 0.05;
  double tau_max = 0.0;  // 0: a quarter of the window height
  double period_tol = 1e-8;
  Exec exec = default_exec();
};

struct AnalyzeOutcome {
  Verdict verdict = Verdict::Inconclusive;
  double period = 0.0;  // minimal common period when periodic
  Json payload;
};

/// Difference-gap trend, almost-period scan, period extraction and
/// per-line commensurability for a divisor pair on a window.
AnalyzeOutcome analyze(const Divisor& z, const Divisor& w, const StripWindow& window, const AnalyzeParams& p);

/// Fit of the cosh-product form when it applies, otherwise one periodic
/// factor per vertical line of zeros; plus the quotient certificate.
Json factor_payload(const Quasipolynomial& qp, const StripWindow& window, double budget,
                    const StripWindow* inner, Exec exec, std::vector<std::string>& warnings);

}  // namespace qpz::cli
