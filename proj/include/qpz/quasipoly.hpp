#pragma once

#include <span>
#include <string>
#include <vector>

#include "qpz/common.hpp"

namespace qpz {

struct Term {
  double lambda = 0.0;
  cd coeff;
};

/// A finite exponential sum  sum_n a_n exp(lambda_n z)  with real frequencies.
///
/// Terms are kept sorted by lambda, strictly descending; frequencies are
/// pairwise distinct and every coefficient is nonzero. The object is
/// immutable after construction.
class Quasipolynomial {
 public:
  /// Validates and sorts. Throws InvalidArgument on an empty list, a zero
  /// coefficient, a non-finite value or a repeated frequency.
  explicit Quasipolynomial(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  double lambda_top() const { return terms_.front().lambda; }
  double lambda_bottom() const { return terms_.back().lambda; }
  double max_coeff_abs() const { return max_coeff_abs_; }

  bool operator==(const Quasipolynomial&) const = default;

 private:
  std::vector<Term> terms_;
  double max_coeff_abs_ = 0.0;
};

/// Value split as  mantissa * exp(log_scale)  with a real log_scale, so that
/// the phase is arg(mantissa) and |value| never has to be formed.
struct ScaledValue {
  cd mantissa;
  double log_scale = 0.0;

  cd value() const;
  double log_abs() const;
};

/// Overflow-safe evaluation: the dominant exponential (top frequency for
/// Re z > 0, bottom for Re z < 0) is factored out.
ScaledValue eval_scaled(const Quasipolynomial& qp, cd z);

cd eval(const Quasipolynomial& qp, cd z);

/// Term-wise derivative. Throws ConstantDerivative when every frequency is 0.
Quasipolynomial derivative(const Quasipolynomial& qp);

/// z -> z + i*tau: a_n -> a_n exp(i lambda_n tau).
Quasipolynomial translate(const Quasipolynomial& qp, double tau);

/// Parameters of  C exp(beta z) prod_k cosh(omega z + b_k).
struct PeriodicProductForm {
  cd c{1.0, 0.0};
  double beta = 0.0;
  double omega = 1.0;
  std::vector<cd> offsets;

  /// Direct evaluation of the product (no expansion).
  cd eval(cd z) const;

  bool operator==(const PeriodicProductForm&) const = default;
};

/// omega > 0, Im b_k in [0, pi), cosh sign flips folded into C, offsets
/// sorted by (Re, Im).
PeriodicProductForm canonical(PeriodicProductForm form);

/// Combined coefficients below this fraction of the largest one are dropped.
inline constexpr double kCancellationThreshold = 1e-13;

/// Exact expansion of the product form into an exponential sum. Dropped
/// (cancelled) exponents are reported through `warnings` when given.
Quasipolynomial expand_product(const PeriodicProductForm& form,
                               std::vector<std::string>* warnings = nullptr);

/// Default sampling pitch for sup_diff: window diameter / 512.
double default_grid_step(const StripWindow& w);

/// Maximum of |f - g| on the closed grid of pitch grid_step covering w.
/// A sampled lower bound on the true supremum.
double sup_diff(const Quasipolynomial& f, const Quasipolynomial& g, const StripWindow& w,
                double grid_step);

/// Upper bound on  sup_{z in w} |f - g|: the sampled maximum plus
/// L * grid_step / sqrt(2), with L = sum |c_n| |lambda_n| exp(lambda_n Re z)
/// maximised over the window for the merged coefficient list of f - g.
double sup_diff_bound(const Quasipolynomial& f, const Quasipolynomial& g,
                      const StripWindow& w, double grid_step);

/// Gradient bound  sum |a_n| |lambda_n| max_{Re z in w} exp(lambda_n Re z).
double gradient_bound(std::span<const Term> terms, const StripWindow& w);

}  // namespace qpz
