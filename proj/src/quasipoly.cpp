#include "qpz/quasipoly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qpz/kernels.hpp"

namespace qpz {

Quasipolynomial::Quasipolynomial(std::vector<Term> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error(ErrorCode::InvalidArgument, "quasipolynomial needs at least one term");
  for (const Term& t : terms_) {
    if (!std::isfinite(t.lambda) || !std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite term");
    }
    if (t.coeff == cd(0.0, 0.0)) throw Error(ErrorCode::InvalidArgument, "zero coefficient");
  }
  std::sort(terms_.begin(), terms_.end(),
            [](const Term& a, const Term& b) { return a.lambda > b.lambda; });
  for (std::size_t i = 1; i < terms_.size(); ++i) {
    if (terms_[i].lambda == terms_[i - 1].lambda) {
      throw Error(ErrorCode::InvalidArgument, "repeated frequency " + std::to_string(terms_[i].lambda));
    }
  }
  for (const Term& t : terms_) max_coeff_abs_ = std::max(max_coeff_abs_, std::abs(t.coeff));
}

cd ScaledValue::value() const { return mantissa * std::exp(log_scale); }

double ScaledValue::log_abs() const { return std::log(std::abs(mantissa)) + log_scale; }

ScaledValue eval_scaled(const Quasipolynomial& qp, cd z) {
  const double ref = z.real() > 0.0 ? qp.lambda_top() : qp.lambda_bottom();
  cd sum(0.0, 0.0);
  for (const Term& t : qp.terms()) {
    const double mag = std::exp((t.lambda - ref) * z.real());
    sum += t.coeff * std::polar(mag, t.lambda * z.imag());
  }
  return {sum, ref * z.real()};
}

cd eval(const Quasipolynomial& qp, cd z) { return eval_scaled(qp, z).value(); }

Quasipolynomial derivative(const Quasipolynomial& qp) {
  std::vector<Term> out;
  for (const Term& t : qp.terms()) {
    if (t.lambda != 0.0) out.push_back({t.lambda, t.lambda * t.coeff});
  }
  if (out.empty()) throw Error(ErrorCode::ConstantDerivative, "derivative of a constant");
  return Quasipolynomial(std::move(out));
}

Quasipolynomial translate(const Quasipolynomial& qp, double tau) {
  std::vector<Term> out = qp.terms();
  for (Term& t : out) t.coeff *= std::polar(1.0, t.lambda * tau);
  return Quasipolynomial(std::move(out));
}

cd PeriodicProductForm::eval(cd z) const {
  cd v = c * std::exp(beta * z);
  for (cd b : offsets) v *= std::cosh(omega * z + b);
  return v;
}

PeriodicProductForm canonical(PeriodicProductForm form) {
  if (form.omega == 0.0 || !std::isfinite(form.omega)) {
    throw Error(ErrorCode::InvalidArgument, "omega must be finite and nonzero");
  }
  if (form.omega < 0.0) {
    form.omega = -form.omega;
    for (cd& b : form.offsets) b = -b;
  }
  for (cd& b : form.offsets) {
    double k = std::floor(b.imag() / kPi);
    double im = b.imag() - k * kPi;
    // Just below pi is the same class as 0; snap so that fitted offsets
    // carrying 1e-16 noise around a multiple of pi come out as 0.
    if (im >= kPi - 1e-12) {
      im = 0.0;
      k += 1.0;
    }
    if (im < 0.0) im = 0.0;
    b = {b.real(), im};
    // cosh(x + i pi) = -cosh(x)
    if (std::fmod(std::abs(k), 2.0) == 1.0) form.c = -form.c;
  }
  std::sort(form.offsets.begin(), form.offsets.end(), [](cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return form;
}

Quasipolynomial expand_product(const PeriodicProductForm& form, std::vector<std::string>* warnings) {
  const std::size_t n = form.offsets.size();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "product form needs at least one offset");
  if (n > 24) throw Error(ErrorCode::InvalidArgument, "product form with more than 24 factors");
  if (!(form.omega > 0.0)) throw Error(ErrorCode::InvalidArgument, "omega must be positive");

  // Keyed by the integer sign sum so that equal exponents are grouped exactly.
  std::map<int, cd> by_sign_sum;
  const cd scale = form.c * std::ldexp(1.0, -static_cast<int>(n));
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    int sign_sum = 0;
    cd exponent(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const bool plus = (mask >> k) & 1u;
      sign_sum += plus ? 1 : -1;
      exponent += plus ? form.offsets[k] : -form.offsets[k];
    }
    by_sign_sum[sign_sum] += scale * std::exp(exponent);
  }

  double largest = 0.0;
  for (const auto& [key, coeff] : by_sign_sum) largest = std::max(largest, std::abs(coeff));
  std::vector<Term> terms;
  for (const auto& [key, coeff] : by_sign_sum) {
    const double lambda = form.beta + form.omega * key;
    if (std::abs(coeff) < kCancellationThreshold * largest) {
      if (warnings) {
        std::ostringstream msg;
        msg << "expand_product: dropped cancelled exponent " << lambda << " (|coeff| = " << std::abs(coeff)
            << ")";
        warnings->push_back(msg.str());
      }
      continue;
    }
    terms.push_back({lambda, coeff});
  }
  return Quasipolynomial(std::move(terms));
}

double default_grid_step(const StripWindow& w) { return w.diameter() / 512.0; }

double sup_diff(const Quasipolynomial& f, const Quasipolynomial& g, const StripWindow& w,
                double grid_step) {
  if (!(grid_step > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid_step must be positive");
  return max_abs_diff(f, g, Grid::covering(w, grid_step), default_exec());
}

double gradient_bound(std::span<const Term> terms, const StripWindow& w) {
  double bound = 0.0;
  for (const Term& t : terms) {
    const double edge = std::max(t.lambda * w.re_min, t.lambda * w.re_max);
    bound += std::abs(t.coeff) * std::abs(t.lambda) * std::exp(edge);
  }
  return bound;
}

double sup_diff_bound(const Quasipolynomial& f, const Quasipolynomial& g, const StripWindow& w,
                      double grid_step) {
  std::map<double, cd> merged;
  for (const Term& t : f.terms()) merged[t.lambda] += t.coeff;
  for (const Term& t : g.terms()) merged[t.lambda] -= t.coeff;
  std::vector<Term> diff;
  for (const auto& [lambda, coeff] : merged) diff.push_back({lambda, coeff});
  const double sampled = sup_diff(f, g, w, grid_step);
  // Every point of the window lies within grid_step / sqrt(2) of a node.
  return sampled + gradient_bound(diff, w) * grid_step / std::sqrt(2.0);
}

}  // namespace qpz
