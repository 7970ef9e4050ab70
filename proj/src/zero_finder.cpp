#include "qpz/zero_finder.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <sstream>

namespace qpz {

int ZeroList::total_multiplicity() const {
  int total = 0;
  for (const ZeroEntry& e : entries) total += e.multiplicity;
  return total;
}

namespace {

std::string point_str(cd z) {
  std::ostringstream s;
  s.precision(17);
  s << "(" << z.real() << ", " << z.imag() << ")";
  return s.str();
}

class PhaseTracker {
 public:
  PhaseTracker(std::span<const PhaseSource> sources, double min_segment)
      : sources_(sources), min_segment_(min_segment) {}

  std::vector<cd> sample(cd z) const {
    std::vector<cd> v(sources_.size());
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      v[s] = sources_[s].value(z);
      const double mag = std::abs(v[s]);
      if (!std::isfinite(mag) || mag <= sources_[s].clearance) {
        throw Error(ErrorCode::ZeroOnBoundary, "contour passes too close to a zero at " + point_str(z));
      }
    }
    return v;
  }

  double segment(cd a, const std::vector<cd>& va, cd b, const std::vector<cd>& vb, int depth) const {
    double sum = 0.0;
    bool fine = true;
    for (std::size_t s = 0; s < sources_.size(); ++s) {
      const double d = std::arg(vb[s] * std::conj(va[s]));
      if (std::abs(d) >= 0.5 * kPi) {
        fine = false;
        break;
      }
      sum += sources_[s].sign * d;
    }
    if (fine) return sum;
    if (depth >= 60 || std::abs(b - a) < min_segment_) {
      throw Error(ErrorCode::ZeroOnBoundary, "unresolvable phase jump near " + point_str(a));
    }
    const cd mid = 0.5 * (a + b);
    const std::vector<cd> vm = sample(mid);
    return segment(a, va, mid, vm, depth + 1) + segment(mid, vm, b, vb, depth + 1);
  }

 private:
  std::span<const PhaseSource> sources_;
  double min_segment_;
};

struct NewtonScale {
  cd step;
  bool ok = false;
};

// Newton step Q/Q' from the scaled values, so it stays finite when the
// values themselves would overflow.
NewtonScale newton_step(const ScaledValue& f, const Quasipolynomial& df, cd z) {
  const ScaledValue d = eval_scaled(df, z);
  if (d.mantissa == cd(0.0, 0.0)) return {};
  const cd step = (f.mantissa / d.mantissa) * std::exp(f.log_scale - d.log_scale);
  if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return {};
  return {step, true};
}

std::optional<cd> newton_try(const Quasipolynomial& f, const Quasipolynomial& df, cd z, double tol,
                             int max_iter) {
  const double log_tol = std::log(tol);
  ScaledValue fz = eval_scaled(f, z);
  double la = fz.log_abs();
  for (int it = 0; it <= max_iter; ++it) {
    if (la < log_tol) {
      // A few undamped steps past the tolerance bring the position to
      // working precision; stop as soon as |Q| grows or the step vanishes.
      for (int extra = 0; extra < 3; ++extra) {
        const NewtonScale s = newton_step(fz, df, z);
        if (!s.ok || std::abs(s.step) <= 4.0 * DBL_EPSILON * (1.0 + std::abs(z))) break;
        const cd zn = z - s.step;
        const ScaledValue fn = eval_scaled(f, zn);
        if (!(fn.log_abs() <= la)) break;
        z = zn;
        fz = fn;
        la = fn.log_abs();
      }
      return z;
    }
    if (it == max_iter) break;
    const NewtonScale s = newton_step(fz, df, z);
    if (!s.ok) return std::nullopt;
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
      const cd zn = z - t * s.step;
      const ScaledValue fn = eval_scaled(f, zn);
      const double ln = fn.log_abs();
      if (ln < la) {
        z = zn;
        fz = fn;
        la = ln;
        moved = true;
        break;
      }
    }
    if (!moved) return std::nullopt;
  }
  return std::nullopt;
}

struct Cell {
  StripWindow rect;
  int count = 0;
};

struct CellOutcome {
  std::vector<ZeroEntry> zeros;
  std::vector<Cell> children;
  std::optional<Error> error;
};

// Split positions as fractions of the cell size. The midpoint is avoided on
// purpose: symmetric inputs put zeros exactly on it.
constexpr double kSplitRe[] = {0.5 + 1.0 / 28, 0.5 - 1.0 / 14, 0.5 + 3.0 / 28, 0.5 - 1.0 / 7, 0.5 + 5.0 / 28};
constexpr double kSplitIm[] = {0.5 + 1.0 / 56, 0.5 - 3.0 / 56, 0.5 + 5.0 / 56, 0.5 - 1.0 / 8, 0.5 + 9.0 / 56};

class Finder {
 public:
  Finder(const Quasipolynomial& qp, const FindOptions& opts) : qp_(qp), opts_(opts) {}

  CellOutcome process(const Cell& cell) const {
    CellOutcome out;
    try {
      if (cell.count == 1) {
        if (auto z = polish_in(qp_, derivative_(), cell.rect, opts_.tol_zero)) {
          out.zeros.push_back({*z, 1, std::abs(eval(qp_, *z))});
          return out;
        }
        if (cell.rect.diameter() < 1e3 * opts_.tol_cluster || !split(cell, out.children)) {
          throw Error(ErrorCode::NonConvergence,
                      "Newton failed from every restart in cell centred at " + point_str(cell.rect.center()));
        }
        return out;
      }
      if (cell.rect.diameter() >= opts_.tol_cluster && split(cell, out.children)) return out;
      out.zeros.push_back(cluster(cell));
    } catch (const Error& e) {
      out.error = e;
    }
    return out;
  }

  const Quasipolynomial& derivative_() const {
    if (!df_) df_ = derivative(qp_);
    return *df_;
  }

  void prepare() const {
    if (!df_) df_ = derivative(qp_);
  }

 private:
  std::optional<cd> polish_in(const Quasipolynomial& f, const Quasipolynomial& df, const StripWindow& rect,
                              double tol) const {
    const cd c = rect.center();
    const double qw = 0.25 * rect.width();
    const double qh = 0.25 * rect.height();
    const cd starts[] = {c, c + cd(-qw, -qh), c + cd(qw, -qh), c + cd(qw, qh), c + cd(-qw, qh)};
    for (cd s : starts) {
      if (auto z = newton_try(f, df, s, tol, opts_.max_newton); z && rect.contains_closed(*z)) return z;
    }
    return std::nullopt;
  }

  bool split(const Cell& cell, std::vector<Cell>& children) const {
    const StripWindow& r = cell.rect;
    for (std::size_t attempt = 0; attempt < std::size(kSplitRe); ++attempt) {
      const double x = r.re_min + kSplitRe[attempt] * r.width();
      const double y = r.im_min + kSplitIm[attempt] * r.height();
      const StripWindow quads[] = {{r.re_min, x, r.im_min, y},
                                   {x, r.re_max, r.im_min, y},
                                   {r.re_min, x, y, r.im_max},
                                   {x, r.re_max, y, r.im_max}};
      std::vector<Cell> trial;
      int sum = 0;
      try {
        for (const StripWindow& q : quads) {
          const int n = count_zeros(qp_, q, opts_.winding);
          sum += n;
          if (n > 0) trial.push_back({q, n});
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::ZeroOnBoundary || e.code() == ErrorCode::PhaseAmbiguity) continue;
        throw;
      }
      if (sum != cell.count) continue;
      children = std::move(trial);
      return true;
    }
    return false;
  }

  // A cell holding m >= 2 zeros that cannot be separated further: reported
  // as one point of multiplicity m, located as the simple zero of Q^(m-1).
  ZeroEntry cluster(const Cell& cell) const {
    std::optional<Quasipolynomial> d;
    try {
      d = qp_;
      for (int j = 1; j < cell.count; ++j) d = derivative(*d);
      const Quasipolynomial dd = derivative(*d);
      const double tol = opts_.tol_zero * std::max(1.0, d->max_coeff_abs() / qp_.max_coeff_abs());
      const StripWindow grown = cell.rect.expanded(cell.rect.diameter());
      if (auto z = polish_in(*d, dd, cell.rect, tol); z && grown.contains_closed(*z)) {
        return {*z, cell.count, std::abs(eval(qp_, *z))};
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantDerivative) throw;
    }
    throw Error(ErrorCode::NonConvergence,
                "cannot resolve a cluster of " + std::to_string(cell.count) + " zeros near " +
                    point_str(cell.rect.center()));
  }

  const Quasipolynomial& qp_;
  const FindOptions& opts_;
  mutable std::optional<Quasipolynomial> df_;
};

}  // namespace

int winding_number(std::span<const PhaseSource> sources, const StripWindow& rect,
                   const WindingOptions& opts) {
  const cd corners[] = {{rect.re_min, rect.im_min},
                        {rect.re_max, rect.im_min},
                        {rect.re_max, rect.im_max},
                        {rect.re_min, rect.im_max}};
  const double scale = std::max({1.0, std::abs(corners[0]), std::abs(corners[2])});
  const PhaseTracker tracker(sources, 1e-14 * scale);
  double pitch = std::numeric_limits<double>::infinity();
  for (const PhaseSource& s : sources) {
    if (s.pitch > 0.0) pitch = std::min(pitch, s.pitch);
  }
  for (int doubling = 0; doubling <= opts.max_doublings; ++doubling) {
    double total = 0.0;
    for (int side = 0; side < 4; ++side) {
      const cd a = corners[side];
      const cd b = corners[(side + 1) % 4];
      long n = opts.initial_samples;
      if (std::isfinite(pitch)) n = std::max(n, static_cast<long>(std::ceil(std::abs(b - a) / pitch)));
      n <<= doubling;
      cd prev = a;
      std::vector<cd> vprev = tracker.sample(a);
      for (long i = 1; i <= n; ++i) {
        const cd p = i == n ? b : a + (b - a) * (static_cast<double>(i) / static_cast<double>(n));
        std::vector<cd> vp = tracker.sample(p);
        total += tracker.segment(prev, vprev, p, vp, 0);
        prev = p;
        vprev = std::move(vp);
      }
    }
    const double w = total / (2.0 * kPi);
    const double k = std::round(w);
    if (std::abs(w - k) < 0.25) return static_cast<int>(k);
  }
  throw Error(ErrorCode::PhaseAmbiguity, "winding number did not settle after refinement");
}

PhaseSource phase_source(const Quasipolynomial& qp, const WindingOptions& opts) {
  // Each term turns at rate |lambda| along vertical sides; an eighth of a
  // turn per first-pass step.
  double rate = 0.0;
  for (const Term& t : qp.terms()) rate = std::max(rate, std::abs(t.lambda));
  const double pitch = rate > 0.0 ? 0.25 * kPi / rate : 0.0;
  return {[&qp](cd z) { return eval_scaled(qp, z).mantissa; }, opts.clearance_rel * qp.max_coeff_abs(), 1, pitch};
}

int count_zeros(const Quasipolynomial& qp, const StripWindow& rect, const WindingOptions& opts) {
  const PhaseSource src = phase_source(qp, opts);
  return winding_number(std::span<const PhaseSource>(&src, 1), rect, opts);
}

PerturbedCount count_zeros_perturbed(const Quasipolynomial& qp, const StripWindow& rect, double jitter,
                                     const WindingOptions& opts) {
  StripWindow r = rect;
  for (int attempt = 0;; ++attempt) {
    try {
      return {count_zeros(qp, r, opts), r, attempt};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroOnBoundary || attempt == 5) throw;
    }
    r = StripWindow(r.re_min + jitter, r.re_max + jitter, r.im_min + jitter, r.im_max + jitter);
  }
}

cd newton_polish(const Quasipolynomial& qp, cd z0, double tol_zero, int max_iter) {
  if (!(tol_zero > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol_zero must be positive");
  const Quasipolynomial dq = derivative(qp);
  if (auto z = newton_try(qp, dq, z0, tol_zero, max_iter)) return *z;
  throw Error(ErrorCode::NonConvergence, "Newton did not reach tolerance from " + point_str(z0));
}

ZeroList find_zeros(const Quasipolynomial& qp, const StripWindow& rect, double tol_zero) {
  FindOptions opts;
  opts.tol_zero = tol_zero;
  return find_zeros(qp, rect, opts);
}

ZeroList find_zeros(const Quasipolynomial& qp, const StripWindow& rect, const FindOptions& opts) {
  if (!(opts.tol_zero > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol_zero must be positive");
  ZeroList out;
  out.window = rect;
  out.tol_zero = opts.tol_zero;
  out.tol_cluster = opts.tol_cluster;
  out.min_separation = std::numeric_limits<double>::infinity();

  const int total = count_zeros(qp, rect, opts.winding);
  if (total > 0) {
    const Finder finder(qp, opts);
    finder.prepare();
    std::vector<Cell> level{{rect, total}};
    while (!level.empty()) {
      std::vector<CellOutcome> outcomes(level.size());
      const auto n = static_cast<std::ptrdiff_t>(level.size());
      if (opts.exec == Exec::Serial) {
        for (std::ptrdiff_t i = 0; i < n; ++i) outcomes[i] = finder.process(level[i]);
      } else {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i) outcomes[i] = finder.process(level[i]);
      }
      std::vector<Cell> next;
      for (CellOutcome& o : outcomes) {
        if (o.error) throw *o.error;
        out.entries.insert(out.entries.end(), o.zeros.begin(), o.zeros.end());
        next.insert(next.end(), o.children.begin(), o.children.end());
      }
      level = std::move(next);
    }
  }

  std::sort(out.entries.begin(), out.entries.end(),
            [](const ZeroEntry& a, const ZeroEntry& b) { return im_re_less(a.point, b.point); });
  for (std::size_t i = 0; i < out.entries.size(); ++i) {
    for (std::size_t j = i + 1; j < out.entries.size(); ++j) {
      const double dy = out.entries[j].point.imag() - out.entries[i].point.imag();
      if (dy >= out.min_separation) break;
      out.min_separation = std::min(out.min_separation, std::abs(out.entries[j].point - out.entries[i].point));
    }
  }
  return out;
}

}  // namespace qpz
