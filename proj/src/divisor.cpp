#include "qpz/divisor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qpz/zero_finder.hpp"

namespace qpz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sweep_min_distance(std::vector<cd> pts) {
  std::sort(pts.begin(), pts.end(), im_re_less);
  double best = kInf;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[j].imag() - pts[i].imag() >= best) break;
      const double d = std::abs(pts[j] - pts[i]);
      if (d > 0.0) best = std::min(best, d);
    }
  }
  return best;
}

}  // namespace

Divisor::Divisor(std::vector<DivisorPoint> points, StripWindow window)
    : points_(std::move(points)), window_(window) {
  for (const DivisorPoint& p : points_) {
    if (p.mult < 1) throw Error(ErrorCode::InvalidArgument, "divisor multiplicities must be positive");
    if (!std::isfinite(p.point.real()) || !std::isfinite(p.point.imag())) {
      throw Error(ErrorCode::InvalidArgument, "non-finite divisor point");
    }
    if (!window_.contains(p.point)) throw Error(ErrorCode::InvalidArgument, "divisor point outside its window");
  }
  std::sort(points_.begin(), points_.end(),
            [](const DivisorPoint& a, const DivisorPoint& b) { return im_re_less(a.point, b.point); });
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].point == points_[i - 1].point) {
      throw Error(ErrorCode::InvalidArgument, "repeated divisor point; use multiplicities");
    }
  }
  std::vector<cd> pts;
  pts.reserve(points_.size());
  for (const DivisorPoint& p : points_) pts.push_back(p.point);
  min_separation_ = sweep_min_distance(std::move(pts));
}

Divisor Divisor::from_zeros(const ZeroList& zeros) {
  std::vector<DivisorPoint> pts;
  for (const ZeroEntry& e : zeros.entries) pts.push_back({e.point, e.multiplicity});
  return Divisor(std::move(pts), zeros.window);
}

int Divisor::total_multiplicity() const {
  int total = 0;
  for (const DivisorPoint& p : points_) total += p.mult;
  return total;
}

Divisor Divisor::restricted(const StripWindow& w) const {
  std::vector<DivisorPoint> pts;
  for (const DivisorPoint& p : points_) {
    if (w.contains(p.point)) pts.push_back(p);
  }
  return Divisor(std::move(pts), w);
}

std::vector<std::size_t> Divisor::within(cd q, double radius) const {
  std::vector<std::size_t> out;
  auto it = std::lower_bound(points_.begin(), points_.end(), q.imag() - radius,
                             [](const DivisorPoint& p, double y) { return p.point.imag() < y; });
  for (; it != points_.end() && it->point.imag() <= q.imag() + radius; ++it) {
    if (std::abs(it->point - q) < radius) out.push_back(static_cast<std::size_t>(it - points_.begin()));
  }
  return out;
}

std::optional<std::size_t> Divisor::nearest(cd q, double radius) const {
  std::optional<std::size_t> best;
  double best_d = radius;
  auto it = std::lower_bound(points_.begin(), points_.end(), q.imag() - radius,
                             [](const DivisorPoint& p, double y) { return p.point.imag() < y; });
  for (; it != points_.end() && it->point.imag() <= q.imag() + radius; ++it) {
    const double d = std::abs(it->point - q);
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(it - points_.begin());
    }
  }
  return best;
}

std::vector<cd> difference_set(const Divisor& z, const Divisor& w, double im_bound) {
  if (!(im_bound > 0.0)) throw Error(ErrorCode::InvalidArgument, "im_bound must be positive");
  std::vector<cd> raw;
  for (const DivisorPoint& a : z.points()) {
    for (const DivisorPoint& b : w.points()) {
      const cd d = a.point - b.point;
      if (std::abs(d.imag()) <= im_bound) raw.push_back(d);
    }
  }
  std::sort(raw.begin(), raw.end(), im_re_less);
  std::vector<cd> out;
  for (cd d : raw) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend() && it->imag() >= d.imag() - kDedupTolerance; ++it) {
      if (std::abs(*it - d) <= kDedupTolerance) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(d);
  }
  std::sort(out.begin(), out.end(), im_re_less);
  return out;
}

MinGap min_gap(std::span<const cd> diffs) {
  const double gap = sweep_min_distance(std::vector<cd>(diffs.begin(), diffs.end()));
  if (!std::isfinite(gap)) throw Error(ErrorCode::TooFewElements, "min_gap needs two distinct values");
  return {gap, std::min(gap, 0.5)};
}

namespace {

void check_margins(const Divisor& z, double tau, double eps, const StripWindow& inner) {
  const StripWindow& w = z.window();
  const double t = std::abs(tau);
  const bool ok = inner.re_min - eps >= w.re_min && inner.re_max + eps <= w.re_max &&
                  inner.im_min - t - eps >= w.im_min && inner.im_max + t + eps <= w.im_max;
  if (!ok) {
    throw Error(ErrorCode::MarginViolation,
                "inner window shifted by tau must sit inside the divisor window with margin eps");
  }
}

struct Source {
  cd target;  // source point shifted by +-i tau
  std::size_t index;
  bool mandatory;
};

std::vector<Source> sources(const Divisor& z, double shift, double eps, const StripWindow& inner) {
  std::vector<Source> out;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const cd p = z.points()[k].point;
    if (!inner.contains_closed(p)) continue;
    out.push_back({p + cd(0.0, shift), k, inner.edge_distance(p) >= eps});
  }
  return out;
}

// Kuhn augmenting paths with per-point capacities (the multiplicities).
class CapacityMatcher {
 public:
  CapacityMatcher(std::size_t n_right, const Divisor& z) : assigned_(n_right), z_(z) {}

  bool augment(std::size_t u, const std::vector<std::vector<std::size_t>>& adj) {
    visited_.assign(assigned_.size(), false);
    return try_assign(u, adj);
  }

  const std::vector<std::vector<std::size_t>>& assigned() const { return assigned_; }

 private:
  bool try_assign(std::size_t u, const std::vector<std::vector<std::size_t>>& adj) {
    for (std::size_t v : adj[u]) {
      if (visited_[v]) continue;
      visited_[v] = true;
      if (assigned_[v].size() < static_cast<std::size_t>(z_.points()[v].mult)) {
        assigned_[v].push_back(u);
        return true;
      }
      for (std::size_t& w : assigned_[v]) {
        if (try_assign(w, adj)) {
          w = u;
          return true;
        }
      }
    }
    return false;
  }

  std::vector<std::vector<std::size_t>> assigned_;
  std::vector<bool> visited_;
  const Divisor& z_;
};

MatchResult match_direction(const Divisor& z, const std::vector<Source>& src, double eps, bool certified) {
  MatchResult r;
  r.certified = certified;
  r.ok = true;
  if (certified) {
    for (const Source& s : src) {
      const int m = z.points()[s.index].mult;
      if (!s.mandatory) {
        r.optional += m;
        continue;
      }
      r.mandatory += m;
      const auto hit = z.nearest(s.target, eps);
      if (!hit || z.points()[*hit].mult != m) {
        r.ok = false;
        return r;
      }
      r.max_displacement = std::max(r.max_displacement, std::abs(z.points()[*hit].point - s.target));
    }
    return r;
  }

  // Expand multiplicities into copies; mandatory copies are matched first so
  // that later augmentations never drop them.
  std::vector<const Source*> left;
  for (bool pass_mandatory : {true, false}) {
    for (const Source& s : src) {
      if (s.mandatory != pass_mandatory) continue;
      for (int c = 0; c < z.points()[s.index].mult; ++c) left.push_back(&s);
    }
  }
  std::vector<std::vector<std::size_t>> adj(left.size());
  for (std::size_t u = 0; u < left.size(); ++u) adj[u] = z.within(left[u]->target, eps);
  CapacityMatcher matcher(z.size(), z);
  for (std::size_t u = 0; u < left.size(); ++u) {
    const bool hit = matcher.augment(u, adj);
    if (left[u]->mandatory) {
      ++r.mandatory;
      if (!hit) r.ok = false;
    } else {
      ++r.optional;
    }
  }
  for (std::size_t v = 0; v < matcher.assigned().size(); ++v) {
    for (std::size_t u : matcher.assigned()[v]) {
      if (left[u]->mandatory) {
        r.max_displacement = std::max(r.max_displacement, std::abs(z.points()[v].point - left[u]->target));
      }
    }
  }
  return r;
}

}  // namespace

MatchResult match_translation(const Divisor& z, double tau, double eps, const StripWindow& inner) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  check_margins(z, tau, eps, inner);
  const bool certified = z.min_separation() > 2.0 * eps;
  MatchResult total;
  total.ok = true;
  total.certified = certified;
  for (double dir : {1.0, -1.0}) {
    const std::vector<Source> src = sources(z, dir * tau, eps, inner);
    const MatchResult r = match_direction(z, src, eps, certified);
    total.ok = total.ok && r.ok;
    total.mandatory += r.mandatory;
    total.optional += r.optional;
    total.max_displacement = std::max(total.max_displacement, r.max_displacement);
    if (!total.ok) break;
  }
  return total;
}

bool is_almost_period(const Divisor& z, double tau, double eps, const StripWindow& inner) {
  return match_translation(z, tau, eps, inner).ok;
}

double translation_cost(const Divisor& z, double tau, double eps, const StripWindow& inner, double radius) {
  double cost = 0.0;
  for (const DivisorPoint& p : z.points()) {
    if (!inner.contains_closed(p.point) || inner.edge_distance(p.point) < eps) continue;
    for (double dir : {1.0, -1.0}) {
      const cd q = p.point + cd(0.0, dir * tau);
      const auto hit = z.nearest(q, radius);
      if (!hit) return kInf;
      cost = std::max(cost, std::abs(z.points()[*hit].point - q));
    }
  }
  return cost;
}

namespace {

constexpr double kGolden = 0.61803398874989484820;

template <class F>
double golden_min(F&& f, double lo, double hi) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

struct RunOutcome {
  bool verified = false;
  double tau = 0.0;
  double displacement = 0.0;
  bool certified = true;
};

AlmostPeriodReport scan_impl(std::span<const Divisor* const> divs, double eps, const StripWindow& inner,
                             double tau_max, double step, Exec exec) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  if (!(step > 0.0) || step > eps / 4.0 * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "scan step must lie in (0, eps/4]");
  }
  if (!(tau_max >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tau_max must be non-negative");
  for (const Divisor* d : divs) check_margins(*d, tau_max, eps, inner);

  const double radius = eps + 2.0 * step;
  auto cost = [&](double tau) {
    double c = 0.0;
    for (const Divisor* d : divs) c = std::max(c, translation_cost(*d, tau, eps, inner, radius));
    return c;
  };

  const auto n_grid = static_cast<std::size_t>(std::floor(tau_max / step + 1e-9)) + 1;
  std::vector<double> grid(n_grid);
  for (std::size_t j = 0; j < n_grid; ++j) grid[j] = static_cast<double>(j) * step;
  const std::vector<double> costs = scan_costs(grid, cost, exec);

  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t j = 0; j < n_grid; ++j) {
    if (!(costs[j] < eps)) continue;
    if (!runs.empty() && runs.back().second + 1 == j) {
      runs.back().second = j;
    } else {
      runs.emplace_back(j, j);
    }
  }

  auto refine = [&](std::size_t r) {
    RunOutcome out;
    const auto [j0, j1] = runs[r];
    std::size_t best_j = j0;
    for (std::size_t j = j0; j <= j1; ++j) {
      if (costs[j] < costs[best_j]) best_j = j;
    }
    std::vector<double> candidates;
    if (j0 == 0) {
      candidates.push_back(0.0);
    } else {
      const double lo = std::max(0.0, grid[j0] - step);
      const double hi = std::min(tau_max, grid[j1] + step);
      const double t = golden_min(cost, lo, hi);
      if (cost(t) <= costs[best_j]) candidates.push_back(t);
      candidates.push_back(grid[best_j]);
    }
    for (double t : candidates) {
      bool all = true;
      double disp = 0.0;
      bool cert = true;
      for (const Divisor* d : divs) {
        const MatchResult m = match_translation(*d, t, eps, inner);
        all = all && m.ok;
        cert = cert && m.certified;
        disp = std::max(disp, m.max_displacement);
        if (!all) break;
      }
      if (all) {
        out = {true, t, disp, cert};
        break;
      }
    }
    return out;
  };

  std::vector<RunOutcome> outcomes(runs.size());
  const auto n_runs = static_cast<std::ptrdiff_t>(runs.size());
  if (exec == Exec::Serial) {
    for (std::ptrdiff_t r = 0; r < n_runs; ++r) outcomes[r] = refine(static_cast<std::size_t>(r));
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t r = 0; r < n_runs; ++r) outcomes[r] = refine(static_cast<std::size_t>(r));
  }

  AlmostPeriodReport rep;
  rep.epsilon = eps;
  rep.scan_min = -tau_max;
  rep.scan_max = tau_max;
  rep.step = step;
  rep.inner = inner;
  std::vector<RunOutcome> positive;
  bool has_zero = false;
  for (const RunOutcome& o : outcomes) {
    if (!o.verified) continue;
    rep.certified = rep.certified && o.certified;
    if (o.tau == 0.0) {
      has_zero = true;
    } else {
      positive.push_back(o);
    }
  }
  // Mirror the non-negative half so that the report is exactly symmetric.
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) {
    rep.taus.push_back(-it->tau);
    rep.displacements.push_back(it->displacement);
  }
  if (has_zero) {
    rep.taus.push_back(0.0);
    rep.displacements.push_back(0.0);
  }
  for (const RunOutcome& o : positive) {
    rep.taus.push_back(o.tau);
    rep.displacements.push_back(o.displacement);
  }
  rep.density_gap = kInf;
  if (rep.taus.size() >= 2) {
    rep.density_gap = 0.0;
    for (std::size_t k = 1; k < rep.taus.size(); ++k) {
      rep.density_gap = std::max(rep.density_gap, rep.taus[k] - rep.taus[k - 1]);
    }
  }
  return rep;
}

}  // namespace

AlmostPeriodReport scan_almost_periods(const Divisor& z, double eps, const StripWindow& inner, double tau_max,
                                       double step, Exec exec) {
  const Divisor* divs[] = {&z};
  return scan_impl(divs, eps, inner, tau_max, step, exec);
}

AlmostPeriodReport common_almost_periods(const Divisor& z, const Divisor& w, double eps,
                                         const StripWindow& inner, double tau_max, double step, Exec exec) {
  const Divisor* divs[] = {&z, &w};
  return scan_impl(divs, eps, inner, tau_max, step, exec);
}

bool lemma1_check(const Divisor& z, double tau1, double tau2, double eps, const StripWindow& inner) {
  const StripWindow outer = inner.expanded(eps);
  for (double t : {tau1, tau2}) {
    if (!is_almost_period(z, t, eps, outer)) {
      throw Error(ErrorCode::InvalidArgument, "lemma1_check: input tau is not an eps-almost-period");
    }
  }
  return is_almost_period(z, tau1 - tau2, 2.0 * eps, inner) &&
         is_almost_period(z, tau1 + tau2, 2.0 * eps, inner);
}

double lemma2_gap_bound(double L, double eps, std::span<const int> classes) {
  if (!(L > 0.0) || !(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "L and eps must be positive");
  if (classes.empty()) throw Error(ErrorCode::EmptyClasses, "no residue classes supplied");
  int widest = 0;
  for (int k : classes) widest = std::max(widest, std::abs(k));
  return L * (widest + 2);
}

std::vector<int> lemma2_classes(const AlmostPeriodReport& rz, const AlmostPeriodReport& rw, double L,
                                double eps) {
  if (!(L > 0.0) || !std::isfinite(L) || !(eps > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "L must be finite and positive, eps positive");
  }
  const double lo = std::max(rz.scan_min, rw.scan_min);
  const double hi = std::min(rz.scan_max, rw.scan_max);
  const auto n_cells = static_cast<long>(std::ceil(2.0 * L / eps));
  auto first_in = [](const std::vector<double>& taus, double a, double b) -> std::optional<double> {
    auto it = std::lower_bound(taus.begin(), taus.end(), a);
    if (it != taus.end() && *it <= b) return *it;
    return std::nullopt;
  };
  auto residue = [&](double tau, double base) {
    const long n = std::lround((tau - base) / (eps / 2.0));
    return std::clamp(n, 0L, n_cells);
  };
  std::vector<int> classes;
  std::set<long> seen;
  const long k_max = static_cast<long>(std::floor(std::max(std::abs(lo), std::abs(hi)) / L)) + 1;
  for (long step = 0; step <= 2 * k_max; ++step) {
    const long k = step % 2 == 1 ? (step + 1) / 2 : -(step / 2);
    const double a = static_cast<double>(k) * L;
    const double b = a + L;
    if (a < lo || b > hi) continue;
    const auto tz = first_in(rz.taus, a, b);
    const auto tw = first_in(rw.taus, a, b);
    if (!tz || !tw) continue;
    const long d = residue(*tz, a) - residue(*tw, a);
    if (seen.insert(d).second) classes.push_back(static_cast<int>(k));
  }
  return classes;
}

}  // namespace qpz
