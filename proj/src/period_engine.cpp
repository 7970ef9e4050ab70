#include "qpz/period_engine.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

namespace qpz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(cd z) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

std::vector<double> im_values(const Divisor& d, const StripWindow& window) {
  std::vector<double> ys;
  for (const DivisorPoint& p : d.points()) {
    if (window.contains(p.point)) ys.push_back(p.point.imag());
  }
  return ys;  // already sorted
}

double max_consecutive_gap(const std::vector<double>& ys, const StripWindow& window) {
  if (ys.size() < 2) return window.height();
  double g = 0.0;
  for (std::size_t k = 1; k < ys.size(); ++k) g = std::max(g, ys[k] - ys[k - 1]);
  return g;
}

enum class Status { Unvisited, Confirmed, Exited };

struct Translate {
  bool exited = false;
  std::size_t index = 0;
};

// The unique point within gamma/2 of p + i*shift, or an exit through the
// top or bottom of the divisor window.
Translate translate(const Divisor& d, cd p, double shift, double gamma) {
  const cd q = p + cd(0.0, shift);
  const std::vector<std::size_t> hits = d.within(q, 0.5 * gamma);
  if (hits.size() >= 2) {
    throw Error(ErrorCode::NoUniqueTranslate,
                "two points within gamma/2 of the translate of " + fmt(p) + "; gamma too large");
  }
  if (hits.size() == 1) return {false, hits[0]};
  const StripWindow& w = d.window();
  if (q.imag() + 0.5 * gamma > w.im_max || q.imag() - 0.5 * gamma < w.im_min) return {true, 0};
  throw Error(ErrorCode::PropagationBreak, "no translate of " + fmt(p) + " within gamma/2");
}

class Propagator {
 public:
  Propagator(const Divisor& z, const Divisor& w, double tau, double gamma, const StripWindow& window,
             double match_tol, double R)
      : div_{&z, &w}, tau_(tau), gamma_(gamma), window_(window), tol_(match_tol), R_(R) {
    for (int s = 0; s < 2; ++s) {
      state_[s].assign(div_[s]->size(), Status::Unvisited);
      image_[s].assign(div_[s]->size(), 0);
    }
  }

  cd point(int s, std::size_t k) const { return div_[s]->points()[k].point; }
  cd image(int s, std::size_t k) const { return point(s, image_[s][k]); }
  bool confirmed(int s, std::size_t k) const { return state_[s][k] == Status::Confirmed; }

  void seed(std::size_t anchor) {
    const Translate t = translate(*div_[0], point(0, anchor), tau_, gamma_);
    if (t.exited) throw Error(ErrorCode::PropagationBreak, "translate of the anchor leaves the divisor window");
    state_[0][anchor] = Status::Confirmed;
    image_[0][anchor] = t.index;
  }

  // Confirms every point of side s with Im in [lo, hi] against the pivot
  // (a point of the other side with known image).
  void confirm_range(int s, double lo, double hi, int pivot_side, std::size_t pivot) {
    const auto& pts = div_[s]->points();
    auto it = std::lower_bound(pts.begin(), pts.end(), lo,
                               [](const DivisorPoint& p, double y) { return p.point.imag() < y; });
    for (; it != pts.end() && it->point.imag() <= hi; ++it) {
      const auto k = static_cast<std::size_t>(it - pts.begin());
      if (window_.contains(it->point)) confirm(s, k, pivot_side, pivot);
    }
  }

  void confirm(int s, std::size_t k, int pivot_side, std::size_t pivot) {
    if (state_[s][k] != Status::Unvisited) return;
    const cd p = point(s, k);
    const Translate t = translate(*div_[s], p, tau_, gamma_);
    if (t.exited) {
      state_[s][k] = Status::Exited;
      ++exited_;
      return;
    }
    const cd q = point(s, t.index);
    if (div_[s]->points()[t.index].mult != div_[s]->points()[k].mult) {
      throw Error(ErrorCode::PropagationBreak, "multiplicity changes under translation at " + fmt(p));
    }
    const cd piv = point(pivot_side, pivot);
    const cd piv_img = image(pivot_side, pivot);
    if (std::abs((p - piv) - (q - piv_img)) > tol_) {
      throw Error(ErrorCode::PropagationBreak, "difference not preserved at Im = " + std::to_string(p.imag()));
    }
    ++quadruples_;
    state_[s][k] = Status::Confirmed;
    image_[s][k] = t.index;
  }

  // Confirmed point of side s in window with Im in [lo, hi], closest to
  // target. Closed: a progression of step exactly R has its points on the ends.
  std::optional<std::size_t> pick(int s, double lo, double hi, double target) const {
    std::optional<std::size_t> best;
    double best_d = kInf;
    const double slack = 1e-12 * std::max({1.0, std::abs(lo), std::abs(hi)});
    const auto& pts = div_[s]->points();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const double y = pts[k].point.imag();
      if (y < lo - slack || y > hi + slack || !confirmed(s, k) || !window_.contains(pts[k].point)) continue;
      const double d = std::abs(y - target);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  }

  // Slab chaining from the anchor, upward (dir = 1) or downward (dir = -1).
  void chain(std::size_t anchor, double dir) {
    std::size_t a = anchor;
    for (;;) {
      const double ya = point(0, a).imag();
      confirm_range(1, ya - 2.0 * R_ - 2.0, ya + 2.0 * R_ + 2.0, 0, a);
      const double b1 = ya + dir * R_, b2 = ya + dir * 2.0 * R_;
      const auto wl = pick(1, std::min(b1, b2), std::max(b1, b2), ya + dir * 1.5 * R_);
      if (!wl) return;
      const double c = ya + dir * 3.0 * R_;
      confirm_range(0, std::min(ya, c), std::max(ya, c), 1, *wl);
      const double n1 = ya + dir * 2.0 * R_;
      const auto next = pick(0, std::min(n1, c), std::max(n1, c), c);
      if (!next || *next == a) return;
      a = *next;
    }
  }

  // Whatever the chains did not reach is either exited or handled with the
  // nearest confirmed pivot of the other side; if none is close enough the
  // propagation has a hole.
  void sweep() {
    for (int s = 0; s < 2; ++s) {
      const auto& pts = div_[s]->points();
      for (std::size_t k = 0; k < pts.size(); ++k) {
        if (state_[s][k] != Status::Unvisited || !window_.contains(pts[k].point)) continue;
        const int o = 1 - s;
        const double y = pts[k].point.imag();
        std::optional<std::size_t> piv;
        double best = 2.0 * R_ + 2.0;
        for (std::size_t j = 0; j < div_[o]->size(); ++j) {
          const double d = std::abs(point(o, j).imag() - y);
          if (confirmed(o, j) && d < best) {
            best = d;
            piv = j;
          }
        }
        if (!piv) {
          const Translate t = translate(*div_[s], pts[k].point, tau_, gamma_);
          if (t.exited) {
            state_[s][k] = Status::Exited;
            ++exited_;
            continue;
          }
          throw Error(ErrorCode::PropagationBreak,
                      "slab chaining did not reach Im = " + std::to_string(y));
        }
        confirm(s, k, o, *piv);
      }
    }
  }

  std::uint64_t quadruples() const { return quadruples_; }
  std::uint64_t exited() const { return exited_; }

 private:
  const Divisor* div_[2];
  double tau_, gamma_;
  StripWindow window_;
  double tol_, R_;
  std::vector<Status> state_[2];
  std::vector<std::size_t> image_[2];
  std::uint64_t quadruples_ = 0;
  std::uint64_t exited_ = 0;
};

std::string realness_diagnostic(const Divisor& z, const StripWindow& window, cd anchor, cd d) {
  std::vector<double> res{window.re_min, window.re_max};
  for (const DivisorPoint& p : z.points()) {
    if (window.contains(p.point)) res.push_back(p.point.real());
  }
  std::sort(res.begin(), res.end());
  double gap = 0.0;
  for (std::size_t k = 1; k < res.size(); ++k) gap = std::max(gap, res[k] - res[k - 1]);
  const double drift = std::abs(d.real());
  const double room = std::min(anchor.real() - window.re_min, window.re_max - anchor.real());
  const double M_exit = std::ceil(room / drift);
  const double M_max = std::floor(window.height() / std::max(std::abs(d.imag()), 1e-300));
  std::ostringstream os;
  os.precision(6);
  os << "Re of the anchor translate differs by " << d.real() << "; iterating it leaves the window after M = "
     << M_exit << " steps (checkable M <= " << M_max << "); widest zero-free vertical band has width " << gap
     << (gap < 0.5 * window.width() / std::max<std::size_t>(res.size(), 1) ? " (no usable zero-free substrip)" : "");
  return os.str();
}

}  // namespace

double estimate_R(const Divisor& z, const Divisor& w, const StripWindow& window) {
  const std::vector<double> yz = im_values(z, window);
  const std::vector<double> yw = im_values(w, window);
  if (yz.empty() || yw.empty()) throw Error(ErrorCode::EmptyDivisor, "estimate_R needs points of both divisors");
  return std::max(max_consecutive_gap(yz, window), max_consecutive_gap(yw, window));
}

double estimate_gamma(const Divisor& z, const Divisor& w, double R) {
  // Differences closer than the cluster tolerance are one value seen through
  // rounding in the zero positions (it grows with |Im|), not a real gap.
  const std::vector<cd> raw = difference_set(z, w, 2.0 * R + 3.0);
  std::vector<cd> diffs;
  for (cd d : raw) {
    bool seen = false;
    for (auto it = diffs.rbegin(); it != diffs.rend() && it->imag() >= d.imag() - kTolCluster; ++it) {
      if (std::abs(*it - d) <= kTolCluster) {
        seen = true;
        break;
      }
    }
    if (!seen) diffs.push_back(d);
  }
  return 0.5 * min_gap(diffs).gamma;
}

PeriodCertificate extract_period(const Divisor& z, const Divisor& w, double tau, double gamma,
                                 const StripWindow& window, const ExtractOptions& opts) {
  if (!(tau > 0.0) || !(gamma > 0.0) || !(opts.match_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "extract_period needs tau > 0, gamma > 0, match_tol > 0");
  }
  const double R = estimate_R(z, w, window);

  const cd center = window.center();
  std::optional<std::size_t> anchor;
  double best = kInf;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const cd p = z.points()[k].point;
    if (!window.contains(p)) continue;
    if (std::abs(p - center) < best) {
      best = std::abs(p - center);
      anchor = k;
    }
  }

  Propagator prop(z, w, tau, gamma, window, opts.match_tol, R);
  prop.seed(*anchor);
  const cd a = prop.point(0, *anchor);
  const cd a_img = prop.image(0, *anchor);
  const cd d = a_img - a;
  if (std::abs(d.real()) >= opts.tol_real_period) {
    throw Error(ErrorCode::NonRealPeriod, realness_diagnostic(z, window, a, d));
  }
  if (!(d.imag() > 0.0)) throw Error(ErrorCode::PropagationBreak, "anchor translate is not above the anchor");

  PeriodCertificate cert;
  cert.period = d.imag();
  cert.anchor = a;
  cert.anchor_image = a_img;
  cert.tau_used = tau;
  cert.gamma = gamma;
  cert.R = R;
  cert.tol_real_period = opts.tol_real_period;
  cert.match_tol = opts.match_tol;
  cert.realness_steps = static_cast<std::int64_t>(std::floor(window.height() / cert.period));

  prop.chain(*anchor, 1.0);
  prop.chain(*anchor, -1.0);
  prop.sweep();
  cert.quadruples_checked = prop.quadruples();
  cert.points_exited = prop.exited();

  // Two-sided: the downward translate z'' of every point satisfies z'' + d = z.
  std::size_t checked = 0;
  for (const Divisor* div : {&z, &w}) {
    for (const DivisorPoint& p : div->points()) {
      if (!window.contains(p.point)) continue;
      const Translate t = translate(*div, p.point, -tau, gamma);
      if (t.exited) continue;
      const DivisorPoint& q = div->points()[t.index];
      if (q.mult != p.mult || std::abs((p.point - q.point) - d) > opts.match_tol) {
        throw Error(ErrorCode::PropagationBreak, "reverse translate mismatch at " + fmt(p.point));
      }
      ++checked;
    }
  }
  cert.two_sided = checked > 0;
  cert.verified_windows.push_back(window);
  return cert;
}

bool verify_period(const Divisor& z, double T, const StripWindow& window, double tol) {
  if (!(T > 0.0)) return false;
  const StripWindow& dw = z.window();
  const double r = std::nextafter(std::max(tol, 0.0), kInf);
  std::size_t checked = 0;
  for (const DivisorPoint& p : z.points()) {
    if (!window.contains(p.point)) continue;
    for (double dir : {1.0, -1.0}) {
      const cd q = p.point + cd(0.0, dir * T);
      if (q.imag() + tol > dw.im_max || q.imag() - tol < dw.im_min) continue;
      const std::optional<std::size_t> hit = z.nearest(q, r);
      if (!hit || z.points()[*hit].mult != p.mult) return false;
      ++checked;
    }
  }
  return checked > 0;
}

namespace {

std::vector<double> period_candidates(const Divisor& z, double T, const StripWindow& window, double tol) {
  std::vector<double> cands;
  for (int q = 2; q <= 64; ++q) cands.push_back(T / q);
  std::optional<cd> anchor;
  for (const DivisorPoint& p : z.points()) {
    if (window.contains(p.point)) {
      anchor = p.point;
      break;
    }
  }
  if (anchor) {
    for (const DivisorPoint& p : z.points()) {
      const double dy = p.point.imag() - anchor->imag();
      if (dy > tol && dy < T - tol && std::abs(p.point.real() - anchor->real()) <= std::max(tol, 1e-12)) {
        cands.push_back(dy);
      }
    }
  }
  std::sort(cands.begin(), cands.end());
  return cands;
}

}  // namespace

double minimal_period(const Divisor& z, double T, const StripWindow& window, double tol) {
  for (double c : period_candidates(z, T, window, tol)) {
    if (verify_period(z, c, window, tol)) return c;
  }
  return T;
}

double minimal_common_period(const Divisor& z, const Divisor& w, double T, const StripWindow& window,
                             double tol) {
  for (double c : period_candidates(z, T, window, tol)) {
    if (verify_period(z, c, window, tol) && verify_period(w, c, window, tol)) return c;
  }
  return T;
}

Commensurability commensurate(std::span<const double> periods, double tol) {
  if (periods.empty()) throw Error(ErrorCode::InvalidArgument, "commensurate needs at least one period");
  for (double p : periods) {
    if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "periods must be positive");
  }
  const double base = periods[0];
  std::vector<std::int64_t> num(periods.size()), den(periods.size());
  num[0] = den[0] = 1;
  for (std::size_t k = 1; k < periods.size(); ++k) {
    const long double r = static_cast<long double>(periods[k]) / base;
    long double x = r;
    std::int64_t h1 = 1, h2 = 0, k1 = 0, k2 = 1;
    bool found = false;
    for (int it = 0; it < 64; ++it) {
      const long double a = std::floor(x);
      const auto ai = static_cast<std::int64_t>(a);
      const std::int64_t h = ai * h1 + h2, q = ai * k1 + k2;
      if (q > kMaxDenominator) break;
      h2 = h1;
      h1 = h;
      k2 = k1;
      k1 = q;
      const long double err = std::fabs(r - static_cast<long double>(h) / q);
      if (h > 0 && err < tol * r && static_cast<long double>(q) * q * err < kSignificance) {
        num[k] = h;
        den[k] = q;
        found = true;
        break;
      }
      const long double frac = x - a;
      if (frac < 1e-18L) break;
      x = 1.0L / frac;
    }
    if (!found) {
      std::ostringstream os;
      os.precision(15);
      os << "ratio " << static_cast<double>(r) << " has no significant convergent with denominator <= "
         << kMaxDenominator;
      throw Error(ErrorCode::Incommensurable, os.str());
    }
  }
  std::int64_t L = 1;
  for (std::int64_t q : den) {
    L = std::lcm(L, q);
    if (L > kMaxDenominator * kMaxDenominator) throw Error(ErrorCode::Incommensurable, "common denominator overflow");
  }
  std::vector<std::int64_t> n(periods.size());
  std::int64_t g = 0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    n[k] = num[k] * (L / den[k]);
    g = std::gcd(g, n[k]);
  }
  double sum_t = 0.0, sum_n = 0.0;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    n[k] /= g;
    sum_t += periods[k];
    sum_n += static_cast<double>(n[k]);
  }
  Commensurability out;
  out.common_unit = sum_t / sum_n;
  out.multipliers = n;
  for (std::size_t k = 0; k < periods.size(); ++k) {
    if (std::abs(periods[k] - static_cast<double>(n[k]) * out.common_unit) >= tol * periods[k]) {
      throw Error(ErrorCode::Incommensurable, "periods do not share a common unit within tolerance");
    }
  }
  return out;
}

DecomposeResult decompose(const Divisor& z, const Divisor& w, std::span<const StripWindow> substrips,
                          std::span<const double> gamma_list, const DecomposeOptions& opts) {
  if (substrips.empty()) throw Error(ErrorCode::InvalidArgument, "decompose needs at least one substrip");
  if (!gamma_list.empty() && gamma_list.size() != substrips.size()) {
    throw Error(ErrorCode::InvalidArgument, "gamma list must match the substrips");
  }
  for (std::size_t k = 1; k < substrips.size(); ++k) {
    if (!substrips[k].contains(substrips[k - 1])) {
      throw Error(ErrorCode::InvalidArgument, "substrips must be nested and increasing");
    }
  }

  const std::size_t n = substrips.size();
  std::vector<PeriodCertificate> certs(n);
  std::vector<double> periods(n), gammas(n);
  std::vector<std::exception_ptr> errors(n);

  auto run = [&](std::size_t k) {
    const StripWindow& S = substrips[k];
    const Divisor zk = z.restricted(S);
    const Divisor wk = w.restricted(S);
    const double R = estimate_R(zk, wk, S);
    const double gamma = gamma_list.empty() ? estimate_gamma(zk, wk, R) : gamma_list[k];
    const double eps = 0.5 * gamma;
    const double tau_max = opts.tau_max > 0.0 ? opts.tau_max : 0.25 * S.height();
    if (!(S.height() > 2.0 * (tau_max + 2.0 * eps)) || !(S.width() > 2.0 * eps)) {
      throw Error(ErrorCode::InvalidArgument, "substrip too small for the scan range");
    }
    const StripWindow inner = S.shrunk(eps, tau_max + 2.0 * eps);
    const AlmostPeriodReport rep = common_almost_periods(zk, wk, eps, inner, tau_max, 0.25 * eps, opts.exec);
    auto it = std::find_if(rep.taus.begin(), rep.taus.end(), [](double t) { return t > 1.0; });
    if (it == rep.taus.end()) {
      throw Error(ErrorCode::DecompositionIncomplete, "substrip " + std::to_string(k) + " has no verified tau > 1");
    }
    certs[k] = extract_period(zk, wk, *it, gamma, S, opts.extract);
    periods[k] = minimal_common_period(zk, wk, certs[k].period, S, opts.period_tol);
    gammas[k] = gamma;
  };

  const auto nn = static_cast<std::ptrdiff_t>(n);
  if (opts.exec == Exec::Serial) {
    for (std::ptrdiff_t k = 0; k < nn; ++k) {
      try {
        run(static_cast<std::size_t>(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < nn; ++k) {
      try {
        run(static_cast<std::size_t>(k));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const Commensurability c = commensurate(periods, opts.commensurate_tol);
  DecomposeResult out;
  out.certificates = std::move(certs);
  out.gammas = std::move(gammas);
  for (int side = 0; side < 2; ++side) {
    const Divisor& d = side == 0 ? z : w;
    Decomposition dec;
    dec.common_unit = c.common_unit;
    dec.multipliers = c.multipliers;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<DivisorPoint> pts;
      for (const DivisorPoint& p : d.points()) {
        if (substrips[k].contains(p.point) && (k == 0 || !substrips[k - 1].contains(p.point))) pts.push_back(p);
      }
      dec.parts.push_back({Divisor(std::move(pts), substrips[k]), periods[k], substrips[k]});
    }
    (side == 0 ? out.z : out.w) = std::move(dec);
  }
  return out;
}

}  // namespace qpz
