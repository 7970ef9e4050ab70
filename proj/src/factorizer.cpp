#include "qpz/factorizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qpz/period_engine.hpp"

namespace qpz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * kPi;

std::string fmt(cd z) {
  std::ostringstream os;
  os.precision(12);
  os << "(" << z.real() << ", " << z.imag() << ")";
  return os.str();
}

// Smallest d with ratio^{d+1} / ((d+1)(1-ratio)) < eps; d = 0 also uses the
// exact tail -log(1-ratio).
std::pair<int, double> tail_degree(double ratio, double eps) {
  const double exact0 = -std::log1p(-ratio);
  if (std::isinf(eps)) return {0, exact0};
  double p = ratio;  // ratio^{d+1}
  for (int d = 0; d <= 10'000'000; ++d) {
    double b = p / ((d + 1) * (1.0 - ratio));
    if (d == 0) b = std::min(b, exact0);
    if (b < eps) return {d, b};
    p *= ratio;
    if (p == 0.0) return {d + 1, 0.0};
  }
  throw Error(ErrorCode::RadiusTooLarge, "tail correction degree exceeds 1e7");
}

TailCorrection correction_from_log_ratio(cd a, double T, double log_ratio, double eps, OffsetSide side) {
  if (side == OffsetSide::Inside) throw Error(ErrorCode::InvalidArgument, "inside offsets get no correction");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "tail budget must be positive");
  const double ratio = std::exp(log_ratio);
  if (!(ratio < 1.0)) {
    throw Error(ErrorCode::RadiusTooLarge, "series ratio " + std::to_string(ratio) + " >= 1 cannot be certified");
  }
  const auto [d, bound] = tail_degree(ratio, eps);
  TailCorrection tc;
  tc.side = side;
  tc.bound = bound;
  tc.ratio = ratio;
  const double sgn = side == OffsetSide::Right ? -1.0 : 1.0;
  for (int m = 1; m <= d; ++m) tc.coeffs.push_back(-std::exp(sgn * kTwoPi * m * a / T) / static_cast<double>(m));
  return tc;
}

// v = w exp(-2 pi a/T) for Inside/Right, exp(2 pi a/T)/w for Left, in log form.
cd log_v(OffsetSide side, cd a, double T, cd z) {
  const cd t = (kTwoPi / T) * (z - a);
  return side == OffsetSide::Left ? -t : t;
}

cd neg_series(cd v, std::size_t d) {
  cd acc = 0.0, p = 1.0;
  for (std::size_t m = 1; m <= d; ++m) {
    p *= v;
    acc -= p / static_cast<double>(m);
  }
  return acc;
}

}  // namespace

std::string_view side_name(OffsetSide s) {
  switch (s) {
    case OffsetSide::Inside: return "inside";
    case OffsetSide::Right: return "right";
    case OffsetSide::Left: return "left";
  }
  return "inside";
}

TailCorrection tail_correction(cd a, double T, double radius, double eps, OffsetSide side) {
  if (!(T > 0.0) || !(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "T and radius must be positive");
  const double s = side == OffsetSide::Left ? 1.0 : -1.0;
  return correction_from_log_ratio(a, T, std::log(radius) + s * kTwoPi * a.real() / T, eps, side);
}

cd PeriodicFactor::eval_offset(std::size_t j, cd z) const {
  const TailCorrection& tc = corrections[j];
  const cd v = std::exp(log_v(tc.side, offsets[j], period, z));
  return (1.0 - v) * std::exp(-neg_series(v, tc.coeffs.size()));
}

cd PeriodicFactor::eval(cd z) const {
  cd acc = 1.0;
  for (std::size_t j = 0; j < offsets.size(); ++j) acc *= eval_offset(j, z);
  return acc;
}

cd PeriodicFactor::phase_value(cd z) const {
  cd acc = 1.0;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    const TailCorrection& tc = corrections[j];
    const cd lv = log_v(tc.side, offsets[j], period, z);
    cd h;
    if (lv.real() > 0.0) {
      h = std::exp(-lv.real()) - std::polar(1.0, lv.imag());  // (1 - v) / |v|
    } else {
      h = 1.0 - std::exp(lv);
    }
    double q_im = 0.0;
    if (!tc.coeffs.empty()) q_im = neg_series(std::exp(lv), tc.coeffs.size()).imag();
    acc *= h * std::polar(1.0, -q_im);
    const double m = std::abs(acc);
    if (m > 0.0 && std::isfinite(m)) acc /= m;
  }
  return acc;
}

PeriodicFactor build_factor(std::span<const cd> offsets, double T, const StripWindow& window,
                            std::span<const double> eps_budget) {
  if (!(T > 0.0) || !std::isfinite(T)) throw Error(ErrorCode::InvalidArgument, "period must be positive");
  if (!eps_budget.empty() && eps_budget.size() != 1 && eps_budget.size() != offsets.size()) {
    throw Error(ErrorCode::InvalidArgument, "eps_budget needs one entry per offset, a single entry, or none");
  }
  PeriodicFactor f;
  f.period = T;
  f.window = window;
  for (std::size_t j = 0; j < offsets.size(); ++j) {
    cd a = offsets[j];
    double y = std::fmod(a.imag(), T);
    if (y < 0.0) y += T;
    if (y >= T) y = 0.0;
    a = {a.real(), y};
    double eps = kDefaultBudget / static_cast<double>(std::max<std::size_t>(offsets.size(), 1));
    if (eps_budget.size() == 1) eps = eps_budget[0];
    if (eps_budget.size() == offsets.size() && !eps_budget.empty()) eps = eps_budget[j];

    TailCorrection tc;
    tc.side = OffsetSide::Inside;
    if (a.real() > window.re_min + kOffsetEdgeTol && a.real() < window.re_max - kOffsetEdgeTol) {
      // no correction
    } else if (a.real() >= window.re_max + kOffsetEdgeTol) {
      tc = correction_from_log_ratio(a, T, kTwoPi * (window.re_max - a.real()) / T, eps, OffsetSide::Right);
    } else if (a.real() <= window.re_min - kOffsetEdgeTol) {
      tc = correction_from_log_ratio(a, T, kTwoPi * (a.real() - window.re_min) / T, eps, OffsetSide::Left);
    } else {
      throw Error(ErrorCode::OffsetOnBoundary, "offset " + fmt(a) + " lies on a window edge");
    }
    f.offsets.push_back(a);
    f.corrections.push_back(std::move(tc));
  }
  return f;
}

double verify_tail_bound(const PeriodicFactor& factor, const StripWindow& window, int samples, Exec exec) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < factor.offsets.size(); ++j) {
    if (factor.corrections[j].side != OffsetSide::Inside) idx.push_back(j);
  }
  if (idx.empty()) return 0.0;
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
  const std::size_t per = n * n;
  auto point = [&](std::size_t k) {
    const std::size_t i = k % n, r = k / n;
    const double x = window.re_min + window.width() * (n == 1 ? 0.5 : static_cast<double>(i) / (n - 1));
    const double y = factor.period * static_cast<double>(r) / n;
    return cd(x, y);
  };
  std::vector<double> logmod;
  parallel_fill(
      idx.size() * per,
      [&](std::size_t k) { return std::log(std::abs(factor.eval_offset(idx[k / per], point(k % per)))); },
      logmod, exec);
  double worst = 0.0;
  for (std::size_t k = 0; k < logmod.size(); ++k) {
    const double bound = factor.corrections[idx[k / per]].bound;
    if (!(std::abs(logmod[k]) < bound)) {
      std::ostringstream os;
      os.precision(6);
      os << "log-modulus " << logmod[k] << " outside +-" << bound << " at " << fmt(point(k % per));
      throw Error(ErrorCode::BoundViolated, os.str());
    }
    worst = std::max(worst, std::abs(std::exp(logmod[k]) - 1.0));
  }
  return worst;
}

QuotientCertificate quotient_certify(const Quasipolynomial& f, std::span<const PeriodicFactor> factors,
                                     const StripWindow& window, const QuotientOptions& opts) {
  FindOptions fo;
  fo.tol_zero = opts.tol_zero;
  fo.winding = opts.winding;
  fo.exec = opts.exec;
  const ZeroList zl = find_zeros(f, window, fo);

  std::vector<std::pair<cd, int>> fz;
  for (const ZeroEntry& e : zl.entries) fz.emplace_back(e.point, e.multiplicity);

  std::vector<std::pair<cd, int>> gz;
  for (const PeriodicFactor& F : factors) {
    for (cd a : F.offsets) {
      const auto m0 = static_cast<long long>(std::ceil((window.im_min - a.imag()) / F.period)) - 1;
      const auto m1 = static_cast<long long>(std::floor((window.im_max - a.imag()) / F.period)) + 1;
      for (long long m = m0; m <= m1; ++m) {
        const cd p = a + cd(0.0, F.period * static_cast<double>(m));
        if (!window.contains_closed(p)) continue;
        auto it = std::find_if(gz.begin(), gz.end(),
                               [&](const auto& g) { return std::abs(g.first - p) <= opts.match_tol; });
        if (it != gz.end()) {
          ++it->second;
        } else {
          gz.emplace_back(p, 1);
        }
      }
    }
  }

  QuotientCertificate qc;
  for (const auto& z : fz) qc.f_zeros += z.second;
  for (const auto& g : gz) qc.factor_zeros += g.second;
  if (fz.size() != gz.size()) {
    throw Error(ErrorCode::ZeroMismatch, "f has " + std::to_string(fz.size()) + " distinct zeros in the window, the factors " +
                                             std::to_string(gz.size()));
  }
  for (const auto& z : fz) {
    auto it = std::find_if(gz.begin(), gz.end(), [&](const auto& g) {
      return std::abs(g.first - z.first) <= opts.match_tol && g.second == z.second;
    });
    if (it == gz.end()) throw Error(ErrorCode::ZeroMismatch, "zero " + fmt(z.first) + " of f has no factor zero");
  }

  qc.exclusion_radius = 10.0 * kTolCluster;
  const double step = opts.grid_step > 0.0 ? opts.grid_step : window.diameter() / 256.0;
  const Grid grid = Grid::covering(window, step);
  qc.grid_points = grid.size();
  const double min_log = grid_min(
      grid,
      [&](cd z) {
        for (const auto& p : fz) {
          if (std::abs(z - p.first) < qc.exclusion_radius) return std::numeric_limits<double>::quiet_NaN();
        }
        double l = eval_scaled(f, z).log_abs();
        for (const PeriodicFactor& F : factors) {
          for (std::size_t j = 0; j < F.offsets.size(); ++j) l -= std::log(std::abs(F.eval_offset(j, z)));
        }
        return l;
      },
      opts.exec);
  qc.min_modulus = std::exp(min_log);

  std::vector<PhaseSource> src{phase_source(f, opts.winding)};
  for (const PeriodicFactor& F : factors) src.push_back({[&F](cd z) { return F.phase_value(z); }, 1e-12, -1});
  qc.zero_count = winding_number(src, window, opts.winding);
  qc.passed = qc.zero_count == 0 && qc.min_modulus > 0.0 && std::isfinite(qc.min_modulus);
  return qc;
}

namespace {

struct Line {
  double re = 0.0;
  std::vector<std::pair<double, int>> pts;  // (Im, mult), sorted by Im
  double spacing = 0.0;
  std::size_t residues = 0;  // leading points forming one period
};

// Smallest s such that every point's translate by s is again a point of the
// line with the same multiplicity, unless it leaves the window.
double line_spacing(const Line& line, const StripWindow& window) {
  const auto& ys = line.pts;
  for (std::size_t j = 1; j < ys.size(); ++j) {
    const double s = ys[j].first - ys[0].first;
    const double tol = 1e-6 * std::max(1.0, s);
    bool ok = true;
    for (const auto& [y, mult] : ys) {
      const double t = y + s;
      if (t > window.im_max - tol) continue;
      auto it = std::find_if(ys.begin(), ys.end(), [&](const auto& q) { return std::abs(q.first - t) <= tol; });
      if (it == ys.end() || it->second != mult) {
        ok = false;
        break;
      }
    }
    if (ok) return s;
  }
  return 0.0;
}

}  // namespace

FitResult fit_cosh_form(const Quasipolynomial& qp, const ZeroList& zeros, const StripWindow& window) {
  const double top = qp.lambda_top(), bottom = qp.lambda_bottom();
  if (qp.size() >= 2) {
    std::vector<double> gaps;
    for (const Term& t : qp.terms()) {
      if (t.lambda != bottom) gaps.push_back(t.lambda - bottom);
    }
    try {
      commensurate(gaps, 1e-9);
    } catch (const Error& e) {
      throw Error(ErrorCode::SpectrumMismatch, "frequencies are not an arithmetic progression");
    }
  }

  std::vector<ZeroEntry> es;
  for (const ZeroEntry& e : zeros.entries) {
    if (window.contains_closed(e.point)) es.push_back(e);
  }
  if (es.empty()) throw Error(ErrorCode::NoLineStructure, "no zeros in the window");
  std::sort(es.begin(), es.end(), [](const ZeroEntry& a, const ZeroEntry& b) { return a.point.real() < b.point.real(); });
  const double line_tol = 10.0 * zeros.tol_cluster;
  std::vector<Line> lines;
  std::vector<double> re_sum;
  for (std::size_t k = 0; k < es.size(); ++k) {
    if (k == 0 || es[k].point.real() - es[k - 1].point.real() > line_tol) {
      lines.emplace_back();
      re_sum.push_back(0.0);
    }
    lines.back().pts.emplace_back(es[k].point.imag(), es[k].multiplicity);
    re_sum.back() += es[k].point.real();
  }

  double s_ref = 0.0;
  FitResult out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    Line& L = lines[i];
    L.re = re_sum[i] / static_cast<double>(L.pts.size());
    std::sort(L.pts.begin(), L.pts.end());
    if (L.pts.size() >= 2) {
      L.spacing = line_spacing(L, window);
      if (L.spacing == 0.0) {
        throw Error(ErrorCode::NoLineStructure, "zeros near Re = " + std::to_string(L.re) + " are not a progression");
      }
      if (s_ref == 0.0) {
        s_ref = L.spacing;
      } else if (std::abs(L.spacing - s_ref) > 1e-6 * s_ref) {
        throw Error(ErrorCode::SpacingMismatch, "line spacings " + std::to_string(s_ref) + " and " +
                                                    std::to_string(L.spacing) + " disagree");
      }
      L.residues = 0;
      while (L.residues < L.pts.size() &&
             L.pts[L.residues].first < L.pts[0].first + L.spacing - 1e-6 * std::max(1.0, L.spacing)) {
        ++L.residues;
      }
    } else {
      L.residues = 1;
    }
    int count = 0;
    for (const auto& p : L.pts) count += p.second;
    out.clusters.push_back({L.re, count, L.spacing});
  }
  if (s_ref == 0.0) throw Error(ErrorCode::NoLineStructure, "no line carries two zeros in the window");

  int N = 0;
  for (const Line& L : lines) {
    for (std::size_t r = 0; r < L.residues; ++r) N += L.pts[r].second;
  }
  if (N > 24) throw Error(ErrorCode::NoLineStructure, "more than 24 cosh factors");
  const double omega = (top - bottom) / (2.0 * N);
  if (!(omega > 0.0) || std::abs(omega - kPi / s_ref) > 1e-8 * omega) {
    throw Error(ErrorCode::SpectrumMismatch, "N * omega from the zeros does not match the spectrum width");
  }
  for (const Term& t : qp.terms()) {
    const double j = (t.lambda - bottom) / (2.0 * omega);
    if (std::abs(j - std::round(j)) > 1e-6) {
      throw Error(ErrorCode::SpectrumMismatch, "frequency " + std::to_string(t.lambda) + " is off the progression");
    }
  }

  PeriodicProductForm form;
  form.beta = 0.5 * (top + bottom);
  form.omega = omega;
  for (const Line& L : lines) {
    const double spacing = L.spacing > 0.0 ? L.spacing : kPi / omega;
    for (std::size_t r = 0; r < L.residues; ++r) {
      // Average Im b over the residue class, each reduced next to the first.
      double ref = 0.0, acc = 0.0;
      int n = 0;
      for (const auto& p : L.pts) {
        const double k = (p.first - L.pts[r].first) / spacing;
        if (std::abs(k - std::round(k)) > 1e-6) continue;
        double ib = 0.5 * kPi - omega * p.first;
        if (n == 0) {
          ref = ib;
        } else {
          ib -= kPi * std::round((ib - ref) / kPi);
        }
        acc += ib;
        ++n;
      }
      const cd b(-L.re * omega, acc / n);
      for (int m = 0; m < L.pts[r].second; ++m) form.offsets.push_back(b);
    }
  }
  form.c = 1.0;
  form = canonical(form);

  // Least-squares C over a 4x4 interior grid.
  cd num = 0.0;
  double den = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const cd z(window.re_min + window.width() * (i + 0.5) / 4.0, window.im_min + window.height() * (j + 0.37) / 4.0);
      const cd p = form.eval(z);
      num += eval(qp, z) * std::conj(p);
      den += std::norm(p);
    }
  }
  if (!(den > 0.0)) throw Error(ErrorCode::NoLineStructure, "product vanishes on the fitting grid");
  form.c *= num / den;
  out.form = form;
  out.residual = sup_diff(qp, expand_product(form), window, default_grid_step(window));
  return out;
}

}  // namespace qpz
