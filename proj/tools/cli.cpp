#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

namespace qpz::cli {

namespace {

constexpr double kLineTol = 1e-7;

Json error_json(const Error& e) { return Json{{"code", std::string(error_name(e.code()))}, {"message", e.what()}}; }

std::vector<std::vector<DivisorPoint>> vertical_lines(const Divisor& d, const StripWindow& window) {
  std::vector<DivisorPoint> pts;
  for (const DivisorPoint& p : d.points()) {
    if (window.contains(p.point)) pts.push_back(p);
  }
  std::stable_sort(pts.begin(), pts.end(),
                   [](const DivisorPoint& a, const DivisorPoint& b) { return a.point.real() < b.point.real(); });
  std::vector<std::vector<DivisorPoint>> lines;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (k == 0 || pts[k].point.real() - pts[k - 1].point.real() > kLineTol) lines.emplace_back();
    lines.back().push_back(pts[k]);
  }
  return lines;
}

double mean_re(const std::vector<DivisorPoint>& line) {
  double s = 0.0;
  for (const DivisorPoint& p : line) s += p.point.real();
  return s / static_cast<double>(line.size());
}

double min_diff_gap(const Divisor& z, const Divisor& w, const StripWindow& win) {
  const Divisor zs = z.restricted(win), ws = w.restricted(win);
  const std::vector<cd> diffs = difference_set(zs, ws, win.height());
  return min_gap(diffs).gap;
}

}  // namespace

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Periodic: return "PERIODIC";
    case Verdict::NoDiscreteDifferences: return "NO_DISCRETE_DIFFERENCES";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

AnalyzeOutcome analyze(const Divisor& z, const Divisor& w, const StripWindow& window, const AnalyzeParams& p) {
  AnalyzeOutcome res;
  Json& out = res.payload;
  out = Json::object();
  Json diagnostics = Json::array();
  auto finish = [&](Verdict v) {
    res.verdict = v;
    out["verdict"] = std::string(verdict_name(v));
    out["diagnostics"] = diagnostics;
    return res;
  };

  // Difference-set gap at a quarter of the height and at the full height.
  const double H = window.height();
  const double c = window.center().imag();
  const StripWindow small(window.re_min, window.re_max, c - H / 8.0, c + H / 8.0);
  double g_small = 0.0, g_full = 0.0;
  try {
    g_small = min_diff_gap(z, w, small);
    g_full = min_diff_gap(z, w, window);
  } catch (const Error& e) {
    diagnostics.push_back(error_json(e));
    return finish(Verdict::Inconclusive);
  }
  out["gap_trend"] = Json{{"heights", Json::array({num(small.height()), num(H)})},
                          {"gaps", Json::array({num(g_small), num(g_full)})}};
  if (g_small >= 2.0 * g_full) return finish(Verdict::NoDiscreteDifferences);

  double R = 0.0, gamma = 0.0;
  try {
    R = estimate_R(z, w, window);
    gamma = estimate_gamma(z.restricted(window), w.restricted(window), R);
  } catch (const Error& e) {
    diagnostics.push_back(error_json(e));
    return finish(Verdict::Inconclusive);
  }
  const double eps = std::min(p.eps, 0.5 * gamma);
  const double tau_max = p.tau_max > 0.0 ? p.tau_max : 0.25 * H;
  out["R"] = num(R);
  out["gamma"] = num(gamma);
  out["eps"] = num(eps);
  out["tau_max"] = num(tau_max);
  if (!(window.height() > 2.0 * (tau_max + 2.0 * eps)) || !(window.width() > 2.0 * eps)) {
    throw Error(ErrorCode::InvalidArgument, "window too small for tau_max");
  }
  const StripWindow inner = window.shrunk(eps, tau_max + 2.0 * eps);
  const AlmostPeriodReport rep = common_almost_periods(z, w, eps, inner, tau_max, 0.25 * eps, p.exec);
  out["almost_periods"] = to_json(rep);
  auto it = std::find_if(rep.taus.begin(), rep.taus.end(), [](double t) { return t > 1.0; });
  if (it == rep.taus.end()) {
    diagnostics.push_back(Json{{"code", "NoAlmostPeriod"}, {"message", "no verified almost period above 1"}});
    return finish(Verdict::Inconclusive);
  }

  PeriodCertificate cert;
  try {
    cert = extract_period(z, w, *it, gamma, window);
  } catch (const Error& e) {
    diagnostics.push_back(error_json(e));
    return finish(Verdict::Inconclusive);
  }
  out["certificate"] = to_json(cert);
  const double T0 = minimal_common_period(z, w, cert.period, window, p.period_tol);

  std::vector<double> periods;
  Json parts = Json::array();
  for (const auto& line : vertical_lines(z, window)) {
    const Divisor ld(line, z.window());
    const double Tk = minimal_period(ld, T0, window, p.period_tol);
    periods.push_back(Tk);
    int count = 0;
    for (const DivisorPoint& q : line) count += q.mult;
    parts.push_back(Json{{"re", num(mean_re(line))}, {"count", count}, {"period", num(Tk)}});
  }
  try {
    const Commensurability cm = commensurate(periods, 1e-9);
    out["common_unit"] = num(cm.common_unit);
    out["multipliers"] = cm.multipliers;
  } catch (const Error& e) {
    diagnostics.push_back(error_json(e));
    return finish(Verdict::Inconclusive);
  }
  out["period"] = num(T0);
  out["parts"] = parts;
  res.period = T0;
  return finish(Verdict::Periodic);
}

Json factor_payload(const Quasipolynomial& qp, const StripWindow& window, double budget, const StripWindow* inner,
                    Exec exec, std::vector<std::string>& warnings) {
  FindOptions fo;
  fo.exec = exec;
  const ZeroList zl = find_zeros(qp, window, fo);
  Json out = Json::object();
  out["zeros"] = to_json(zl);
  const StripWindow fw = inner ? *inner : window;

  std::vector<PeriodicFactor> factors;
  try {
    const FitResult fit = fit_cosh_form(qp, zl, window);
    out["method"] = "cosh_fit";
    out["fit"] = to_json(fit);
    std::vector<cd> offsets;
    for (cd b : fit.form.offsets) offsets.push_back((cd(0.0, 0.5 * kPi) - b) / fit.form.omega);
    const double each = budget / static_cast<double>(std::max<std::size_t>(offsets.size(), 1));
    const double eb[] = {each};
    factors.push_back(build_factor(offsets, kPi / fit.form.omega, fw, eb));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SpectrumMismatch && e.code() != ErrorCode::NoLineStructure &&
        e.code() != ErrorCode::SpacingMismatch) {
      throw;
    }
    warnings.push_back(std::string("cosh fit not applicable: ") + e.what());
    out["method"] = "per_line";
    const Divisor z = Divisor::from_zeros(zl);
    const auto lines = vertical_lines(z, window);
    std::size_t n_off = 0;
    std::vector<std::pair<double, std::vector<cd>>> specs;
    for (const auto& line : lines) {
      if (line.size() < 2) throw Error(ErrorCode::NoLineStructure, "a line of zeros has a single point in the window");
      std::vector<DivisorPoint> sorted = line;
      std::sort(sorted.begin(), sorted.end(),
                [](const DivisorPoint& a, const DivisorPoint& b) { return a.point.imag() < b.point.imag(); });
      const Divisor ld(sorted, z.window());
      const double span = sorted.back().point.imag() - sorted.front().point.imag();
      const double T = minimal_period(ld, span, window, 1e-8);
      std::vector<cd> offs;
      for (const DivisorPoint& q : sorted) {
        if (q.point.imag() < sorted.front().point.imag() + T - 1e-8) {
          for (int m = 0; m < q.mult; ++m) offs.push_back(q.point);
        }
      }
      n_off += offs.size();
      specs.emplace_back(T, std::move(offs));
    }
    const double each = budget / static_cast<double>(std::max<std::size_t>(n_off, 1));
    const double eb[] = {each};
    for (const auto& [T, offs] : specs) factors.push_back(build_factor(offs, T, fw, eb));
  }

  Json fj = Json::array();
  double tail_dev = 0.0;
  for (const PeriodicFactor& f : factors) {
    fj.push_back(to_json(f));
    tail_dev = std::max(tail_dev, verify_tail_bound(f, fw, 10000, exec));
  }
  out["factors"] = fj;
  out["tail_max_deviation"] = num(tail_dev);
  QuotientOptions qo;
  qo.exec = exec;
  const QuotientCertificate qc = quotient_certify(qp, factors, window, qo);
  out["quotient"] = to_json(qc);
  return out;
}

namespace {

struct Report {
  std::string command;
  Json inputs = Json::object();
  Json outputs = Json::object();
  std::vector<std::string> warnings;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  std::string dump() const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    Json j{{"command", command},
           {"inputs", inputs},
           {"outputs", outputs},
           {"timing", Json{{"wall_seconds", secs}}},
           {"warnings", warnings}};
    return j.dump(2) + "\n";
  }
};

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    write_text_file(out_path, text);
  }
}

std::string fmt_g(double x) {
  if (!std::isfinite(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string s;
  for (std::size_t k = 0; k < header.size(); ++k) s += (k ? "," : "") + header[k];
  s += "\r\n";
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) s += (k ? "," : "") + fmt_g(r[k]);
    s += "\r\n";
  }
  return s;
}

std::string svg_scatter(const std::string& title, const std::vector<std::pair<double, double>>& pts,
                        const std::string& xlabel, const std::string& ylabel) {
  const double W = 480, Hh = 480, m = 48;
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (const auto& [x, y] : pts) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 - x0 < 1e-12) { x0 -= 1; x1 += 1; }
  if (y1 - y0 < 1e-12) { y0 -= 1; y1 += 1; }
  char buf[256];
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"480\" height=\"480\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                m, m, W - 2 * m, Hh - 2 * m);
  s += buf;
  s += "<text x=\"240\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";
  std::snprintf(buf, sizeof buf, "<text x=\"240\" y=\"470\" text-anchor=\"middle\" font-size=\"11\">%s [%.4g, %.4g]</text>\n",
                xlabel.c_str(), x0, x1);
  s += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"14\" y=\"240\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 240)\">%s [%.4g, %.4g]</text>\n",
                ylabel.c_str(), y0, y1);
  s += buf;
  for (const auto& [x, y] : pts) {
    const double px = m + (x - x0) / (x1 - x0) * (W - 2 * m);
    const double py = Hh - m - (y - y0) / (y1 - y0) * (Hh - 2 * m);
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"2\" fill=\"steelblue\"/>\n", px, py);
    s += buf;
  }
  s += "</svg>\n";
  return s;
}

double jnum(const Json& j) { return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN(); }

int cmd_plot(const std::string& report_path, const std::string& prefix, std::ostream& out) {
  const Json j = read_json_file(report_path);
  const Json& o = (j.is_object() && j.contains("outputs")) ? j["outputs"] : j;

  std::vector<std::vector<double>> zrows;
  std::vector<std::pair<double, double>> zpts;
  auto take_points = [&](const Json& arr) {
    for (const Json& p : arr) {
      const double re = jnum(p.value("re", Json())), im = jnum(p.value("im", Json()));
      zrows.push_back({re, im, static_cast<double>(p.value("mult", 1))});
      zpts.emplace_back(re, im);
    }
  };
  if (o.is_object()) {
    if (o.contains("zeros") && o["zeros"].is_array()) {
      take_points(o["zeros"]);
    } else if (o.contains("zeros") && o["zeros"].is_object() && o["zeros"].contains("zeros")) {
      take_points(o["zeros"]["zeros"]);
    } else if (o.contains("divisor_z")) {
      take_points(o["divisor_z"]["points"]);
    } else if (o.contains("points") && o["points"].is_array()) {
      take_points(o["points"]);
    }
  }

  std::vector<std::vector<double>> trows;
  std::vector<std::pair<double, double>> tpts;
  const Json* rep = nullptr;
  if (o.is_object() && o.contains("almost_periods")) rep = &o["almost_periods"];
  if (o.is_object() && o.contains("taus")) rep = &o;
  if (rep) {
    const Json& ts = (*rep)["taus"];
    const Json& ds = (*rep)["displacements"];
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double d = k < ds.size() ? jnum(ds[k]) : std::numeric_limits<double>::quiet_NaN();
      trows.push_back({jnum(ts[k]), d});
      tpts.emplace_back(jnum(ts[k]), d);
    }
  }

  // Self-differences of the plotted points with |Im| <= 10.
  std::vector<std::vector<double>> drows;
  std::vector<std::pair<double, double>> dpts;
  if (!zpts.empty()) {
    std::vector<cd> diffs;
    for (const auto& a : zpts) {
      for (const auto& b : zpts) {
        const cd d = cd(a.first, a.second) - cd(b.first, b.second);
        if (std::abs(d.imag()) <= 10.0) diffs.push_back(d);
      }
    }
    std::sort(diffs.begin(), diffs.end(), im_re_less);
    std::vector<cd> uniq;
    for (cd d : diffs) {
      if (uniq.empty() || std::abs(uniq.back() - d) > kDedupTolerance) uniq.push_back(d);
    }
    for (cd d : uniq) {
      drows.push_back({d.real(), d.imag()});
      dpts.emplace_back(d.real(), d.imag());
    }
  }

  write_text_file(prefix + "_zeros.csv", csv({"re", "im", "mult"}, zrows));
  write_text_file(prefix + "_zeros.svg", svg_scatter("zeros", zpts, "Re", "Im"));
  write_text_file(prefix + "_taus.csv", csv({"tau", "displacement"}, trows));
  write_text_file(prefix + "_taus.svg", svg_scatter("almost periods", tpts, "tau", "displacement"));
  write_text_file(prefix + "_differences.csv", csv({"re", "im"}, drows));
  write_text_file(prefix + "_differences.svg", svg_scatter("differences", dpts, "Re", "Im"));
  out << "wrote " << prefix << "_{zeros,taus,differences}.{csv,svg}\n";
  return kExitOk;
}

int cmd_verify(const std::string& report_path, std::ostream& out) {
  const Json j = read_json_file(report_path);
  if (!j.is_object() || !j.contains("command") || !j["command"].is_string()) {
    throw Error(ErrorCode::ParseError, report_path + ": not a run report (missing command)");
  }
  const std::string cmd = j["command"].get<std::string>();
  const Json& in = j.contains("inputs") ? j["inputs"] : Json();
  const Json& o = j.contains("outputs") ? j["outputs"] : Json();
  bool ok = true;
  Json checks = Json::array();
  auto check = [&](const std::string& name, bool pass) {
    checks.push_back(Json{{"check", name}, {"pass", pass}});
    ok = ok && pass;
  };

  if (cmd == "zeros") {
    const Quasipolynomial qp = qp_from_json(in.at("qp"), "inputs.qp");
    const ZeroList zl = zeros_from_json(o.at("zeros"), "outputs.zeros");
    const int n = count_zeros_perturbed(qp, zl.window, 1e-9 * zl.window.diameter()).count;
    check("argument principle count", n == zl.total_multiplicity());
    bool small = true;
    for (const ZeroEntry& e : zl.entries) {
      small = small && std::abs(eval_scaled(qp, e.point).mantissa) <= 1e-8 * qp.max_coeff_abs();
    }
    check("residuals", small);
  } else if (cmd == "analyze") {
    if (!o.contains("certificate")) {
      check("certificate present", false);
    } else {
      const Divisor z = divisor_from_json(o.at("divisor_z"), "outputs.divisor_z");
      const Divisor w = o.contains("divisor_w") ? divisor_from_json(o["divisor_w"], "outputs.divisor_w") : z;
      const PeriodCertificate c = certificate_from_json(o["certificate"], "outputs.certificate");
      const double tol = in.value("period_tol", 1e-8);
      for (const StripWindow& win : c.verified_windows) {
        check("certificate period on Z", verify_period(z, c.period, win, tol));
        check("certificate period on W", verify_period(w, c.period, win, tol));
      }
      if (o.contains("period") && o["period"].is_number()) {
        const double T0 = o["period"].get<double>();
        const StripWindow win = window_from_json(in.at("window"), "inputs.window");
        check("minimal period on Z", verify_period(z, T0, win, tol));
        check("minimal period on W", verify_period(w, T0, win, tol));
      }
    }
  } else if (cmd == "factor") {
    const Quasipolynomial qp = qp_from_json(in.at("qp"), "inputs.qp");
    const StripWindow win = window_from_json(in.at("window"), "inputs.window");
    std::vector<PeriodicFactor> fs;
    const Json& arr = o.at("factors");
    for (std::size_t k = 0; k < arr.size(); ++k) fs.push_back(factor_from_json(arr[k], "outputs.factors[" + std::to_string(k) + "]"));
    for (const PeriodicFactor& f : fs) {
      bool pass = true;
      try {
        verify_tail_bound(f, f.window, 10000);
      } catch (const Error&) {
        pass = false;
      }
      check("tail bounds", pass);
    }
    const QuotientCertificate qc = quotient_certify(qp, fs, win);
    check("quotient zero-free", qc.passed);
  } else {
    throw Error(ErrorCode::InvalidArgument, "cannot verify reports of command '" + cmd + "'");
  }
  Json res{{"command", "verify"}, {"verified_command", cmd}, {"checks", checks}, {"verified", ok}};
  out << res.dump(2) << "\n";
  return ok ? kExitOk : kExitNegative;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeros, almost periods and periodic structure of exponential sums"};
  app.require_subcommand(1);

  std::string qp_path, qp_w_path, z_path, w_path, window_spec, out_path, inner_spec, report_path, prefix;
  double tol = kDefaultTolZero, eps = 0.05, tau_max = 0.0, budget = kDefaultBudget, period_tol = 1e-8;

  CLI::App* zeros = app.add_subcommand("zeros", "find all zeros in a window");
  zeros->add_option("--qp", qp_path, "quasipolynomial JSON")->required();
  zeros->add_option("--window", window_spec, "re_min,re_max,im_min,im_max")->required();
  zeros->add_option("--tol", tol, "residual tolerance")->capture_default_str();
  zeros->add_option("--out", out_path, "report file (default stdout)");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "periodic structure of a zero set or divisor pair");
  analyze_cmd->add_option("--qp", qp_path, "quasipolynomial JSON for Z");
  analyze_cmd->add_option("--qp-w", qp_w_path, "quasipolynomial JSON for W (default: W = Z)");
  analyze_cmd->add_option("--z", z_path, "divisor JSON for Z");
  analyze_cmd->add_option("--w", w_path, "divisor JSON for W");
  analyze_cmd->add_option("--window", window_spec, "re_min,re_max,im_min,im_max");
  analyze_cmd->add_option("--tol", tol, "zero residual tolerance")->capture_default_str();
  analyze_cmd->add_option("--eps", eps, "almost-period tolerance")->capture_default_str();
  analyze_cmd->add_option("--tau-max", tau_max, "scan range (default: window height / 4)");
  analyze_cmd->add_option("--period-tol", period_tol, "period verification tolerance")->capture_default_str();
  analyze_cmd->add_option("--out", out_path, "report file (default stdout)");

  CLI::App* factor = app.add_subcommand("factor", "periodic factors and zero-free quotient");
  factor->add_option("--qp", qp_path, "quasipolynomial JSON")->required();
  factor->add_option("--window", window_spec, "re_min,re_max,im_min,im_max")->required();
  factor->add_option("--inner", inner_spec, "window the factor orientation refers to");
  factor->add_option("--budget", budget, "total tail budget")->capture_default_str();
  factor->add_option("--out", out_path, "report file (default stdout)");

  CLI::App* gen = app.add_subcommand("gen", "generate example divisors and test instances");
  gen->require_subcommand(1);
  int k_max = 3, n_terms = 5, n_lines = 2;
  double im_bound = 20.0, span = 3.0, delta = 0.05;
  std::int64_t m_max = 10000;
  std::uint64_t seed = 42;
  std::string alpha = "sqrt2";
  CLI::App* g1 = gen->add_subcommand("example1", "columns 2^k + i n 2^k");
  g1->add_option("--kmax", k_max)->capture_default_str();
  g1->add_option("--im-bound", im_bound)->capture_default_str();
  g1->add_option("--out", out_path);
  CLI::App* g2 = gen->add_subcommand("example2", "rotated lattice in the strip |Re z| < 1");
  g2->add_option("--alpha", alpha, "sqrt2 | sqrt3 | golden | inv_sqrt2 (cot alpha)")->capture_default_str();
  g2->add_option("--im-bound", im_bound)->capture_default_str();
  g2->add_option("--out", out_path);
  CLI::App* gk = gen->add_subcommand("kronecker", "solutions of |m cos a - n sin a| < delta");
  gk->add_option("--alpha", alpha)->capture_default_str();
  gk->add_option("--delta", delta)->capture_default_str();
  gk->add_option("--m-max", m_max)->capture_default_str();
  gk->add_option("--out", out_path);
  CLI::App* gr = gen->add_subcommand("random", "seeded random quasipolynomial");
  gr->add_option("--terms", n_terms)->capture_default_str();
  gr->add_option("--span", span)->capture_default_str();
  gr->add_option("--seed", seed)->capture_default_str();
  gr->add_option("--out", out_path);
  CLI::App* gp = gen->add_subcommand("product", "seeded cosh-product form, expanded");
  gp->add_option("--lines", n_lines)->capture_default_str();
  gp->add_option("--seed", seed)->capture_default_str();
  gp->add_option("--out", out_path);

  CLI::App* plot = app.add_subcommand("plot", "CSV and SVG plot data from a report");
  plot->add_option("--report", report_path)->required();
  plot->add_option("--prefix", prefix)->required();

  CLI::App* verify = app.add_subcommand("verify", "re-check a saved report");
  verify->add_option("--report", report_path)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const Exec exec = default_exec();
    if (zeros->parsed()) {
      Report r;
      r.command = "zeros";
      const Quasipolynomial qp = qp_from_json(read_json_file(qp_path), qp_path);
      const StripWindow win = parse_window_spec(window_spec);
      r.inputs = Json{{"qp", to_json(qp)}, {"window", to_json(win)}, {"tol_zero", tol}, {"tol_cluster", kTolCluster}};
      FindOptions fo;
      fo.tol_zero = tol;
      fo.exec = exec;
      const ZeroList zl = find_zeros(qp, win, fo);
      r.outputs = Json{{"zeros", to_json(zl)}, {"count", zl.total_multiplicity()}};
      emit(r.dump(), out_path, out);
      return kExitOk;
    }
    if (analyze_cmd->parsed()) {
      Report r;
      r.command = "analyze";
      const bool from_qp = !qp_path.empty();
      if (from_qp == !z_path.empty()) throw Error(ErrorCode::InvalidArgument, "give exactly one of --qp or --z");
      std::optional<StripWindow> win;
      if (!window_spec.empty()) win = parse_window_spec(window_spec);
      std::optional<Divisor> z, w;
      r.inputs = Json{{"eps", eps}, {"tau_max", tau_max}, {"period_tol", period_tol}};
      if (from_qp) {
        if (!win) throw Error(ErrorCode::InvalidArgument, "--window is required with --qp");
        FindOptions fo;
        fo.tol_zero = tol;
        fo.exec = exec;
        const Quasipolynomial qz = qp_from_json(read_json_file(qp_path), qp_path);
        r.inputs["qp"] = to_json(qz);
        r.inputs["tol_zero"] = tol;
        r.inputs["tol_cluster"] = kTolCluster;
        z = Divisor::from_zeros(find_zeros(qz, *win, fo));
        if (!qp_w_path.empty()) {
          const Quasipolynomial qw = qp_from_json(read_json_file(qp_w_path), qp_w_path);
          r.inputs["qp_w"] = to_json(qw);
          w = Divisor::from_zeros(find_zeros(qw, *win, fo));
        }
      } else {
        z = divisor_from_json(read_json_file(z_path), z_path);
        if (!w_path.empty()) w = divisor_from_json(read_json_file(w_path), w_path);
        if (!win) win = z->window();
      }
      const bool same = !w.has_value();
      if (same) w = z;
      r.inputs["window"] = to_json(*win);
      AnalyzeParams ap;
      ap.eps = eps;
      ap.tau_max = tau_max;
      ap.period_tol = period_tol;
      ap.exec = exec;
      AnalyzeOutcome res = analyze(*z, *w, *win, ap);
      r.outputs = res.payload;
      r.outputs["divisor_z"] = to_json(*z);
      if (!same) r.outputs["divisor_w"] = to_json(*w);
      emit(r.dump(), out_path, out);
      return res.verdict == Verdict::Periodic ? kExitOk : kExitNegative;
    }
    if (factor->parsed()) {
      Report r;
      r.command = "factor";
      const Quasipolynomial qp = qp_from_json(read_json_file(qp_path), qp_path);
      const StripWindow win = parse_window_spec(window_spec);
      std::optional<StripWindow> inner;
      if (!inner_spec.empty()) inner = parse_window_spec(inner_spec);
      r.inputs = Json{{"qp", to_json(qp)}, {"window", to_json(win)}, {"budget", budget}, {"tol_zero", kDefaultTolZero}};
      if (inner) r.inputs["inner"] = to_json(*inner);
      r.outputs = factor_payload(qp, win, budget, inner ? &*inner : nullptr, exec, r.warnings);
      emit(r.dump(), out_path, out);
      return r.outputs["quotient"]["passed"].get<bool>() ? kExitOk : kExitNegative;
    }
    if (gen->parsed()) {
      Json doc;
      auto need_alpha = [&]() {
        const std::optional<AlphaTag> t = parse_alpha(alpha);
        if (!t) throw Error(ErrorCode::InvalidArgument, "unknown alpha '" + alpha + "'");
        return *t;
      };
      if (g1->parsed()) {
        doc = to_json(example1(k_max, im_bound));
        doc["metadata"] = Json{{"construction", "example1"},
                               {"formula", "2^k + i n 2^k, 1 <= k <= k_max, |n 2^k| <= im_bound"},
                               {"note", "the literal exponent reading i 2^(nk) is not translation invariant and is not generated"},
                               {"k_max", k_max},
                               {"im_bound", im_bound}};
      } else if (g2->parsed()) {
        const AlphaTag t = need_alpha();
        doc = to_json(example2(t, im_bound));
        doc["metadata"] = Json{{"construction", "example2"}, {"alpha", std::string(alpha_name(t))}, {"im_bound", im_bound}};
      } else if (gk->parsed()) {
        const AlphaTag t = need_alpha();
        const KroneckerResult kr = kronecker_solutions(t, delta, m_max);
        doc = to_json(kr);
        Json taus = Json::array();
        for (const KroneckerSolution& s : kr.solutions) taus.push_back(num(almost_period_from_solution(s.m, s.n, t)));
        doc["taus"] = taus;
        doc["metadata"] = Json{{"alpha", std::string(alpha_name(t))}, {"delta", delta}, {"m_max", m_max}};
      } else if (gr->parsed()) {
        doc = to_json(random_quasipolynomial(n_terms, span, seed));
        doc["metadata"] = Json{{"construction", "random"}, {"terms", n_terms}, {"span", span}, {"seed", seed}};
      } else if (gp->parsed()) {
        const PeriodicProductForm f = random_product_form(n_lines, seed);
        std::vector<std::string> warns;
        doc = to_json(expand_product(f, &warns));
        doc["form"] = to_json(f);
        doc["metadata"] = Json{{"construction", "product"}, {"lines", n_lines}, {"seed", seed}, {"warnings", warns}};
      }
      emit(doc.dump(2) + "\n", out_path, out);
      return kExitOk;
    }
    if (plot->parsed()) return cmd_plot(report_path, prefix, out);
    if (verify->parsed()) return cmd_verify(report_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? kExitInput : kExitNumeric;
  } catch (const Json::exception& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitInput;
}

}  // namespace qpz::cli
