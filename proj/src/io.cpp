#include "qpz/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace qpz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::ParseError, (path.empty() ? std::string("<root>") : path) + ": " + msg);
}

std::string sub(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const Json& field(const Json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(sub(path, key), "missing field");
  return *it;
}

const Json* optional_field(const Json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

// null stands for an infinite value.
double number_or_inf(const Json& j, const std::string& path) {
  if (j.is_null()) return kInf;
  return number(j, path);
}

long long integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<long long>();
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

cd complex_obj(const Json& j, const std::string& path) {
  return {number(field(j, path, "re"), sub(path, "re")), number(field(j, path, "im"), sub(path, "im"))};
}

Json cobj(cd z) { return Json{{"re", num(z.real())}, {"im", num(z.imag())}}; }

double get_num(const Json& j, const std::string& path, const std::string& key) {
  return number(field(j, path, key), sub(path, key));
}

}  // namespace

Json num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json parse_json_text(std::string_view text, const std::string& origin) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw Error(ErrorCode::ParseError, origin + ": line " + std::to_string(line) + ": malformed JSON");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write file " + path);
  out << text;
  if (!out) throw Error(ErrorCode::InvalidArgument, "write failed for " + path);
}

StripWindow parse_window_spec(std::string_view spec) {
  double v[4];
  std::size_t pos = 0;
  for (int k = 0; k < 4; ++k) {
    const std::size_t end = k < 3 ? spec.find(',', pos) : spec.size();
    if (end == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "window needs re_min,re_max,im_min,im_max");
    }
    std::string part(spec.substr(pos, end - pos));
    part.erase(0, part.find_first_not_of(" \t"));
    part.erase(part.find_last_not_of(" \t") + 1);
    // strtod keeps the whole grammar (exponents, inf) without locale surprises for '.'.
    char* stop = nullptr;
    v[k] = std::strtod(part.c_str(), &stop);
    if (part.empty() || stop != part.c_str() + part.size()) {
      throw Error(ErrorCode::InvalidArgument, "bad window component '" + part + "'");
    }
    pos = end + 1;
  }
  if (pos <= spec.size() && spec.find(',', pos) != std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "window has more than four components");
  }
  return StripWindow(v[0], v[1], v[2], v[3]);
}

StripWindow window_from_json(const Json& j, const std::string& path) {
  const double a = get_num(j, path, "re_min"), b = get_num(j, path, "re_max");
  const double c = get_num(j, path, "im_min"), d = get_num(j, path, "im_max");
  try {
    return StripWindow(a, b, c, d);
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

Quasipolynomial qp_from_json(const Json& j, const std::string& path) {
  const std::string tp = sub(path, "terms");
  const Json& terms = array(field(j, path, "terms"), tp);
  std::vector<Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = at(tp, i);
    out.push_back({get_num(terms[i], p, "lambda"), {get_num(terms[i], p, "re"), get_num(terms[i], p, "im")}});
  }
  try {
    return Quasipolynomial(std::move(out));
  } catch (const Error& e) {
    bad(tp, e.what());
  }
}

PeriodicProductForm form_from_json(const Json& j, const std::string& path) {
  PeriodicProductForm f;
  f.c = {get_num(j, path, "c_re"), get_num(j, path, "c_im")};
  f.beta = get_num(j, path, "beta");
  f.omega = get_num(j, path, "omega");
  const std::string op = sub(path, "offsets");
  const Json& offs = array(field(j, path, "offsets"), op);
  for (std::size_t i = 0; i < offs.size(); ++i) f.offsets.push_back(complex_obj(offs[i], at(op, i)));
  return f;
}

ZeroList zeros_from_json(const Json& j, const std::string& path) {
  ZeroList zl;
  zl.window = window_from_json(field(j, path, "window"), sub(path, "window"));
  const std::string zp = sub(path, "zeros");
  const Json& zs = array(field(j, path, "zeros"), zp);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    const std::string p = at(zp, i);
    ZeroEntry e;
    e.point = complex_obj(zs[i], p);
    e.multiplicity = static_cast<int>(integer(field(zs[i], p, "mult"), sub(p, "mult")));
    if (const Json* r = optional_field(zs[i], "residual")) e.residual = number(*r, sub(p, "residual"));
    zl.entries.push_back(e);
  }
  if (const Json* t = optional_field(j, "tol_zero")) zl.tol_zero = number(*t, sub(path, "tol_zero"));
  if (const Json* t = optional_field(j, "tol_cluster")) zl.tol_cluster = number(*t, sub(path, "tol_cluster"));
  if (const Json* t = optional_field(j, "min_separation")) {
    zl.min_separation = number_or_inf(*t, sub(path, "min_separation"));
  }
  return zl;
}

Divisor divisor_from_json(const Json& j, const std::string& path) {
  const StripWindow w = window_from_json(field(j, path, "window"), sub(path, "window"));
  const std::string pp = sub(path, "points");
  const Json& ps = array(field(j, path, "points"), pp);
  std::vector<DivisorPoint> pts;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const std::string p = at(pp, i);
    DivisorPoint d;
    d.point = complex_obj(ps[i], p);
    if (const Json* m = optional_field(ps[i], "mult")) d.mult = static_cast<int>(integer(*m, sub(p, "mult")));
    pts.push_back(d);
  }
  try {
    return Divisor(std::move(pts), w);
  } catch (const Error& e) {
    bad(pp, e.what());
  }
}

PeriodCertificate certificate_from_json(const Json& j, const std::string& path) {
  PeriodCertificate c;
  c.period = get_num(j, path, "period");
  c.anchor = complex_obj(field(j, path, "anchor"), sub(path, "anchor"));
  c.anchor_image = complex_obj(field(j, path, "anchor_image"), sub(path, "anchor_image"));
  c.tau_used = get_num(j, path, "tau_used");
  c.gamma = get_num(j, path, "gamma");
  c.R = get_num(j, path, "R");
  const std::string wp = sub(path, "verified_windows");
  const Json& ws = array(field(j, path, "verified_windows"), wp);
  for (std::size_t i = 0; i < ws.size(); ++i) c.verified_windows.push_back(window_from_json(ws[i], at(wp, i)));
  const Json& ts = field(j, path, "two_sided");
  if (!ts.is_boolean()) bad(sub(path, "two_sided"), "expected a boolean");
  c.two_sided = ts.get<bool>();
  c.quadruples_checked = static_cast<std::uint64_t>(integer(field(j, path, "quadruples_checked"), sub(path, "quadruples_checked")));
  c.points_exited = static_cast<std::uint64_t>(integer(field(j, path, "points_exited"), sub(path, "points_exited")));
  c.realness_steps = integer(field(j, path, "realness_steps"), sub(path, "realness_steps"));
  c.tol_real_period = get_num(j, path, "tol_real_period");
  c.match_tol = get_num(j, path, "match_tol");
  return c;
}

PeriodicFactor factor_from_json(const Json& j, const std::string& path) {
  PeriodicFactor f;
  f.period = get_num(j, path, "period");
  f.window = window_from_json(field(j, path, "window"), sub(path, "window"));
  const std::string op = sub(path, "offsets"), cp = sub(path, "corrections"), bp = sub(path, "bounds"),
                    sp = sub(path, "sides"), rp = sub(path, "ratios");
  const Json& offs = array(field(j, path, "offsets"), op);
  const Json& corr = array(field(j, path, "corrections"), cp);
  const Json& bounds = array(field(j, path, "bounds"), bp);
  const Json& sides = array(field(j, path, "sides"), sp);
  const Json& ratios = array(field(j, path, "ratios"), rp);
  if (corr.size() != offs.size() || bounds.size() != offs.size() || sides.size() != offs.size() ||
      ratios.size() != offs.size()) {
    bad(path, "offsets, corrections, bounds, sides and ratios must have equal lengths");
  }
  for (std::size_t i = 0; i < offs.size(); ++i) {
    f.offsets.push_back(complex_obj(offs[i], at(op, i)));
    TailCorrection tc;
    const std::string s = sides[i].is_string() ? sides[i].get<std::string>() : "";
    if (s == "inside") {
      tc.side = OffsetSide::Inside;
    } else if (s == "right") {
      tc.side = OffsetSide::Right;
    } else if (s == "left") {
      tc.side = OffsetSide::Left;
    } else {
      bad(at(sp, i), "expected inside, right or left");
    }
    const Json& cs = array(corr[i], at(cp, i));
    for (std::size_t m = 0; m < cs.size(); ++m) {
      const std::string p = at(at(cp, i), m);
      const Json& pair = array(cs[m], p);
      if (pair.size() != 2) bad(p, "expected [re, im]");
      tc.coeffs.emplace_back(number(pair[0], at(p, 0)), number(pair[1], at(p, 1)));
    }
    tc.bound = number_or_inf(bounds[i], at(bp, i));
    tc.ratio = number(ratios[i], at(rp, i));
    f.corrections.push_back(std::move(tc));
  }
  return f;
}

Json to_json(const StripWindow& w) {
  return Json{{"re_min", num(w.re_min)}, {"re_max", num(w.re_max)}, {"im_min", num(w.im_min)}, {"im_max", num(w.im_max)}};
}

Json to_json(const Quasipolynomial& qp) {
  Json terms = Json::array();
  for (const Term& t : qp.terms()) {
    terms.push_back(Json{{"lambda", num(t.lambda)}, {"re", num(t.coeff.real())}, {"im", num(t.coeff.imag())}});
  }
  return Json{{"terms", terms}};
}

Json to_json(const PeriodicProductForm& f) {
  Json offs = Json::array();
  for (cd b : f.offsets) offs.push_back(cobj(b));
  return Json{{"c_re", num(f.c.real())}, {"c_im", num(f.c.imag())}, {"beta", num(f.beta)},
              {"omega", num(f.omega)}, {"offsets", offs}};
}

Json to_json(const ZeroList& zl) {
  Json zs = Json::array();
  for (const ZeroEntry& e : zl.entries) {
    zs.push_back(Json{{"re", num(e.point.real())}, {"im", num(e.point.imag())}, {"mult", e.multiplicity},
                      {"residual", num(e.residual)}});
  }
  return Json{{"zeros", zs},
              {"window", to_json(zl.window)},
              {"tol_zero", num(zl.tol_zero)},
              {"tol_cluster", num(zl.tol_cluster)},
              {"min_separation", num(zl.min_separation)}};
}

Json to_json(const Divisor& d) {
  Json ps = Json::array();
  for (const DivisorPoint& p : d.points()) {
    ps.push_back(Json{{"re", num(p.point.real())}, {"im", num(p.point.imag())}, {"mult", p.mult}});
  }
  return Json{{"points", ps}, {"window", to_json(d.window())}};
}

Json to_json(const AlmostPeriodReport& r) {
  Json taus = Json::array(), disp = Json::array();
  for (double t : r.taus) taus.push_back(num(t));
  for (double d : r.displacements) disp.push_back(num(d));
  return Json{{"epsilon", num(r.epsilon)}, {"taus", taus},          {"displacements", disp},
              {"density_gap", num(r.density_gap)}, {"scan_min", num(r.scan_min)}, {"scan_max", num(r.scan_max)},
              {"step", num(r.step)},       {"inner", to_json(r.inner)}, {"certified", r.certified}};
}

Json to_json(const PeriodCertificate& c) {
  Json ws = Json::array();
  for (const StripWindow& w : c.verified_windows) ws.push_back(to_json(w));
  return Json{{"period", num(c.period)},
              {"anchor", cobj(c.anchor)},
              {"anchor_image", cobj(c.anchor_image)},
              {"tau_used", num(c.tau_used)},
              {"gamma", num(c.gamma)},
              {"R", num(c.R)},
              {"verified_windows", ws},
              {"two_sided", c.two_sided},
              {"quadruples_checked", c.quadruples_checked},
              {"points_exited", c.points_exited},
              {"realness_steps", c.realness_steps},
              {"tol_real_period", num(c.tol_real_period)},
              {"match_tol", num(c.match_tol)}};
}

Json to_json(const Decomposition& d) {
  Json parts = Json::array();
  for (const DecompositionPart& p : d.parts) {
    parts.push_back(Json{{"divisor", to_json(p.part)}, {"period", num(p.period)}, {"substrip", to_json(p.substrip)}});
  }
  return Json{{"parts", parts}, {"common_unit", num(d.common_unit)}, {"multipliers", d.multipliers}};
}

Json to_json(const Commensurability& c) {
  return Json{{"common_unit", num(c.common_unit)}, {"multipliers", c.multipliers}};
}

Json to_json(const PeriodicFactor& f) {
  Json offs = Json::array(), corr = Json::array(), bounds = Json::array(), sides = Json::array(),
       ratios = Json::array();
  for (std::size_t j = 0; j < f.offsets.size(); ++j) {
    offs.push_back(cobj(f.offsets[j]));
    Json cs = Json::array();
    for (cd c : f.corrections[j].coeffs) cs.push_back(Json::array({num(c.real()), num(c.imag())}));
    corr.push_back(cs);
    bounds.push_back(num(f.corrections[j].bound));
    sides.push_back(std::string(side_name(f.corrections[j].side)));
    ratios.push_back(num(f.corrections[j].ratio));
  }
  return Json{{"period", num(f.period)}, {"offsets", offs}, {"corrections", corr}, {"bounds", bounds},
              {"sides", sides},          {"ratios", ratios}, {"window", to_json(f.window)}};
}

Json to_json(const QuotientCertificate& q) {
  return Json{{"min_modulus", num(q.min_modulus)}, {"zero_count", q.zero_count},
              {"f_zeros", q.f_zeros},              {"factor_zeros", q.factor_zeros},
              {"grid_points", q.grid_points},      {"exclusion_radius", num(q.exclusion_radius)},
              {"passed", q.passed}};
}

Json to_json(const FitResult& f) {
  Json cl = Json::array();
  for (const LineCluster& c : f.clusters) {
    cl.push_back(Json{{"re", num(c.re)}, {"count", c.count}, {"spacing", num(c.spacing)}});
  }
  return Json{{"form", to_json(f.form)}, {"residual", num(f.residual)}, {"clusters", cl}};
}

Json to_json(const KroneckerResult& k) {
  Json sols = Json::array();
  for (const KroneckerSolution& s : k.solutions) {
    sols.push_back(Json{{"m", s.m}, {"n", s.n}, {"value", num(static_cast<double>(s.value))}});
  }
  return Json{{"solutions", sols}, {"max_gap", k.max_gap}};
}

}  // namespace qpz
