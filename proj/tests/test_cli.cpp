#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "doctest.h"

using namespace qpz;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream o, e;
  const int c = cli::run(args, o, e);
  return {c, o.str(), e.str()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("qpz_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string put(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kCosh = R"({"terms":[{"lambda":1,"re":1,"im":0},{"lambda":-1,"re":1,"im":0}]})";

// Drops the timing block so reports can be compared byte for byte.
std::string stable(const std::string& report) {
  Json j = Json::parse(report);
  j.erase("timing");
  return j.dump();
}

}  // namespace

TEST_CASE("zeros of 2cosh") {
  const std::string qp = put("cosh.json", kCosh);
  const Run r = run({"zeros", "--qp", qp, "--window", "-1,1,0,10", "--tol", "1e-12"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["command"] == "zeros");
  CHECK(j["outputs"]["count"] == 3);
  CHECK(j.contains("timing"));
  CHECK(j["warnings"].is_array());
}

TEST_CASE("input errors exit with 2") {
  CHECK(run({"zeros", "--qp", (scratch() / "missing.json").string(), "--window", "-1,1,0,1"}).code == 2);
  const Run missing = run({"zeros", "--qp", (scratch() / "missing.json").string(), "--window", "-1,1,0,1"});
  CHECK(missing.err.find("cannot read file") != std::string::npos);

  const std::string bad = put("bad.json", R"({"terms":[{"lambda":1,"re":1,"im":0},{"re":1,"im":0}]})");
  const Run r = run({"zeros", "--qp", bad, "--window", "-1,1,0,1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("terms[1].lambda") != std::string::npos);

  const std::string broken = put("broken.json", "{\"terms\": [\n 1,\n");
  const Run b = run({"zeros", "--qp", broken, "--window", "-1,1,0,1"});
  CHECK(b.code == 2);
  CHECK(b.err.find("line") != std::string::npos);

  CHECK(run({"zeros", "--qp", put("c.json", kCosh), "--window", "1,-1,0,1"}).code == 2);
  CHECK(run({"zeros", "--window", "-1,1,0,1"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"gen", "example2", "--alpha", "pi"}).code == 2);
}

TEST_CASE("numeric failure exits with 3") {
  // Zero exactly on the contour.
  const Run r = run({"zeros", "--qp", put("c3.json", kCosh), "--window", "-1,1,1.5707963267948966,3"});
  CHECK(r.code == 3);
  CHECK(r.err.find("ZeroOnBoundary") != std::string::npos);
}

TEST_CASE("analyze verdicts") {
  const std::string qp = put("cosh_a.json", kCosh);
  const Run r = run({"analyze", "--qp", qp, "--window", "-1,1,0,100"});
  REQUIRE(r.code == 0);
  const Json j = Json::parse(r.out);
  CHECK(j["outputs"]["verdict"] == "PERIODIC");
  CHECK(std::abs(j["outputs"]["period"].get<double>() - kPi) < 1e-9);

  const std::string ex2 = (scratch() / "ex2.json").string();
  REQUIRE(run({"gen", "example2", "--alpha", "sqrt2", "--im-bound", "120", "--out", ex2}).code == 0);
  const Run n = run({"analyze", "--z", ex2});
  CHECK(n.code == 1);
  CHECK(Json::parse(n.out)["outputs"]["verdict"] != "PERIODIC");
}

TEST_CASE("analyze, plot and verify round trip") {
  const std::string qp = put("cosh_b.json", kCosh);
  const std::string rep = (scratch() / "an.json").string();
  REQUIRE(run({"analyze", "--qp", qp, "--window", "-1,1,0,60", "--out", rep}).code == 0);
  const Run v = run({"verify", "--report", rep});
  CHECK(v.code == 0);
  CHECK(Json::parse(v.out)["verified"] == true);

  const std::string prefix = (scratch() / "an").string();
  REQUIRE(run({"plot", "--report", rep, "--prefix", prefix}).code == 0);
  const std::string z = slurp(prefix + "_zeros.csv");
  CHECK(z.rfind("re,im,mult\r\n", 0) == 0);
  CHECK(std::count(z.begin(), z.end(), '\n') == 1 + 19);
  CHECK(slurp(prefix + "_taus.csv").rfind("tau,displacement\r\n", 0) == 0);
  const std::string t = slurp(prefix + "_taus.csv");
  CHECK(std::count(t.begin(), t.end(), '\n') > 1);
  CHECK(slurp(prefix + "_zeros.svg").find("<svg") != std::string::npos);
}

TEST_CASE("plot of a small and of an empty report") {
  const std::string three = put("three.json", R"({"zeros":[{"re":0,"im":1},{"re":0,"im":2},{"re":0.5,"im":3,"mult":2}]})");
  const std::string p3 = (scratch() / "three").string();
  REQUIRE(run({"plot", "--report", three, "--prefix", p3}).code == 0);
  CHECK(slurp(p3 + "_zeros.csv") == "re,im,mult\r\n0,1,1\r\n0,2,1\r\n0.5,3,2\r\n");

  const std::string empty = put("empty.json", "{}");
  const std::string pe = (scratch() / "empty").string();
  REQUIRE(run({"plot", "--report", empty, "--prefix", pe}).code == 0);
  CHECK(slurp(pe + "_zeros.csv") == "re,im,mult\r\n");
  CHECK(slurp(pe + "_taus.csv") == "tau,displacement\r\n");
  CHECK(slurp(pe + "_differences.csv") == "re,im\r\n");
}

TEST_CASE("verify rejects a tampered report") {
  const std::string qp = put("cosh_c.json", kCosh);
  const std::string rep = (scratch() / "z.json").string();
  REQUIRE(run({"zeros", "--qp", qp, "--window", "-1,1,0,10", "--out", rep}).code == 0);
  CHECK(run({"verify", "--report", rep}).code == 0);
  Json j = Json::parse(slurp(rep));
  j["outputs"]["zeros"]["zeros"].erase(0);
  const std::string bad = put("z_bad.json", j.dump());
  CHECK(run({"verify", "--report", bad}).code == 1);
  CHECK(run({"verify", "--report", put("nocmd.json", "{}")}).code == 2);
}

TEST_CASE("factor 2cosh") {
  const std::string qp = put("cosh_f.json", kCosh);
  const std::string rep = (scratch() / "f.json").string();
  REQUIRE(run({"factor", "--qp", qp, "--window", "-1,1,0.3,10.3", "--out", rep}).code == 0);
  const Json j = Json::parse(slurp(rep));
  CHECK(j["outputs"]["method"] == "cosh_fit");
  CHECK(j["outputs"]["quotient"]["zero_count"] == 0);
  CHECK(run({"verify", "--report", rep}).code == 0);
}

TEST_CASE("gen artifacts") {
  const Run e1 = run({"gen", "example1", "--kmax", "1", "--im-bound", "5"});
  REQUIRE(e1.code == 0);
  const Json j = Json::parse(e1.out);
  CHECK(j["points"].size() == 5);
  CHECK(j["metadata"]["construction"] == "example1");
  const Run k = run({"gen", "kronecker", "--alpha", "sqrt2", "--delta", "0.05", "--m-max", "100"});
  REQUIRE(k.code == 0);
  CHECK(Json::parse(k.out)["taus"].size() == Json::parse(k.out)["solutions"].size());
  CHECK(run({"gen", "random", "--terms", "3", "--seed", "9"}).out == run({"gen", "random", "--terms", "3", "--seed", "9"}).out);
  CHECK(run({"gen", "product", "--lines", "2", "--seed", "9"}).code == 0);
}

TEST_CASE("reports are deterministic across runs and thread counts") {
  const std::string qp = put("cosh_d.json", kCosh);
  const std::vector<std::string> args{"analyze", "--qp", qp, "--window", "-1,1,0,60"};
  set_thread_cap(4);
  const std::string a = stable(run(args).out);
  const std::string b = stable(run(args).out);
  set_thread_cap(1);
  const std::string c = stable(run(args).out);
  set_thread_cap(0);
  CHECK(a == b);
  CHECK(a == c);
}
