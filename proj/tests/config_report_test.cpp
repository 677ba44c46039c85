#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "pathspace/config.hpp"
#include "pathspace/report.hpp"

using namespace pathspace;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(bool(in));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kTmp = "/tmp/pathspace-unit";

}  // namespace

TEST_CASE("defaults are complete and validate cleanly") {
  Config c = Config::defaults();
  for (const char* key : {"master_seed", "out", "dt", "n_paths", "manifold", "threads", "eps",
                          "spde_J", "x_list", "slope_lo"})
    CHECK(c.has(key));
  CHECK(c.validate().empty());
  CHECK(c.get_seed("master_seed") == 42);
  CHECK(c.get_double("dt") == 0.001);
  CHECK(c.get_int("n_paths") == 10000);
  CHECK(c.get_string("manifold") == "sphere2");
}

TEST_CASE("unknown keys are rejected on set and in files") {
  Config c;
  CHECK_THROWS_AS(c.set("not_a_key", "1"), ConfigError);
  c.set("dt", "0.5");
  CHECK(c.get_double("dt") == 0.5);

  ensure_dir(kTmp);
  std::string path = kTmp + "/bad-key.cfg";
  {
    std::ofstream out(path);
    out << "dt = 0.5\nnot_a_key = 1\n";
  }
  CHECK_THROWS_AS(Config::from_file(path), ConfigError);
}

TEST_CASE("file round trip preserves every entry") {
  ensure_dir(kTmp);
  std::string path = kTmp + "/roundtrip.cfg";
  Config d = Config::defaults();
  d.write(path);
  Config r = Config::from_file(path);
  CHECK(r.entries() == d.entries());
}

TEST_CASE("parser accepts comments and blanks, rejects malformed lines") {
  ensure_dir(kTmp);
  std::string good = kTmp + "/good.cfg";
  {
    std::ofstream out(good);
    out << "# a comment\n\n  dt = 0.25  \nmaster_seed=7\n";
  }
  Config c = Config::from_file(good);
  CHECK(c.get_double("dt") == 0.25);
  CHECK(c.get_seed("master_seed") == 7);
  CHECK_FALSE(c.has("n_paths"));

  std::string bad = kTmp + "/malformed.cfg";
  {
    std::ofstream out(bad);
    out << "dt 0.25\n";
  }
  CHECK_THROWS_AS(Config::from_file(bad), ConfigError);
  CHECK_THROWS_AS(Config::from_file(kTmp + "/does-not-exist.cfg"), ConfigError);
}

TEST_CASE("typed accessors enforce their formats") {
  Config c;
  c.set("dt", "0.001");
  CHECK_THROWS_AS(c.get_int("dt"), ConfigError);     // fractional
  CHECK_THROWS_AS(c.get_string("out"), ConfigError);  // absent in a raw config
  c.set("out", "somewhere");
  CHECK(c.get_string("out") == "somewhere");
  c.set("master_seed", "12x");
  CHECK_THROWS_AS(c.get_seed("master_seed"), ConfigError);
  c.set("x_list", "0.5, 1,2");
  auto xs = c.get_list("x_list");
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == 0.5);
  CHECK(xs[1] == 1.0);
  CHECK(xs[2] == 2.0);
  c.set("t_list", "");
  CHECK(c.get_list("t_list").empty());
  c.set("x_list", "1,zebra");
  CHECK_THROWS_AS(c.get_list("x_list"), ConfigError);
}

TEST_CASE("validation reports the missing required quartet on an empty config") {
  Config c;
  auto diags = c.validate();
  std::set<std::string> fields;
  for (const auto& d : diags) fields.insert(d.field);
  CHECK(diags.size() == 4);
  CHECK(fields == std::set<std::string>{"master_seed", "out", "dt", "n_paths"});
}

TEST_CASE("validation flags constraint violations") {
  Config c = Config::defaults();
  c.set("dt", "-1");
  c.set("manifold", "torus");
  c.set("n_paths", "2.5");
  c.set("plots", "yes");
  c.set("threads", "-2");
  auto diags = c.validate();
  std::set<std::string> fields;
  for (const auto& d : diags) fields.insert(d.field);
  CHECK(fields == std::set<std::string>{"dt", "manifold", "n_paths", "plots", "threads"});
  c.set("dt", "0.01");
  c.set("manifold", "all");
  c.set("n_paths", "100");
  c.set("plots", "1");
  c.set("threads", "0");
  CHECK(c.validate().empty());
}

TEST_CASE("merging overlays explicit entries onto the defaults") {
  Config c;
  c.set("dt", "0.5");
  Config m = c.merged_with_defaults();
  CHECK(m.get_double("dt") == 0.5);
  CHECK(m.get_int("n_paths") == 10000);
  CHECK(m.validate().empty());
}

TEST_CASE("worker-count resolution order: explicit, environment, one") {
  Config c = Config::defaults();
  c.set("threads", "3");
  CHECK(resolve_threads(c) == 3);
  c.set("threads", "0");
  ::setenv("PATHSPACE_THREADS", "5", 1);
  CHECK(resolve_threads(c) == 5);
  ::unsetenv("PATHSPACE_THREADS");
  CHECK(resolve_threads(c) == 1);
  Config raw;  // no threads entry at all
  CHECK(resolve_threads(raw) == 1);
}

TEST_CASE("17-digit serialization round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 3.141592653589793, 1e300, 5e-324, -2.5,
                   1.7976931348623157e308, 0.0, 42.0}) {
    std::string s = format_g17(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_g17(0.5) == "0.5");
  CHECK(CsvWriter::num(0.5) == "0.5");
}

TEST_CASE("CSV writer emits a header and rejects ragged rows") {
  ensure_dir(kTmp);
  std::string path = kTmp + "/table.csv";
  CsvWriter w({"name", "value"});
  w.add_row({"x", CsvWriter::num(0.5)});
  w.add_row({"y", "PASS"});
  CHECK_THROWS(w.add_row({"only-one-cell"}));
  w.write(path);
  CHECK(slurp(path) == "name,value\nx,0.5\ny,PASS\n");
}

TEST_CASE("summary files are ordered key=value lines") {
  ensure_dir(kTmp);
  std::string path = kTmp + "/summary.txt";
  write_summary(path, {{"verdict", "PASS"}, {"rows", "12"}});
  CHECK(slurp(path) == "verdict=PASS\nrows=12\n");
}

TEST_CASE("nested directory creation and the SVG view") {
  std::string dir = kTmp + "/a/b/c";
  ensure_dir(dir);
  ensure_dir(dir);  // idempotent
  std::string path = dir + "/plot.svg";
  SvgSeries s1{"first", {1, 2, 3}, {1, 4, 9}};
  SvgSeries s2{"second", {1, 2, 3}, {2, 2, 2}};
  write_svg_plot(path, "demo", "time", "value", {s1, s2});
  std::string svg = slurp(path);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("first") != std::string::npos);
  CHECK(svg.find("second") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);

  // Log axes require positive data and annotate the labels.
  std::string logp = dir + "/log.svg";
  write_svg_plot(logp, "demo", "t", "v", {s1}, true, true);
  CHECK(slurp(logp).find("(log10)") != std::string::npos);
  CHECK_THROWS(write_svg_plot(dir + "/neg.svg", "x", "x", "y",
                              {SvgSeries{"bad", {1.0}, {-1.0}}}, false, true));
}
