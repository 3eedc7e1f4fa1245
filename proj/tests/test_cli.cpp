#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pcap/cli.hpp"
#include "pcap/io.hpp"

namespace fs = std::filesystem;
using namespace pcap;
using cli::Command;
using cli::RunConfig;

namespace {

const char* kShowcase = R"({
  "f": {"mean": 2, "terms": [{"amp": 1, "freq": 1, "phase": -1.5707963267948966},
                             {"amp": 1, "freq": 1.4142135623730951, "phase": -1.5707963267948966}]},
  "u": {"mean": 3, "terms": [{"amp": 1, "freq": 1.7320508075688772, "phase": 0}]},
  "tau": {"theta": 1, "perturbation": {"mean": 0, "terms": [{"amp": 0.1, "freq": 1, "phase": -1.5707963267948966}]}},
  "window": [-20, 20]
})";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("pcap_cli_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(Command c, const fs::path& input, const fs::path& out, std::string* err = nullptr,
        std::optional<double> step = std::nullopt) {
  RunConfig cfg;
  cfg.command = c;
  cfg.input_path = input;
  cfg.output_dir = out;
  cfg.step = step;
  std::ostringstream o, e;
  const int rc = cli::run(cfg, o, e);
  if (err) *err = e.str();
  return rc;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e300, 123456789.0, 0.0}) {
    const std::string s = io::format_double(x);
    CHECK(io::parse_double(s, "x") == x);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(INFINITY) == "inf");
  CHECK(std::isinf(io::parse_double("inf", "x")));
  CHECK_THROWS_AS(io::parse_double("1.5x", "x"), InvalidInput);
}

TEST_CASE("window parsing") {
  CHECK(cli::parse_window("-3:4.5") == std::pair<double, double>{-3.0, 4.5});
  CHECK_THROWS_AS(cli::parse_window("3"), InvalidInput);
  CHECK_THROWS_AS(cli::parse_window("4:3"), InvalidInput);
  CHECK(cli::parse_command("a2check") == Command::kA2check);
  CHECK_THROWS_AS(cli::parse_command("plot"), InvalidInput);
}

TEST_CASE("synth on a constant function") {
  TempDir d("const");
  write_file(d.path / "in.json",
             R"({"f": {"mean": 1}, "u": {"mean": 1}, "tau": {"theta": 1},
                 "window": [-2, 2], "translations": [0, 2]})");
  REQUIRE(run(Command::kSynth, d.path / "in.json", d.path / "out") == 0);
  const auto csv = io::read_csv(d.path / "out" / "h_trace.csv");
  CHECK(csv.header == std::vector<std::string>{"piece", "t", "h"});
  CHECK(csv.rows.size() == 5 * 101);
  for (const auto& row : csv.rows) CHECK(row[2] == "1");
  const auto v = io::read_json_file(d.path / "out" / "verdict.json");
  const auto& e = v.at("verdict").at("entries").at(0);
  CHECK(e.at("almost_periods").at("max_gap").get<double>() == doctest::Approx(0.01));
  CHECK(e.at("delta") == "inf");
  CHECK(fs::exists(d.path / "out" / "jumps.csv"));
}

TEST_CASE("factor the showcase instance") {
  TempDir d("factor");
  write_file(d.path / "in.json", kShowcase);
  REQUIRE(run(Command::kFactor, d.path / "in.json", d.path / "out") == 0);
  const auto u = io::read_csv(d.path / "out" / "u_table.csv");
  REQUIRE(u.rows.size() == 40);
  for (const auto& row : u.rows) {
    const double n = io::parse_double(row[0], "n");
    const double want = (3.0 + std::cos(std::sqrt(3.0) * n)) / 4.0;
    CHECK(io::parse_double(row[1], "u") == doctest::Approx(want).epsilon(1e-9));
  }
  const auto g = io::read_json_file(d.path / "out" / "gauge.json");
  CHECK(g.at("reference").at("gauge_constant").get<double>() == 4.0);
  CHECK(g.at("reference").at("u_max_rel_error").get<double>() <= 1e-9);
  CHECK(g.at("well_conditioned").get<bool>());
}

TEST_CASE("synth then factor through files, deterministic") {
  TempDir d("roundtrip");
  write_file(d.path / "in.json", kShowcase);
  REQUIRE(run(Command::kSynth, d.path / "in.json", d.path / "a") == 0);
  REQUIRE(run(Command::kSynth, d.path / "in.json", d.path / "b") == 0);
  for (const char* name : {"h_trace.csv", "jumps.csv", "verdict.json"}) {
    CHECK(read_file(d.path / "a" / name) == read_file(d.path / "b" / name));
  }
  write_file(d.path / "trace.json",
             R"({"tau": {"theta": 1, "perturbation": {"mean": 0, "terms": [{"amp": 0.1, "freq": 1, "phase": -1.5707963267948966}]}},
                 "trace": "a/h_trace.csv"})");
  REQUIRE(run(Command::kFactor, d.path / "trace.json", d.path / "f") == 0);
  const auto u = io::read_csv(d.path / "f" / "u_table.csv");
  for (const auto& row : u.rows) {
    const double n = io::parse_double(row[0], "n");
    const double want = (3.0 + std::cos(std::sqrt(3.0) * n)) / 4.0;
    CHECK(io::parse_double(row[1], "u") == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("simulate pure jumps") {
  TempDir d("sim");
  write_file(d.path / "in.json",
             R"({"d": 1, "g": ["0"], "b": [{"mean": 1}], "tau": {"theta": 1},
                 "y0": [1], "t0": 0.5, "t_end": 3.5, "step": 0.25})");
  REQUIRE(run(Command::kSimulate, d.path / "in.json", d.path / "out") == 0);
  const auto csv = io::read_csv(d.path / "out" / "trajectory.csv");
  CHECK(csv.header == std::vector<std::string>{"t", "side", "piece", "y1"});
  double last = 1.0;
  int jumps = 0;
  for (const auto& row : csv.rows) {
    const double y = io::parse_double(row[3], "y");
    if (row[1] == "R") {
      CHECK(y == 2.0 * last);
      ++jumps;
    } else {
      CHECK(y == last);
    }
    last = y;
  }
  CHECK(jumps == 3);
  CHECK(last == 8.0);
}

TEST_CASE("roundtrip and a2check") {
  TempDir d("rt");
  write_file(d.path / "ok.json",
             R"({"d": 1, "g": ["0.1 * cos(t) * y1"],
                 "b": [{"telescoping": {"mean": 0, "terms": [{"amp": 1, "freq": 1, "phase": -1.5707963267948966}]}}],
                 "tau": {"theta": 1}, "y0": [1], "t0": 0, "t_end": 20, "step": 0.001})");
  REQUIRE(run(Command::kRoundtrip, d.path / "ok.json", d.path / "out") == 0);
  const auto r = io::read_json_file(d.path / "out" / "roundtrip.json");
  CHECK(r.at("max_deviation").get<double>() <= 1e-6);
  REQUIRE(run(Command::kA2check, d.path / "ok.json", d.path / "out") == 0);
  CHECK(io::read_json_file(d.path / "out" / "a2.json").at("report").at("pass").get<bool>());

  write_file(d.path / "bad.json",
             R"({"d": 1, "g": ["0"], "b": [{"mean": 1}], "tau": {"theta": 1},
                 "y0": [1], "t0": 0, "t_end": 80})");
  std::string err;
  CHECK(run(Command::kRoundtrip, d.path / "bad.json", d.path / "out", &err) == 2);
  CHECK(err.find("(A2)") != std::string::npos);
  CHECK(run(Command::kA2check, d.path / "bad.json", d.path / "out") == 2);
  CHECK_FALSE(io::read_json_file(d.path / "out" / "a2.json").at("report").at("pass").get<bool>());
}

TEST_CASE("hypothesis violations exit 2 with the module message") {
  TempDir d("hyp");
  write_file(d.path / "in.json",
             R"({"d": 1, "g": ["0"], "b": [{"mean": -1}], "tau": {"theta": 1},
                 "y0": [1], "t0": 0, "t_end": 3})");
  std::string err;
  CHECK(run(Command::kRoundtrip, d.path / "in.json", d.path / "out", &err) == 2);
  CHECK(err.find("degenerate jump") != std::string::npos);
}

TEST_CASE("invalid input exits 1 with a diagnostic") {
  TempDir d("bad");
  std::string err;
  write_file(d.path / "syntax.json", "{\n  \"f\": {\"mean\": 1,,}\n}");
  CHECK(run(Command::kSynth, d.path / "syntax.json", d.path / "out", &err) == 1);
  CHECK(err.find("syntax.json:2:") != std::string::npos);

  write_file(d.path / "missing.json", R"({"f": {"mean": 1}, "tau": {"theta": 1}})");
  CHECK(run(Command::kSynth, d.path / "missing.json", d.path / "out", &err) == 1);
  CHECK(err.find("missing field 'u'") != std::string::npos);

  write_file(d.path / "type.json", R"({"f": {"mean": "one"}, "u": {"mean": 1}, "tau": {"theta": 1}})");
  CHECK(run(Command::kSynth, d.path / "type.json", d.path / "out", &err) == 1);
  CHECK(err.find("f.mean") != std::string::npos);

  write_file(d.path / "expr.json",
             R"({"d": 1, "g": ["y1 +"], "b": [{"mean": 0}], "tau": {"theta": 1}, "y0": [1], "t_end": 1})");
  CHECK(run(Command::kSimulate, d.path / "expr.json", d.path / "out", &err) == 1);
  CHECK(err.find("g[0]") != std::string::npos);

  CHECK(run(Command::kSynth, d.path / "nope.json", d.path / "out", &err) == 1);
  write_file(d.path / "ok.json", R"({"f": {"mean": 1}, "u": {"mean": 1}, "tau": {"theta": 1}})");
  CHECK(run(Command::kSynth, d.path / "ok.json", d.path / "out", &err, -1.0) == 1);
}
