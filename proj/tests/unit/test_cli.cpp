// Copyright 2026 The wfdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <unistd.h>

#include "wfdiff/cli/commands.hpp"
#include "wfdiff/cli/config.hpp"
#include "wfdiff/cli/output.hpp"

namespace fs = std::filesystem;
using namespace wfdiff::cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("wfdiff_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  fs::path write(const std::string& name, const std::string& body) const {
    const fs::path p = path / name;
    std::ofstream(p) << body;
    return p;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Rows of a CSV written by the tool, keyed by header name; skips the
// provenance comment.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  REQUIRE(line.rfind("# wfdiff ", 0) == 0);
  std::getline(in, line);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (char ch : s) {
      if (ch == '"') {
        quoted = !quoted;
      } else if (ch == ',' && !quoted) {
        out.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    out.push_back(cur);
    return out;
  };
  const auto header = split(line);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> r;
    for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) {
      r[header[i]] = cells[i];
    }
    rows.push_back(r);
  }
  return rows;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(WFDIFF_TOOL_PATH) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char* kHandModel = R"([model]
family = wf_mutation
theta1 = 1
theta2 = 1
epsilon = 1
beta0 = 0.1
beta1 = 0.1
)";

const char* kSmall = R"(
[sim]
dt = 1e-3
t_max = 50
[hitting]
n = 100
lemma1_n = 100
c = 0.1, 1
[invariant]
chains = 2
cycles_per_chain = 40
bins = 20
[converge]
alpha = auto
replicas = 500
bins = 10
times = 1, 2
pairs = 50
resamples = 20
)";

}  // namespace

TEST_CASE("validate on the hand envelope reports the window (0, 0.6)") {
  TempDir d;
  const auto cfg = d.write("c.ini", std::string(kHandModel));
  const std::string out = (d.path / "out").string();
  CHECK(run_from_file("validate", cfg.string(), {}, std::nullopt, out) == kExitOk);
  const auto rows = read_csv(d.path / "out" / "m_interval.csv");
  REQUIRE(rows.size() == 1);
  CHECK(std::stod(rows[0].at("m_lo")) == 0.0);
  CHECK(std::abs(std::stod(rows[0].at("m_hi")) - 0.6) <= 1e-12);
  const auto checks = read_csv(d.path / "out" / "validation.csv");
  CHECK(checks.size() == 7);
  for (const auto& r : checks) CHECK(r.at("passed") == "true");
}

TEST_CASE("weak mutation model exits 2 with the failing condition listed") {
  TempDir d;
  const auto cfg = d.write("c.ini", "[model]\ntheta1 = 0.4\n");
  CHECK(run_from_file("validate", cfg.string(), {}, std::nullopt,
                      (d.path / "out").string()) == kExitInvalid);
  bool found = false;
  for (const auto& r : read_csv(d.path / "out" / "validation.csv")) {
    if (r.at("condition") == "lower_nonattainability") {
      found = true;
      CHECK(r.at("passed") == "false");
    }
  }
  CHECK(found);
}

TEST_CASE("tool exit statuses") {
  TempDir d;
  CHECK(run_tool("validate --config " + (d.path / "missing.ini").string()) == kExitIo);
  const auto bad = d.write("bad.ini", std::string(kHandModel) + "[hitting]\nm = 0.9\n");
  const std::string out = (d.path / "out").string();
  CHECK(run_tool("hitting --config " + bad.string() + " --out " + out) == kExitInvalid);
  CHECK_FALSE(fs::exists(d.path / "out" / "hitting_report.csv"));
  const auto typo = d.write("typo.ini", "[sim]\nd_t = 0.1\n");
  CHECK(run_tool("validate --config " + typo.string()) == kExitInvalid);
  const auto broken = d.write("broken.ini", "[sim\n");
  CHECK(run_tool("validate --config " + broken.string()) == kExitIo);
  CHECK(run_tool("frobnicate --config " + broken.string()) == kExitInvalid);
  const auto ok = d.write("ok.ini", std::string(kHandModel));
  CHECK(run_tool("validate --config " + ok.string() + " --out " + out) == kExitOk);
}

TEST_CASE("config parsing") {
  TempDir d;
  d.write("model.ini",
          "family = custom\ndrift_expr = 1 - 2*x\nsigma_expr = sqrt(x*(1-x))\n"
          "mu_bound = 1\nbeta0 = 0.1\nb0 = 0.8\nbeta1 = 0.1\nb1 = -0.8\n");
  const auto cfg = d.write("c.ini",
                           "seed = 42\nmodel = model.ini\n[hitting]\nc = 0.5, 2\ndt = 1e-5\n"
                           "checks = prop1, thm1\n[converge]\nx0 = stationary\n");
  const ExperimentConfig e = load_config(cfg.string());
  CHECK(e.seed == 42);
  CHECK(e.model.family == "custom");
  CHECK(e.hitting.c == std::vector<double>{0.5, 2.0});
  CHECK(e.hitting.checks == std::vector<std::string>{"prop1", "thm1"});
  CHECK(e.hitting.dt == 1e-5);
  CHECK(e.sim.dt == 1e-4);
  CHECK_FALSE(e.converge.x0.has_value());
  const auto model = e.model.build();
  CHECK(model.drift(0.25) == doctest::Approx(0.5));
  CHECK(e.sim.t_max == 50.0);

  // Changing the model file changes the hash.
  const ExperimentConfig again = load_config(cfg.string());
  CHECK(again.hash == e.hash);
  d.write("model.ini",
          "family = custom\ndrift_expr = 1 - 2*x\nsigma_expr = sqrt(x*(1-x))\n"
          "mu_bound = 1\nbeta0 = 0.1\nb0 = 0.7\nbeta1 = 0.1\nb1 = -0.8\n");
  CHECK(load_config(cfg.string()).hash != e.hash);

  CHECK_THROWS_AS(load_config(d.write("x.ini", "[nope]\na = 1\n").string()),
                  wfdiff::InvalidParams);
  CHECK_THROWS_AS(load_config(d.write("x.ini", "[hitting]\nchecks = prop3\n").string()),
                  wfdiff::InvalidParams);
  CHECK_THROWS_AS(load_config(d.write("x.ini", "[hitting]\nn = -5\n").string()),
                  wfdiff::InvalidParams);
  CHECK_THROWS_AS(load_config(d.write("x.ini", "[hitting]\ndt = 0\n").string()),
                  wfdiff::InvalidParams);
  CHECK_THROWS_AS(load_config(d.write("x.ini", "[converge]\ntimes = 2, 1\n").string()),
                  wfdiff::InvalidParams);
  CHECK_THROWS_AS(load_config((d.path / "none.ini").string()), ConfigIoError);
  CHECK(parse_list(" 1, 2.5 ,3e-1") == std::vector<double>{1, 2.5, 0.3});
}

TEST_CASE("all writes headed CSVs and is independent of the worker count") {
  TempDir d;
  const auto cfg = d.write("c.ini", std::string("seed = 5\n") + kSmall);
  const fs::path a = d.path / "a", b = d.path / "b";
  RunContext one{1, true, nullptr};
  RunContext three{3, true, nullptr};
  const int ra = run_from_file("all", cfg.string(), one, std::nullopt, a.string());
  const int rb = run_from_file("all", cfg.string(), three, std::nullopt, b.string());
  CHECK(ra == rb);
  CHECK((ra == kExitOk || ra == kExitInconclusive));
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const std::string name = entry.path().filename().string();
    CAPTURE(name);
    const std::string body = slurp(entry.path());
    CHECK(body == slurp(b / name));
    if (entry.path().extension() == ".csv") {
      ++files;
      CHECK(body.rfind("# wfdiff " + std::string(kVersion) + " config_hash=", 0) == 0);
      CHECK(body.substr(0, body.find('\n')).find(" seed=5") != std::string::npos);
    }
  }
  CHECK(files >= 9);
  const std::string svg = slurp(a / "curve.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  double total = 0.0;
  for (const auto& r : read_csv(a / "measure.csv")) total += std::stod(r.at("weight"));
  CHECK(total == doctest::Approx(1.0));
  const auto hits = read_csv(a / "hitting_report.csv");
  CHECK(hits.size() == 2 * 9);
  bool trivial = false;
  for (const auto& r : hits) {
    if (r.at("check") == "thm1" && std::stod(r.at("x0")) == 0.5) {
      trivial = true;
      CHECK(std::stod(r.at("lhs_mean")) == 1.0);
      CHECK(r.at("verdict") == "pass");
    }
  }
  CHECK(trivial);

  // A different seed changes the results.
  const fs::path c = d.path / "c";
  run_from_file("hitting", cfg.string(), one, 6u, c.string());
  CHECK(slurp(c / "hitting_report.csv") != slurp(a / "hitting_report.csv"));
}

TEST_CASE("censoring makes hitting inconclusive") {
  TempDir d;
  const auto cfg = d.write("c.ini", std::string(kHandModel) +
                                        "[sim]\ndt = 1e-3\nt_max = 0.001\n"
                                        "[hitting]\nn = 50\nlemma1_n = 0\nchecks = prop1\n");
  CHECK(run_from_file("hitting", cfg.string(), {}, std::nullopt,
                      (d.path / "out").string()) == kExitInconclusive);
  const auto rows = read_csv(d.path / "out" / "hitting_report.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].at("verdict") == "inconclusive");
}

TEST_CASE("converge from the stationary law stays at the noise floor") {
  TempDir d;
  const auto cfg = d.write("c.ini",
                           "[sim]\ndt = 1e-3\n[converge]\nx0 = stationary\n"
                           "replicas = 4000\nbins = 10\ntimes = 0.5, 1\n");
  CHECK(run_from_file("converge", cfg.string(), {}, std::nullopt,
                      (d.path / "out").string()) == kExitOk);
  for (const auto& r : read_csv(d.path / "out" / "curve.csv")) {
    CHECK(std::stod(r.at("tv_binned")) <= std::stod(r.at("ci")));
    CHECK(r.at("rhs_bound") == "nan");
  }
}

TEST_CASE("csv cells") {
  CHECK(cell(0.1) == "0.10000000000000001");
  CHECK(cell(std::size_t{3}) == "3");
  CHECK(cell(true) == "true");
  CsvTable t({"a", "b"});
  t.row(std::string("x,y"), 1.5);
  CHECK(t.render("# p") == "# p\na,b\n\"x,y\",1.5\n");
  CHECK_THROWS(t.row(1.0));
}
