// Copyright 2026 The parabc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "parabc/io_util.hpp"
#include "parabc/report.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string err;
};

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / "parabc_cli_test") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  const fs::path& dir() const { return dir_; }

  CliRun run(const std::string& args) const {
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + PARABC_CLI_PATH + "\" " + args +
                            " > /dev/null 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliRun r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = parabc::read_file(err);
    return r;
  }

  void write(const std::string& name, const std::string& text) const {
    parabc::write_file_atomic(dir_ / name, text);
  }

 private:
  fs::path dir_;
};

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("cli workflow") {
  Workspace ws;
  const fs::path data = PARABC_TEST_DATA_DIR;
  ws.write("population.csv", "Testland,5000000\n");

  const CliRun ingest = ws.run(
      "ingest --confirmed " + q(data / "jhu_confirmed_sample.csv") +
      " --recovered " + q(data / "jhu_recovered_sample.csv") + " --deaths " +
      q(data / "jhu_deaths_sample.csv") + " --country Testland" +
      " --population-table " + q(ws.dir() / "population.csv") + " --out " +
      q(ws.dir() / "series" / "Testland"));
  REQUIRE(ingest.exit_code == 0);
  CHECK(fs::exists(ws.dir() / "series" / "Testland.csv"));

  ws.write("run.json", R"({
    "data": {"dir": "series", "country": "Testland"},
    "abc": {"tolerance": 1e15, "batch_size": 200, "chunk_size": 50,
            "target_accepted": 500, "fit_days": 4},
    "runtime": {"seed": 3},
    "output": {"dir": "out"}
  })");

  const CliRun infer = ws.run("infer " + q(ws.dir() / "run.json"));
  REQUIRE(infer.exit_code == 0);
  const std::string posterior = parabc::read_file(ws.dir() / "out" / "posterior.csv");
  CHECK(parabc::parse_posterior_csv(posterior).size() == 600);
  CHECK(fs::exists(ws.dir() / "out" / "stats.json"));

  SUBCASE("byte-identical across runs and worker counts") {
    REQUIRE(ws.run("infer " + q(ws.dir() / "run.json") + " --workers 4")
                .exit_code == 0);
    CHECK(parabc::read_file(ws.dir() / "out" / "posterior.csv") == posterior);
  }

  SUBCASE("project and histogram") {
    const fs::path bands = ws.dir() / "bands.csv";
    const std::string project_args =
        "project --posterior " + q(ws.dir() / "out" / "posterior.csv") +
        " --series " + q(ws.dir() / "series" / "Testland") + " --out " +
        q(bands) + " --days 30 --seed 1";
    REQUIRE(ws.run(project_args).exit_code == 0);
    const std::string first = parabc::read_file(bands);
    REQUIRE(ws.run(project_args + " --workers 3").exit_code == 0);
    CHECK(parabc::read_file(bands) == first);

    REQUIRE(ws.run("histogram --posterior " +
                   q(ws.dir() / "out" / "posterior.csv") + " --out " +
                   q(ws.dir() / "hist.json") + " --bins 5")
                .exit_code == 0);
    CHECK(fs::exists(ws.dir() / "hist.json"));
  }

  SUBCASE("benchmark") {
    REQUIRE(ws.run("benchmark " + q(ws.dir() / "run.json") +
                   " --workers-list 1,2 --runs 2 --repetitions 1")
                .exit_code == 0);
    CHECK(parabc::read_file(ws.dir() / "out" / "scaling.csv")
              .rfind("workers,time_per_run_ms,total_s,speedup,overhead\n", 0) == 0);
  }

  SUBCASE("max runs exhausted is a runtime error") {
    const CliRun r = ws.run("infer " + q(ws.dir() / "run.json") +
                            " --tolerance 1e-9");
    CHECK(r.exit_code == 1);
  }
}

TEST_CASE("cli config errors exit with code 2") {
  Workspace ws;
  ws.write("bad.json", R"({"data": {"country": "X"}, "abc": {}})");
  const CliRun r = ws.run("infer " + q(ws.dir() / "bad.json"));
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("abc.tolerance") != std::string::npos);

  CHECK(ws.run("infer " + q(ws.dir() / "missing.json")).exit_code == 2);
  CHECK(ws.run("frobnicate").exit_code == 2);
  CHECK(ws.run("project --posterior x.csv").exit_code == 2);
}

TEST_CASE("cli runtime errors exit with code 1") {
  Workspace ws;
  ws.write("posterior.csv", std::string(parabc::kPosteriorHeader) + "\n");
  const CliRun r = ws.run("histogram --posterior " + q(ws.dir() / "posterior.csv") +
                          " --out " + q(ws.dir() / "h.json"));
  CHECK(r.exit_code == 1);
}
