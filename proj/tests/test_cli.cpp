/*
 * Copyright 2026 The explain Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "explain/cli.hpp"
#include "explain/json_io.hpp"
#include "golden_cases.hpp"

using namespace explain;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("explain_cli_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string wine_path() { return std::string(EXPLAIN_DATA_DIR) + "/winequality-red.csv"; }

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("breakdown on wine") {
  TempDir tmp;
  const Result r = run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "5", "--model",
                            "ols", "--direction", "up", "--baseline", "intercept", "--json", tmp.file("out.json"),
                            "--threads", "1"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(testing::read_file(tmp.file("out.json")));
  CHECK(doc["seed"] == 42);
  CHECK(doc["version"] == "0.1.0");
  CHECK(doc["config"]["row"] == 5);
  const Json& a = doc["result"];
  CHECK(std::abs(a["baseline"].get<double>() - 5.636) <= 5e-4);
  double sum = a["baseline"].get<double>();
  for (const auto& e : a["entries"]) sum += e["contribution"].get<double>();
  CHECK(std::abs(sum - a["final_prediction"].get<double>()) <= 1e-9);
  CHECK(a["entries"].size() == 11);
}

TEST_CASE("row selector is 1-based and bounds checked") {
  TempDir tmp;
  std::string csv = "a,b,y\n";
  for (int i = 0; i < 10; ++i) csv += std::to_string(i) + "," + std::to_string(i * i % 7) + "," + std::to_string(2 * i + i % 3) + "\n";
  write(tmp.file("ten.csv"), csv);
  CHECK(run_cli({"breakdown", "--data", tmp.file("ten.csv"), "--response", "y", "--row", "0"}).code == 1);
  CHECK(run_cli({"breakdown", "--data", tmp.file("ten.csv"), "--response", "y", "--row", "11"}).code == 1);
  const Result ok = run_cli({"breakdown", "--data", tmp.file("ten.csv"), "--response", "y", "--row", "10"});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("final_prognosis") != std::string::npos);
}

TEST_CASE("exact shapley above the cap") {
  TempDir tmp;
  std::string csv;
  for (int j = 1; j <= 20; ++j) csv += "f" + std::to_string(j) + ",";
  csv += "y\n";
  for (int i = 0; i < 30; ++i) {
    for (int j = 1; j <= 20; ++j) csv += std::to_string((i * j) % 11 + (i == j ? 1 : 0)) + ",";
    csv += std::to_string(i) + "\n";
  }
  write(tmp.file("wide.csv"), csv);
  const Result r = run_cli({"shapley", "--method", "exact", "--data", tmp.file("wide.csv"), "--response", "y",
                            "--row", "1", "--model", "external", "--", EXPLAIN_FIXTURE_IDENTITY});
  CHECK(r.code == 2);
  CHECK(r.err.find("cap") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1", "--bogus"}).code == 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality"}).code == 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1", "--observation", "1"})
            .code == 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1", "--model", "external"})
            .code == 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1", "--gamma", "2"}).code ==
        1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1", "--", "scorer"}).code ==
        1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1", "--direction",
                 "sideways"})
            .code == 1);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("data errors exit 2") {
  CHECK(run_cli({"breakdown", "--data", "/nonexistent.csv", "--response", "y", "--row", "1"}).code == 2);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "nope", "--row", "1"}).code == 2);
  const Result scorer = run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1",
                                 "--model", "external", "--", EXPLAIN_FIXTURE_EXIT_ONE});
  CHECK(scorer.code == 2);
  CHECK(scorer.err.find("model file not found") != std::string::npos);
}

TEST_CASE("inline observation") {
  TempDir tmp;
  const Result r = run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--observation",
                            "7.4,0.7,0,1.9,0.076,11,34,0.9978,3.51,0.56,9.4", "--json", tmp.file("a.json")});
  REQUIRE(r.code == 0);
  const Result row = run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "5", "--json",
                              tmp.file("b.json")});
  REQUIRE(row.code == 0);
  const Json a = Json::parse(testing::read_file(tmp.file("a.json")));
  const Json b = Json::parse(testing::read_file(tmp.file("b.json")));
  CHECK(a["result"] == b["result"]);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--observation", "1,2"}).code == 1);
}

TEST_CASE("every subcommand writes reproducible artifacts") {
  TempDir tmp;
  const std::vector<std::vector<std::string>> runs = {
      {"breakdown", "--direction", "down", "--baseline", "zero"},
      {"shapley", "--method", "sample", "--permutations", "20"},
      {"live", "--size", "200", "--white-box", "ols"},
      {"live", "--size", "200", "--white-box", "lasso"},
      {"trace", "--model", "kernel-ridge", "--gamma", "0.2", "--ridge", "0.5"},
  };
  for (const auto& extra : runs) {
    std::vector<std::string> base = {"--data", wine_path(), "--response", "quality", "--row", "5", "--seed", "7"};
    if (extra[0] == "trace") {
      // Small background keeps the kernel ridge run quick.
      std::ifstream in(wine_path());
      std::string line, head;
      for (int i = 0; i < 121 && std::getline(in, line); ++i) head += line + "\n";
      write(tmp.file("small.csv"), head);
      base[1] = tmp.file("small.csv");
    }
    std::vector<std::string> first(extra.begin(), extra.begin() + 1);
    first.insert(first.end(), base.begin(), base.end());
    first.insert(first.end(), extra.begin() + 1, extra.end());
    std::vector<std::string> second = first;
    for (auto* args : {&first, &second}) {
      const std::string tag = args == &first ? "1" : "2";
      const bool svg = !(extra[0] == "live" && extra.back() == "lasso");
      args->insert(args->end(), {"--json", tmp.file("r" + tag + ".json"), "--text", tmp.file("r" + tag + ".txt")});
      if (svg) args->insert(args->end(), {"--svg", tmp.file("r" + tag + ".svg")});
      const Result r = run_cli(*args);
      INFO(extra[0], " ", r.err);
      REQUIRE(r.code == 0);
    }
    CHECK(testing::read_file(tmp.file("r1.json")) == testing::read_file(tmp.file("r2.json")));
    CHECK(testing::read_file(tmp.file("r1.txt")) == testing::read_file(tmp.file("r2.txt")));
    CHECK(testing::read_file(tmp.file("r1.svg")) == testing::read_file(tmp.file("r2.svg")));
    CHECK(Json::parse(testing::read_file(tmp.file("r1.json")))["seed"] == 7);
    fs::remove(tmp.file("r1.svg"));
    fs::remove(tmp.file("r2.svg"));
  }
}

TEST_CASE("lasso fits cannot draw forest plots") {
  TempDir tmp;
  const Result r = run_cli({"live", "--data", wine_path(), "--response", "quality", "--row", "5", "--white-box",
                            "lasso", "--svg", tmp.file("f.svg")});
  CHECK(r.code == 2);
  CHECK(r.err.find("ols") != std::string::npos);
}

TEST_CASE("threads from the environment") {
  ::setenv("EXPLAIN_THREADS", "zero", 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1"}).code == 1);
  ::setenv("EXPLAIN_THREADS", "2", 1);
  CHECK(run_cli({"breakdown", "--data", wine_path(), "--response", "quality", "--row", "1"}).code == 0);
  ::unsetenv("EXPLAIN_THREADS");
}

TEST_CASE("the binary maps exit codes") {
  const char* bin = std::getenv("EXPLAIN_BIN");
  REQUIRE(bin != nullptr);
  const std::string base = std::string(bin) + " breakdown --data " + wine_path() + " --response quality";
  CHECK(WEXITSTATUS(std::system((base + " --row 0 2>/dev/null").c_str())) == 1);
  CHECK(WEXITSTATUS(std::system((base + " --row 5 >/dev/null").c_str())) == 0);
}
