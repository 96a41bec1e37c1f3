#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using canids::cli::run;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("canids_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out, err;
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string data_lines(const std::string& text) {
  std::istringstream in(text);
  std::string line, keep;
  while (std::getline(in, line))
    if (line.empty() || line[0] != '#') keep += line + '\n';
  return keep;
}

void write_scenario(const std::string& path) {
  std::ofstream(path) << R"({"seed": 7, "baseline": {"duration": 12},
    "attacks": [{"kind": "dos", "start": 3, "end": 7}]})";
}

}  // namespace

TEST_CASE("cli pipeline") {
  TempDir dir;
  write_scenario(dir / "s.json");
  REQUIRE(call({"synth", "--scenario", dir / "s.json", "--out", dir / "log.csv"}).code == 0);
  const auto log = slurp(dir / "log.csv");
  CHECK(log.rfind("# canids synth", 0) == 0);

  REQUIRE(call({"featurize", "--in", dir / "log.csv", "--window-ms", "23", "--out", dir / "f.csv"}).code == 0);
  const auto feats = slurp(dir / "f.csv");
  const auto header = data_lines(feats).substr(0, data_lines(feats).find('\n'));
  CHECK(header ==
        "window_index,nodes,edges,max_indegree,max_outdegree,min_indegree,min_outdegree,"
        "median_pagerank,max_pagerank,min_pagerank,label");

  const auto eval = call({"evaluate", "--features", dir / "f.csv", "--model", "ggnb", "--seed", "7",
                          "--predictions", dir / "eval_pred.csv"});
  REQUIRE(eval.code == 0);
  CHECK(eval.out.find("accuracy:") != std::string::npos);

  SUBCASE("train then predict matches evaluate") {
    REQUIRE(call({"train", "--features", dir / "f.csv", "--seed", "7", "--out", dir / "m.txt"}).code == 0);
    REQUIRE(call({"predict", "--model-file", dir / "m.txt", "--features", dir / "f.csv", "--fold", "test",
                  "--seed", "7", "--out", dir / "pred.csv"})
                .code == 0);
    CHECK(data_lines(slurp(dir / "pred.csv")) == data_lines(slurp(dir / "eval_pred.csv")));
  }
  SUBCASE("identical invocations give identical bytes") {
    REQUIRE(call({"synth", "--scenario", dir / "s.json", "--out", dir / "log2.csv"}).code == 0);
    CHECK(slurp(dir / "log2.csv") == log);
    REQUIRE(call({"featurize", "--in", dir / "log.csv", "--window-ms", "23", "--out", dir / "f2.csv"}).code == 0);
    CHECK(slurp(dir / "f2.csv") == feats);
    CHECK(call({"evaluate", "--features", dir / "f.csv", "--model", "ggnb", "--seed", "7",
                "--predictions", dir / "eval_pred.csv"})
              .out == eval.out);
  }
  SUBCASE("inputs are not modified") {
    const auto before = fs::last_write_time(dir / "log.csv");
    call({"featurize", "--in", dir / "log.csv", "--out", dir / "f3.csv"});
    CHECK(slurp(dir / "log.csv") == log);
    CHECK(fs::last_write_time(dir / "log.csv") == before);
  }
  SUBCASE("report and sweep") {
    REQUIRE(call({"report", "--in", dir / "f.csv", "--out", dir / "rep"}).code == 0);
    for (const char* f : {"report.txt", "evaluation.csv", "correlation.csv", "importance.csv", "quantile.csv"})
      CHECK_MESSAGE(fs::exists(dir / (std::string("rep/") + f)), f);
    const auto sweep = call({"sweep", "--in", dir / "log.csv", "--grid", "23,46"});
    REQUIRE(sweep.code == 0);
    CHECK(sweep.out.find("46,") != std::string::npos);
    const auto strict = call({"sweep", "--in", dir / "log.csv", "--grid", "23", "--label-threshold", "0.5"});
    REQUIRE(strict.code == 0);
    CHECK(strict.out.find("# label_threshold=0.5\n") != std::string::npos);
    CHECK(call({"sweep", "--in", dir / "log.csv", "--window-ms", "23"}).code == 1);
  }
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  CHECK(call({}).code == 1);
  const auto unknown = call({"featurize", "--bogus"});
  CHECK(unknown.code == 1);
  CHECK_FALSE(unknown.err.empty());
  CHECK(call({"teleport"}).code == 1);
  CHECK(call({"featurize", "--in", dir / "missing.csv", "--out", dir / "x.csv"}).code == 2);
  std::ofstream(dir / "bad.csv") << "0.1,0316,8,05,R\n";
  const auto bad = call({"featurize", "--in", dir / "bad.csv", "--out", dir / "x.csv"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 1") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "x.csv"));
  CHECK(call({"synth", "--attack", "dos", "--scenario", "x.json", "--out", dir / "y.csv"}).code == 1);
  CHECK(call({"synth", "--attack", "bogus", "--out", dir / "y.csv"}).code == 1);
  CHECK(call({"featurize", "--in", "a", "--window-ms", "5", "--window-frames", "5", "--out", "b"}).code == 1);
  CHECK(call({"--help"}).code == 0);
}
