#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "test_util.h"

namespace termcorpus::testing {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

inline CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Relative path -> contents for every regular file below `root`.
inline std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) {
      files[std::filesystem::relative(e.path(), root).generic_string()] = slurp(e.path());
    }
  }
  return files;
}

// Every subcommand on the bundled fixture, seed 42. Returns the first
// non-zero exit code, or 0.
inline int run_pipeline(const std::filesystem::path& dir) {
  const auto fx = [](const char* name) { return data_path(name).string(); };
  const auto d = [&](const std::string& rel) { return (dir / rel).string(); };
  std::filesystem::create_directories(dir / "eval");
  std::filesystem::create_directories(dir / "loss");
  {
    std::ofstream lp(dir / "loss" / "lp.jsonl");
    lp << R"({"id":0,"lp":[-0.1,-0.2,-0.3],"ssp_lp":[-0.4,-0.5,-0.6],"mask":[0,1,0]})" << '\n'
       << R"({"id":1,"lp":[-1.25,-0.5],"ssp_lp":[-2.0,-0.125],"mask":[1]})" << '\n';
  }
  const std::vector<std::vector<std::string>> steps{
      {"--seed", "42", "match", "--src", fx("fixture.de"), "--tgt", fx("fixture.en"), "--dict",
       fx("fixture_dict.tsv"), "--out", d("match/matched.jsonl")},
      {"--seed", "42", "split", "--in", d("match/matched.jsonl"), "--out-dir", d("split"),
       "--heldout-size", "5"},
      {"--seed", "42", "unique-test", "--split-dir", d("split")},
      {"--seed", "42", "corrupt", "--in", d("split/train.jsonl"), "--out",
       d("corrupt/train.corrupt.jsonl")},
      {"--seed", "42", "stats", "--in", d("match/matched.jsonl"), "--out-dir", d("stats")},
      {"--seed", "42", "eval", "--ref", d("split/test.jsonl"), "--hyp", d("split/test.tgt"),
       "--out", d("eval/metrics.json"), "--details", d("eval/details.tsv")},
      {"--seed", "42", "loss", "--in", d("loss/lp.jsonl"), "--out", d("loss/loss.json"),
       "--per-token"},
  };
  for (const auto& step : steps) {
    const auto r = run_cli(step);
    if (r.code != 0) return r.code;
  }
  return 0;
}

}  // namespace termcorpus::testing
