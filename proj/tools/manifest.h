#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace termcorpus::cli {

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

// `path` relative to `base` when both resolve on the same root, in generic
// (forward-slash) form.
std::string relative_to(const std::filesystem::path& path,
                        const std::filesystem::path& base);

// Record of one subcommand run, merged into `<dir>/run_manifest.json` under
// runs.<command>. Contains no timestamps or thread counts, so identical runs
// produce identical manifests.
class RunManifest {
 public:
  RunManifest(std::string command, std::filesystem::path dir);

  void set_config(nlohmann::json config) { config_ = std::move(config); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  // Paths in the config are expected to be made relative by the caller.
  std::string relative(const std::filesystem::path& path) const {
    return relative_to(path, dir_);
  }

  void write() const;

 private:
  std::string command_;
  std::filesystem::path dir_;
  nlohmann::json config_ = nlohmann::json::object();
  std::optional<std::uint64_t> seed_;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace termcorpus::cli
