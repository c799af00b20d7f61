#include "manifest.h"

#include <array>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "termcorpus/error.h"
#include "termcorpus/version.h"

namespace termcorpus::cli {

namespace fs = std::filesystem;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for hashing");

  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buffer{};
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) {
      EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
  }
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);

  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xF];
  }
  return hex;
}

std::string relative_to(const fs::path& path, const fs::path& base) {
  const auto target = fs::absolute(path).lexically_normal();
  const auto rel = target.lexically_relative(fs::absolute(base).lexically_normal());
  return rel.empty() ? target.generic_string() : rel.generic_string();
}

RunManifest::RunManifest(std::string command, fs::path dir)
    : command_(std::move(command)), dir_(std::move(dir)) {}

void RunManifest::add_input(const fs::path& path) { inputs_.push_back(path); }

void RunManifest::add_output(const fs::path& path) { outputs_.push_back(path); }

void RunManifest::write() const {
  const auto file = dir_ / "run_manifest.json";
  nlohmann::json manifest;
  if (fs::exists(file)) {
    std::ifstream in(file, std::ios::binary);
    manifest = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (!manifest.is_object()) manifest = nlohmann::json::object();
  }
  manifest["tool"] = "termcorpus";
  manifest["version"] = TERMCORPUS_VERSION;

  nlohmann::json run;
  run["config"] = config_;
  if (seed_) run["seed"] = *seed_;
  run["inputs"] = nlohmann::json::array();
  for (const auto& p : inputs_) {
    run["inputs"].push_back({{"path", relative(p)}, {"sha256", sha256_file(p)}});
  }
  run["outputs"] = nlohmann::json::array();
  for (const auto& p : outputs_) {
    run["outputs"].push_back({{"path", relative(p)}, {"sha256", sha256_file(p)}});
  }
  manifest["runs"][command_] = std::move(run);

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + file.string() + "'");
  out << manifest.dump(2) << '\n';
}

}  // namespace termcorpus::cli
