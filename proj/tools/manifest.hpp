#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace netcoh::cli {

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Run record written next to every command's outputs.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set_flags(nlohmann::json flags) { flags_ = std::move(flags); }
  void set_seed(std::uint64_t seed) { seed_ = seed; has_seed_ = true; }
  void set_threads(int threads) { threads_ = threads; }
  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);
  void fail(int exit_code, const std::string& message);

  nlohmann::json to_json() const;
  /// Writes manifest.json into `dir`.
  void write(const std::filesystem::path& dir) const;

 private:
  std::string command_;
  nlohmann::json flags_ = nlohmann::json::object();
  std::uint64_t seed_ = 0;
  bool has_seed_ = false;
  int threads_ = 0;
  std::vector<std::filesystem::path> inputs_;
  std::vector<std::filesystem::path> outputs_;
  int exit_code_ = 0;
  std::string error_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace netcoh::cli
