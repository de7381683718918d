#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#ifndef NETCOH_VERSION
#define NETCOH_VERSION "0.0.0"
#endif

namespace netcoh::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 initialisation failed");
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md;
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md.data(), &len);
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return hex.str();
}

RunManifest::RunManifest(std::string command)
    : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

void RunManifest::add_input(const std::filesystem::path& path) { inputs_.push_back(path); }
void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::fail(int exit_code, const std::string& message) {
  exit_code_ = exit_code;
  error_ = message;
}

nlohmann::json RunManifest::to_json() const {
  auto digests = [](const std::vector<std::filesystem::path>& files) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& f : files) {
      nlohmann::json entry = {{"path", f.string()}};
      entry["sha256"] = std::filesystem::exists(f) ? nlohmann::json(sha256_file(f)) : nlohmann::json(nullptr);
      list.push_back(entry);
    }
    return list;
  };
  nlohmann::json doc;
  doc["command"] = command_;
  doc["flags"] = flags_;
  doc["seed"] = has_seed_ ? nlohmann::json(seed_) : nlohmann::json(nullptr);
  doc["threads"] = threads_;
  doc["inputs"] = digests(inputs_);
  doc["outputs"] = digests(outputs_);
  doc["tool_version"] = NETCOH_VERSION;
  doc["duration_seconds"] =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  doc["exit_code"] = exit_code_;
  if (!error_.empty()) doc["error"] = error_;
  return doc;
}

void RunManifest::write(const std::filesystem::path& dir) const {
  std::ofstream out(dir / "manifest.json");
  out << to_json().dump(2) << '\n';
}

}  // namespace netcoh::cli
