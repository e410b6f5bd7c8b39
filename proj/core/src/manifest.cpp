#include "mfvl/manifest.hpp"

#include <fftw3.h>
#include <openssl/evp.h>

#include <Eigen/Core>
#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "mfvl/errors.hpp"

namespace mfvl {

namespace {

std::string to_hex(const unsigned char* data, unsigned int len) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    s += digits[data[i] >> 4];
    s += digits[data[i] & 15];
  }
  return s;
}

class Digest {
 public:
  Digest() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw NumericalError("SHA-256 init failed");
  }
  ~Digest() { EVP_MD_CTX_free(ctx_); }
  Digest(const Digest&) = delete;
  Digest& operator=(const Digest&) = delete;
  void update(const void* data, std::size_t len) {
    if (EVP_DigestUpdate(ctx_, data, len) != 1) throw NumericalError("SHA-256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_, md.data(), &len) != 1) throw NumericalError("SHA-256 final failed");
    return to_hex(md.data(), len);
  }

 private:
  EVP_MD_CTX* ctx_;
};

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Digest d;
  d.update(bytes.data(), bytes.size());
  return d.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read '" + path.string() + "' for hashing");
  Digest d;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    d.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return d.hex();
}

std::map<std::string, std::string> library_versions() {
  std::map<std::string, std::string> v;
  v["mfvl"] = MFVL_VERSION;
  v["fftw"] = fftw_version;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["openssl"] = OpenSSL_version(OPENSSL_VERSION);
  v["compiler"] = __VERSION__;
  return v;
}

RunManifest::RunManifest(const ExperimentConfig& config, std::string command)
    : command_(std::move(command)),
      config_digest_(sha256_hex(canonical_text(config))),
      seed_(config.run.seed),
      threads_(config.run.threads) {
  for (const auto& [name, body] : config.sections) section_digests_[name] = sha256_hex(body);
}

void RunManifest::add_stage(const std::string& name, double seconds) { stages_.emplace_back(name, seconds); }

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::set(const std::string& key, Value value) { results_[key] = std::move(value); }

std::string RunManifest::dump() const {
  nlohmann::ordered_json j;
  j["command"] = command_;
  j["config_sha256"] = config_digest_;
  j["sections"] = section_digests_;
  j["seed"] = seed_;
  j["threads"] = threads_;
  j["versions"] = library_versions();
  auto stages = nlohmann::ordered_json::array();
  for (const auto& [name, s] : stages_) stages.push_back({{"name", name}, {"seconds", s}});
  j["stages"] = stages;
  nlohmann::ordered_json outs = nlohmann::ordered_json::object();
  for (const auto& p : outputs_) outs[p.filename().string()] = sha256_file(p);
  j["outputs"] = outs;
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& [k, v] : results_) std::visit([&](const auto& x) { res[k] = x; }, v);
  j["results"] = res;
  return j.dump(2) + "\n";
}

std::filesystem::path RunManifest::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  const auto path = dir / "manifest.json";
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    nlohmann::json old;
    try {
      old = nlohmann::json::parse(in);
    } catch (const std::exception&) {
      throw ValidationError("existing '" + path.string() + "' is not a manifest; refusing to overwrite");
    }
    const bool same = old.value("command", "") == command_ && old.value("config_sha256", "") == config_digest_ &&
                      old.value("seed", std::uint64_t{0}) == seed_;
    if (!same) throw ValidationError("'" + path.string() + "' belongs to a different run; refusing to overwrite");
  }
  std::ofstream out(path, std::ios::trunc);
  out << dump();
  if (!out) throw ValidationError("failed writing '" + path.string() + "'");
  return path;
}

}  // namespace mfvl
