#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace rne::cli {

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  std::array<char, 1 << 16> buffer;
  while (in) {
    in.read(buffer.data(), buffer.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    hex += kHex[digest[i] >> 4];
    hex += kHex[digest[i] & 0xf];
  }
  return hex;
}

void RunManifest::write(const std::filesystem::path& path) const {
  nlohmann::ordered_json j;
  j["tool"] = "rne";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["argv"] = argv;
  j["cwd"] = std::filesystem::current_path().string();
  j["deterministic"] = deterministic;
  j["parameters"] = parameters;
  auto digests = [](const std::vector<std::filesystem::path>& files) {
    nlohmann::ordered_json section = nlohmann::ordered_json::object();
    for (const auto& f : files) section[std::filesystem::absolute(f).lexically_normal().string()] = sha256_file(f);
    return section;
  };
  j["inputs"] = digests(inputs);
  j["outputs"] = digests(outputs);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path.string());
  out << j.dump(2) << '\n';
}

DigestCheck check_digests(const nlohmann::json& manifest, const std::string& section) {
  DigestCheck check;
  for (const auto& [file, digest] : manifest.at(section).items()) {
    std::error_code ec;
    if (!std::filesystem::exists(file, ec) || sha256_file(file) != digest.get<std::string>()) {
      check.changed.push_back(file);
    }
  }
  return check;
}

}  // namespace rne::cli
