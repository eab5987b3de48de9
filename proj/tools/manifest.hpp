#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace rne::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Everything needed to re-run one invocation: the command line, resolved
/// parameters, and digests of every file read and written.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  bool deterministic = true;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;

  /// Digests the listed files and writes the manifest as JSON.
  void write(const std::filesystem::path& path) const;
};

struct DigestCheck {
  std::vector<std::string> changed;  // paths whose current digest differs or that are missing
  bool ok() const { return changed.empty(); }
};

/// Compares the digests recorded under `section` ("inputs" or "outputs")
/// with the files on disk.
DigestCheck check_digests(const nlohmann::json& manifest, const std::string& section);

inline std::filesystem::path manifest_path_for(const std::filesystem::path& out) {
  auto p = out;
  p += ".manifest.json";
  return p;
}

}  // namespace rne::cli
