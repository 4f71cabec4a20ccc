#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace irsa {

// Git blob object id: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_hash(std::string_view content);
std::string sha1_hex(std::string_view content);

std::string read_file(const std::string& path);

// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, std::string_view content);

// Records every file a command produced along with its blob hash.
class RunManifest {
 public:
  RunManifest(std::string command, std::string config_path, std::vector<std::uint64_t> seeds, std::string out_dir,
              nlohmann::json inputs);

  // Fingerprint of the command inputs; stamped into every CSV comment line.
  const std::string& input_hash() const { return input_hash_; }
  const std::string& out_dir() const { return out_dir_; }

  // Writes `content` to out_dir/name atomically and records its hash.
  std::string write(const std::string& name, std::string_view content);
  // Same, with the "# manifest <hash>" comment line prepended.
  std::string write_csv(const std::string& name, std::string_view body);

  nlohmann::json to_json() const;
  // Writes manifest.json into the output directory.
  void finish() const;

 private:
  std::string command_, config_path_, out_dir_;
  std::vector<std::uint64_t> seeds_;
  nlohmann::json inputs_;
  std::string input_hash_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace irsa
