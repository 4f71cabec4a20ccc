#include "irsa/io.hpp"

#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "irsa/error.hpp"

namespace irsa {

std::string sha1_hex(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &len, EVP_sha1(), nullptr) != 1)
    throw NumericalFailure("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string git_blob_hash(std::string_view content) {
  std::string buf = "blob " + std::to_string(content.size());
  buf.push_back('\0');
  buf.append(content);
  return sha1_hex(buf);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifact(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidParameter("out", "cannot write " + tmp);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidParameter("out", "short write on " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

RunManifest::RunManifest(std::string command, std::string config_path, std::vector<std::uint64_t> seeds,
                         std::string out_dir, nlohmann::json inputs)
    : command_(std::move(command)),
      config_path_(std::move(config_path)),
      out_dir_(std::move(out_dir)),
      seeds_(std::move(seeds)),
      inputs_(std::move(inputs)) {
  const nlohmann::json fp = {{"command", command_}, {"seeds", seeds_}, {"inputs", inputs_}};
  input_hash_ = sha1_hex(fp.dump());
}

std::string RunManifest::write(const std::string& name, std::string_view content) {
  const std::string path = (std::filesystem::path(out_dir_) / name).string();
  write_file_atomic(path, content);
  const std::string hash = git_blob_hash(content);
  files_.emplace_back(name, hash);
  return path;
}

std::string RunManifest::write_csv(const std::string& name, std::string_view body) {
  std::string content = "# manifest " + input_hash_ + "\n";
  content.append(body);
  return write(name, content);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json files = nlohmann::json::array();
  for (const auto& [name, hash] : files_) files.push_back({{"path", name}, {"blob", hash}});
  return {{"command", command_}, {"config", config_path_}, {"seeds", seeds_}, {"out", out_dir_},
          {"input_hash", input_hash_}, {"inputs", inputs_}, {"files", files}};
}

void RunManifest::finish() const {
  write_file_atomic((std::filesystem::path(out_dir_) / "manifest.json").string(), to_json().dump(2) + "\n");
}

}  // namespace irsa
