#ifndef MCW_MANIFEST_HPP
#define MCW_MANIFEST_HPP

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mcw/digest.hpp"
#include "mcw/edit_log.hpp"
#include "mcw/io.hpp"

namespace mcw {

/// Digest of a file, or of a directory as the digest over "name digest" lines of its
/// regular files in name order.
inline std::string path_digest(const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(path)) return sha256_hex(io::read_file(path));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(path))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const auto& f : files) listing += f.filename().string() + " " + sha256_hex(io::read_file(f)) + "\n";
  return sha256_hex(listing);
}

/// Record of one pipeline run. The run id depends only on the command, input digests and
/// config snapshot, so reruns on identical inputs share an id.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> inputs;   // role -> digest
  std::map<std::string, std::string> outputs;  // file name -> digest
  std::string config;
  std::string started;
  std::string finished;

  void add_input(const std::string& role, const std::filesystem::path& path) { inputs[role] = path_digest(path); }
  void add_output(const std::filesystem::path& path) { outputs[path.filename().string()] = path_digest(path); }
  void add_output_content(const std::string& name, std::string_view content) { outputs[name] = sha256_hex(content); }

  std::string run_id() const {
    std::string key = command + "\n";
    for (const auto& [k, v] : inputs) key += k + " " + v + "\n";
    key += config;
    return sha256_hex(key).substr(0, 16);
  }

  nlohmann::json to_json() const {
    return {{"run", run_id()},     {"command", command},   {"inputs", inputs},
            {"config", config},    {"outputs", outputs},   {"started", started},
            {"finished", finished}};
  }
};

}  // namespace mcw

#endif  // MCW_MANIFEST_HPP
