#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace probesched::cli {

// One flat key=value text file per run: the command, its argv, every
// resolved parameter, the seed, SHA-256 digests of input file bytes,
// timestamps and output paths. argv alone is enough to re-run the command.
class RunManifest {
 public:
  explicit RunManifest(std::string command) : command_(std::move(command)) {}

  void set_argv(std::vector<std::string> argv) { argv_ = std::move(argv); }
  void param(std::string key, std::string value) { params_.emplace_back(std::move(key), std::move(value)); }
  // Records the digest of the file's current bytes.
  void input(const std::string& name, const std::filesystem::path& path);
  void output(const std::string& name, const std::filesystem::path& path) {
    outputs_.emplace_back(name, path.string());
  }
  void start();
  void finish(int exit_code);

  const std::vector<std::string>& argv() const noexcept { return argv_; }
  std::string render() const;
  void write(const std::filesystem::path& path) const;

  static std::vector<std::pair<std::string, std::string>> parse(std::string_view text);
  // argv recorded in a manifest, in order.
  static std::vector<std::string> recorded_argv(std::string_view text);

 private:
  std::string command_;
  std::vector<std::string> argv_;
  std::vector<std::pair<std::string, std::string>> params_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
  std::string started_, finished_;
  int exit_code_ = -1;
};

std::string sha256_hex(std::string_view bytes);

}  // namespace probesched::cli
