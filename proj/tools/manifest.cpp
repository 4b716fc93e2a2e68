#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <ctime>
#include <map>

#include "probesched/error.hpp"
#include "probesched/io.hpp"

namespace probesched::cli {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

// Values are single-line; newlines would break the format.
std::string escape(std::string_view v) {
  std::string out;
  for (char c : v) {
    if (c == '\\') {
      out += "\\\\";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) {
      out += v[i + 1] == 'n' ? '\n' : v[i + 1];
      ++i;
    } else {
      out += v[i];
    }
  }
  return out;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

void RunManifest::input(const std::string& name, const std::filesystem::path& path) {
  inputs_.emplace_back(name + ".path", path.string());
  inputs_.emplace_back(name + ".sha256", sha256_hex(read_file(path)));
}

void RunManifest::start() { started_ = utc_now(); }

void RunManifest::finish(int exit_code) {
  finished_ = utc_now();
  exit_code_ = exit_code;
}

std::string RunManifest::render() const {
  std::string out;
  const auto line = [&out](std::string_view k, std::string_view v) {
    out += k;
    out += '=';
    out += escape(v);
    out += '\n';
  };
  line("command", command_);
  line("argc", std::to_string(argv_.size()));
  for (std::size_t i = 0; i < argv_.size(); ++i) line("argv." + std::to_string(i), argv_[i]);
  for (const auto& [k, v] : params_) line("param." + k, v);
  for (const auto& [k, v] : inputs_) line("input." + k, v);
  for (const auto& [k, v] : outputs_) line("output." + k, v);
  line("started", started_);
  line("finished", finished_);
  line("exit_code", std::to_string(exit_code_));
  return out;
}

void RunManifest::write(const std::filesystem::path& path) const { write_file(path, render()); }

std::vector<std::pair<std::string, std::string>> RunManifest::parse(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t number = 0;
  while (!text.empty()) {
    ++number;
    const std::size_t eol = text.find('\n');
    const std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(number, "expected key=value");
    out.emplace_back(std::string(line.substr(0, eq)), unescape(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> RunManifest::recorded_argv(std::string_view text) {
  std::map<std::size_t, std::string> args;
  std::size_t argc = 0;
  bool have_argc = false;
  for (const auto& [k, v] : parse(text)) {
    if (k == "argc") {
      argc = std::stoul(v);
      have_argc = true;
    } else if (k.starts_with("argv.")) {
      args[std::stoul(k.substr(5))] = v;
    }
  }
  if (!have_argc || args.size() != argc) throw ParseError(0, "manifest does not record a complete argv");
  std::vector<std::string> out;
  for (auto& [i, v] : args) out.push_back(std::move(v));
  return out;
}

}  // namespace probesched::cli
