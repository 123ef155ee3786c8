#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace multiconf {

using Json = nlohmann::ordered_json;

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Plain numeric table; cells are written with %.17g so that rerunning the
// same config reproduces the file byte for byte.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(const std::vector<double>& row) {
    if (row.size() != header_.size()) throw StructuralError("csv row has " + std::to_string(row.size()) + " cells, header has " + std::to_string(header_.size()));
    rows_.push_back(row);
  }

  const std::vector<std::vector<double>>& rows() const { return rows_; }
  const std::vector<std::string>& header() const { return header_; }

  std::string str() const {
    std::string s;
    for (size_t c = 0; c < header_.size(); ++c) s += (c ? "," : "") + header_[c];
    s += '\n';
    for (const auto& r : rows_) {
      for (size_t c = 0; c < r.size(); ++c) s += (c ? "," : "") + format_double(r[c]);
      s += '\n';
    }
    return s;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

inline std::string sha1_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr)) throw NumericalError("sha1 failed", 0.0);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

// same as `git hash-object`
inline std::string git_blob_hash(const std::string& content) {
  return sha1_hex("blob " + std::to_string(content.size()) + '\0' + content);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One directory per run.  Files are hashed as they are written; the manifest
// records the config echo, the hashes of the inputs and of every output.
class RunDirectory {
 public:
  explicit RunDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
  }

  const std::filesystem::path& path() const { return dir_; }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
    out << content;
    outputs_[name] = git_blob_hash(content);
  }
  void write_csv(const std::string& name, const CsvTable& t) { write(name, t.str()); }
  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void add_input(const std::string& name, const std::string& content) { inputs_[name] = git_blob_hash(content); }

  void write_manifest(const Json& config, int exit_code) {
    Json m;
    m["config"] = config;
    m["config_hash"] = git_blob_hash(config.dump());
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["exit_code"] = exit_code;
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    if (!out) throw ConfigError("cannot write manifest");
    out << m.dump(2) << "\n";
  }

 private:
  std::filesystem::path dir_;
  Json inputs_ = Json::object();
  Json outputs_ = Json::object();
};

}  // namespace multiconf
