#include "tunnelsplit/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>
#include <unistd.h>

#include "tunnelsplit/error.hpp"

namespace tunnelsplit::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header) : columns_(header.size()) {
  raw_row(header);
}

std::string csv_text(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

CsvBuilder& CsvBuilder::row(std::initializer_list<double> values) {
  return row(std::vector<double>(values));
}

CsvBuilder& CsvBuilder::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  return raw_row(cells);
}

CsvBuilder& CsvBuilder::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CSV row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

OutputDir::OutputDir(std::filesystem::path root, const nlohmann::json& config, std::string command)
    : root_(std::move(root)), config_(config), command_(std::move(command)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write(const std::string& name, std::string_view content) {
  write_atomic(root_ / name, content);
  checksums_[name] = sha256_hex(content);
}

void OutputDir::finish() {
  nlohmann::json m;
  m["tool"] = "tunnelsplit";
  m["version"] = TUNNELSPLIT_VERSION;
  m["command"] = command_;
  m["config_sha256"] = sha256_hex(config_.dump());
  m["config"] = config_;
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, sum] : checksums_) files[name] = {{"sha256", sum}};
  m["files"] = files;
  if (!results_.is_null()) m["results"] = results_;
  write_atomic(root_ / "manifest.json", m.dump(2) + "\n");
}

}  // namespace tunnelsplit::io
