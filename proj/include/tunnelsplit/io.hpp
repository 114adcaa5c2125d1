#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tunnelsplit::io {

/// Shortest-form-independent rendering with 17 significant digits, '.' as
/// decimal separator; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// A text cell, quoted when it holds a comma, quote or line break.
std::string csv_text(std::string_view s);

/// Rows of a CSV file with '\n' line endings.
class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header);

  CsvBuilder& row(std::initializer_list<double> values);
  CsvBuilder& row(const std::vector<double>& values);
  /// Cells already rendered (text columns).
  CsvBuilder& raw_row(const std::vector<std::string>& cells);

  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

/// Writes to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

/// An output directory whose files are recorded, with checksums, in
/// manifest.json when finish() is called.
class OutputDir {
 public:
  OutputDir(std::filesystem::path root, const nlohmann::json& config, std::string command);

  void write(const std::string& name, std::string_view content);
  /// Extra entries merged into the manifest under "results".
  void set_results(nlohmann::json results) { results_ = std::move(results); }
  const std::filesystem::path& root() const noexcept { return root_; }

  void finish();

 private:
  std::filesystem::path root_;
  nlohmann::json config_;
  std::string command_;
  std::map<std::string, std::string> checksums_;
  nlohmann::json results_;
};

}  // namespace tunnelsplit::io
