#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <string_view>

namespace projsum::io {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// Writes `contents` to a temporary sibling of `path`, then renames it over
/// `path`, so readers never observe a partially written file.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

/// Accumulates an RFC 4180 table (CRLF line endings, '.' decimal point).
class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header);

  CsvWriter& row(std::initializer_list<double> values);
  /// Appends a '#'-prefixed trailer line (ignored by most CSV readers with a
  /// comment character configured).
  CsvWriter& comment(std::string_view text);

  const std::string& str() const noexcept { return buf_; }

 private:
  std::string buf_;
};

}  // namespace projsum::io
