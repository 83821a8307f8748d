#include "io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace projsum::io {

std::string format_double(double x) {
  if (x == 0.0) return "0";  // also folds -0
  std::array<char, 64> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: to_chars failed");
  return {buf.data(), end};
}

void write_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CsvWriter::CsvWriter(std::initializer_list<std::string_view> header) {
  bool first = true;
  for (auto h : header) {
    if (!first) buf_ += ',';
    buf_ += h;
    first = false;
  }
  buf_ += "\r\n";
}

CsvWriter& CsvWriter::row(std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) buf_ += ',';
    buf_ += format_double(v);
    first = false;
  }
  buf_ += "\r\n";
  return *this;
}

CsvWriter& CsvWriter::comment(std::string_view text) {
  buf_ += "# ";
  buf_ += text;
  buf_ += "\r\n";
  return *this;
}

}  // namespace projsum::io
