#include "gradeig/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace gradeig {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

CsvWriter::CsvWriter(const std::filesystem::path& path) : out_(path, std::ios::binary) {
  if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (!first_) out_ << ',';
  out_ << csv_field(s);
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_real(v))); }

CsvWriter& CsvWriter::field(std::uint64_t v) { return field(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::fields(std::span<const double> vs) {
  for (double v : vs) field(v);
  return *this;
}

CsvWriter& CsvWriter::fields(std::span<const std::string> names) {
  for (const auto& n : names) field(std::string_view(n));
  return *this;
}

void CsvWriter::end_row() {
  out_ << "\r\n";
  first_ = true;
  if (!out_) throw std::runtime_error("CSV write failed");
}

}  // namespace gradeig
