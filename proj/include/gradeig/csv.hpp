#pragma once

// RFC 4180 CSV output: CRLF line ends, fields quoted only when needed, reals
// with 17 significant digits via std::to_chars (locale independent).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gradeig {

std::string format_real(double v);
std::string csv_field(std::string_view s);

class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& path);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v);
  CsvWriter& field(std::uint64_t v);
  CsvWriter& fields(std::span<const double> vs);
  CsvWriter& fields(std::span<const std::string> names);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace gradeig
