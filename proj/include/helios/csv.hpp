#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace helios::csv {

/// %.17g, enough to round-trip any double.
std::string format(double value);

/// Comma-separated writer; reals go through format().
class Writer {
 public:
  Writer(const std::filesystem::path& path, const std::vector<std::string>& header);
  ~Writer();
  Writer(const Writer&) = delete;
  Writer& operator=(const Writer&) = delete;

  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::FILE* file_;
  std::filesystem::path path_;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

Table read(const std::filesystem::path& path);

}  // namespace helios::csv
