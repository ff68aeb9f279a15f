#include "helios/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace helios::csv {

std::string format(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

Writer::Writer(const std::filesystem::path& path, const std::vector<std::string>& header)
    : file_(std::fopen(path.string().c_str(), "w")), path_(path) {
  if (!file_) throw std::runtime_error("cannot write '" + path.string() + "'");
  row(header);
}

Writer::~Writer() {
  if (file_) std::fclose(file_);
}

void Writer::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format(v));
  row(cells);
}

void Writer::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) std::fputc(',', file_);
    std::fputs(cells[i].c_str(), file_);
  }
  if (std::fputc('\n', file_) == EOF) throw std::runtime_error("write failed for '" + path_.string() + "'");
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw std::out_of_range("no CSV column '" + name + "'");
}

double Table::number(std::size_t row, const std::string& name) const {
  return std::stod(rows.at(row).at(column(name)));
}

Table read(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read '" + path.string() + "'");
  Table table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace helios::csv
