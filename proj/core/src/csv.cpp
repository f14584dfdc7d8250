#include "rloco/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace rloco {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

Dataset ingest_csv(const std::string& path, const std::string& target_column,
                   TaskKind task) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("ingest_csv: cannot open " + path);

  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw CsvError(CsvError::Kind::MissingHeader, "ingest_csv: missing header row");

  std::vector<std::string> header = split_line(line);
  for (auto& h : header) h = trim(h);

  // A header of pure numbers is a data row, not a header.
  bool all_numeric = true;
  for (const auto& h : header) {
    char* end = nullptr;
    std::strtod(h.c_str(), &end);
    if (h.empty() || end != h.c_str() + h.size()) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric)
    throw CsvError(CsvError::Kind::MissingHeader,
                   "ingest_csv: first row looks numeric; a header row is required");

  long target_idx = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == target_column) target_idx = static_cast<long>(j);
  if (target_idx < 0)
    throw CsvError(CsvError::Kind::MissingTarget,
                   "ingest_csv: target column '" + target_column + "' not found");

  const std::size_t width = header.size();
  std::vector<double> values;
  std::vector<double> target;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != width)
      throw CsvError(CsvError::Kind::NonNumericCell,
                     "ingest_csv: line " + std::to_string(line_no) + " has " +
                         std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(width),
                     line_no, cells.size() + 1);
    for (std::size_t j = 0; j < width; ++j) {
      std::string cell = trim(cells[j]);
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      bool parsed = !cell.empty() && end == cell.c_str() + cell.size();
      if (!parsed || !std::isfinite(v))
        throw CsvError(CsvError::Kind::NonNumericCell,
                       "ingest_csv: non-numeric or non-finite cell at line " +
                           std::to_string(line_no) + ", column " +
                           std::to_string(j + 1) + " ('" + header[j] + "')",
                       line_no, j + 1);
      if (static_cast<long>(j) == target_idx)
        target.push_back(v);
      else
        values.push_back(v);
    }
  }
  if (target.empty()) throw std::runtime_error("ingest_csv: no data rows");

  const std::size_t p = width - 1;
  const std::size_t n = target.size();
  Matrix X(n, p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) X(i, j) = values[i * p + j];

  std::vector<std::string> names;
  names.reserve(p);
  for (std::size_t j = 0; j < width; ++j)
    if (static_cast<long>(j) != target_idx) names.push_back(header[j]);

  return Dataset(std::move(X), std::move(target), std::move(names), task);
}

}  // namespace rloco
