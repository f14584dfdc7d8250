#pragma once

#include <stdexcept>
#include <string>

#include "rloco/dataset.hpp"

namespace rloco {

// Ingestion failures carry the offending location and map to distinct CLI
// exit codes.
struct CsvError : std::runtime_error {
  enum class Kind { MissingHeader, NonNumericCell, MissingTarget };

  CsvError(Kind kind, std::string message, std::size_t line = 0,
           std::size_t column = 0)
      : std::runtime_error(std::move(message)), kind(kind), line(line),
        column(column) {}

  Kind kind;
  std::size_t line;    // 1-based file line
  std::size_t column;  // 1-based column
};

// Strict numeric CSV reader: UTF-8, comma separated, one header row, no
// quoting. Any non-numeric or non-finite cell is an error naming its line and
// column. The target column is removed from the features; column order is
// preserved otherwise.
Dataset ingest_csv(const std::string& path, const std::string& target_column,
                   TaskKind task);

}  // namespace rloco
