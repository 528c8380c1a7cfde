#pragma once

#include "uqprop/linalg.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace uqprop::cli {

struct Dataset {
  Matrix features;
  Vector target;  // empty when no target column was requested
  std::vector<std::string> column_names;
  std::string target_name;

  Index rows() const noexcept { return features.rows(); }
  bool has_target() const noexcept { return !target_name.empty(); }
};

/// Reads a comma-separated file with a header row. With an empty
/// `target_column` every column is a feature. Non-finite and non-numeric
/// cells are rejected with their row and column.
Dataset ingest_csv(const std::filesystem::path& path, const std::string& target_column = {});

/// Writes features followed by the target column (if any), shortest
/// round-trip formatting.
void write_csv(const std::filesystem::path& path, const Dataset& data);

/// Rows `indices` of `data`.
Dataset select_rows(const Dataset& data, const std::vector<Index>& indices);

}  // namespace uqprop::cli
