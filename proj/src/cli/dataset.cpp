#include "uqprop/cli/dataset.hpp"

#include "uqprop/errors.hpp"
#include "uqprop/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace uqprop::cli {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string location(const std::filesystem::path& path, std::size_t line, const std::string& column) {
  return "'" + path.string() + "' line " + std::to_string(line) + ", column '" + column + "'";
}

}  // namespace

Dataset ingest_csv(const std::filesystem::path& path, const std::string& target_column) {
  std::ifstream in(path);
  if (!in) throw ContractError("cannot open dataset '" + path.string() + "'");
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw ContractError("dataset '" + path.string() + "' is empty");

  std::ptrdiff_t target_index = -1;
  if (!target_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), target_column);
    if (it == header.end()) {
      throw ContractError("dataset '" + path.string() + "' has no column named '" + target_column + "'");
    }
    target_index = it - header.begin();
  }

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw ContractError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected " +
                          std::to_string(header.size()) + " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto& c = cells[j];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), value);
      if (c.empty() || ec != std::errc() || ptr != c.data() + c.size()) {
        throw ContractError(location(path, line_no, header[j]) + ": '" + c + "' is not a number");
      }
      if (!std::isfinite(value)) throw ContractError(location(path, line_no, header[j]) + ": non-finite value '" + c + "'");
      row[j] = value;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ContractError("dataset '" + path.string() + "' has no data rows");

  Dataset data;
  const Index n = static_cast<Index>(rows.size());
  const Index m = static_cast<Index>(header.size()) - (target_index >= 0 ? 1 : 0);
  data.features.resize(n, m);
  if (target_index >= 0) {
    data.target.resize(n);
    data.target_name = target_column;
  }
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (static_cast<std::ptrdiff_t>(j) != target_index) data.column_names.push_back(header[j]);
  }
  for (Index i = 0; i < n; ++i) {
    Index col = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<std::ptrdiff_t>(j) == target_index) {
        data.target(i) = rows[static_cast<std::size_t>(i)][j];
      } else {
        data.features(i, col++) = rows[static_cast<std::size_t>(i)][j];
      }
    }
  }
  return data;
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ostringstream os;
  for (std::size_t j = 0; j < data.column_names.size(); ++j) os << (j ? "," : "") << data.column_names[j];
  if (data.has_target()) os << (data.column_names.empty() ? "" : ",") << data.target_name;
  os << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.features.cols(); ++j) os << (j ? "," : "") << io::format_double(data.features(i, j));
    if (data.has_target()) os << (data.features.cols() ? "," : "") << io::format_double(data.target(i));
    os << '\n';
  }
  io::write_text_file(path, os.str());
}

Dataset select_rows(const Dataset& data, const std::vector<Index>& indices) {
  Dataset out;
  out.column_names = data.column_names;
  out.target_name = data.target_name;
  out.features.resize(static_cast<Index>(indices.size()), data.features.cols());
  if (data.has_target()) out.target.resize(static_cast<Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.features.row(static_cast<Index>(k)) = data.features.row(indices[k]);
    if (data.has_target()) out.target(static_cast<Index>(k)) = data.target(indices[k]);
  }
  return out;
}

}  // namespace uqprop::cli
