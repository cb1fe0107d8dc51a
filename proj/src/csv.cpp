#include "multivariance/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "multivariance/errors.hpp"

namespace multivariance {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, out);
  return result.ec == std::errc{} && result.ptr == end;
}

}  // namespace

CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("csv: cannot open '" + path + "'");

  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;  // skip blank lines
    rows.push_back(split_fields(line));
    line_numbers.push_back(line_number);
  }
  if (rows.empty()) throw InputError("csv: '" + path + "' contains no data");

  CsvTable table;
  std::size_t first_data = 0;
  double value;
  for (const std::string& cell : rows.front()) {
    if (!parse_double(cell, value)) {
      table.had_header = true;
      break;
    }
  }
  if (table.had_header) {
    table.header = rows.front();
    first_data = 1;
    if (rows.size() == 1) throw InputError("csv: '" + path + "' has a header but no data");
  }

  const std::size_t cols = rows[first_data].size();
  const std::size_t data_rows = rows.size() - first_data;
  table.values.resize(data_rows, cols);
  for (std::size_t r = first_data; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != cols) {
      throw InputError("csv: line " + std::to_string(line_numbers[r]) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!parse_double(fields[c], value)) {
        throw InputError("csv: line " + std::to_string(line_numbers[r]) +
                         ", column " + std::to_string(c) + ": '" + fields[c] +
                         "' is not numeric");
      }
      if (!std::isfinite(value)) {
        throw InputError("csv: line " + std::to_string(line_numbers[r]) +
                         ", column " + std::to_string(c) +
                         ": non-finite value rejected (row " +
                         std::to_string(r - first_data) + ")");
      }
      table.values(r - first_data, c) = value;
    }
  }
  return table;
}

std::vector<std::pair<int, int>> parse_block_spec(const std::string& spec,
                                                  int total_columns) {
  if (spec.empty()) throw InputError("block spec: empty");
  std::vector<std::pair<int, int>> ranges;
  std::vector<char> used(total_columns, 0);
  std::istringstream in(spec);
  std::string token;
  while (std::getline(in, token, ';')) {
    token = trim(token);
    if (token.empty()) throw InputError("block spec: empty block in '" + spec + "'");
    int lo = 0, hi = 0;
    const auto dash = token.find('-');
    auto parse_int = [&](const std::string& text) {
      int v = 0;
      const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
      if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || v < 0) {
        throw InputError("block spec: bad column index '" + text + "' in '" + spec + "'");
      }
      return v;
    };
    if (dash == std::string::npos) {
      lo = hi = parse_int(token);
    } else {
      lo = parse_int(token.substr(0, dash));
      hi = parse_int(token.substr(dash + 1));
    }
    if (lo > hi) {
      throw InputError("block spec: range '" + token + "' is reversed");
    }
    if (hi >= total_columns) {
      throw InputError("block spec: column " + std::to_string(hi) +
                       " out of range, the data has " +
                       std::to_string(total_columns) + " columns");
    }
    for (int c = lo; c <= hi; ++c) {
      if (used[c]) {
        throw InputError("block spec: column " + std::to_string(c) +
                         " appears in more than one block");
      }
      used[c] = 1;
    }
    ranges.emplace_back(lo, hi);
  }
  if (ranges.empty()) throw InputError("block spec: no blocks in '" + spec + "'");
  return ranges;
}

BlockSample ingest_csv(const std::string& path, const std::string& block_spec) {
  const CsvTable table = read_numeric_csv(path);
  const auto ranges = parse_block_spec(block_spec, static_cast<int>(table.values.cols()));
  int width = 0;
  for (const auto& [lo, hi] : ranges) width += hi - lo + 1;
  Eigen::MatrixXd data(table.values.rows(), width);
  std::vector<int> widths;
  int at = 0;
  for (const auto& [lo, hi] : ranges) {
    const int w = hi - lo + 1;
    data.middleCols(at, w) = table.values.middleCols(lo, w);
    widths.push_back(w);
    at += w;
  }
  return BlockSample(std::move(data), std::move(widths));
}

}  // namespace multivariance
