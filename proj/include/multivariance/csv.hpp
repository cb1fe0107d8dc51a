#pragma once

#include <Eigen/Core>
#include <string>
#include <utility>
#include <vector>

#include "multivariance/block_sample.hpp"

namespace multivariance {

struct CsvTable {
  std::vector<std::string> header;  // empty when the file has no header row
  Eigen::MatrixXd values;
  bool had_header = false;
};

// Rectangular numeric CSV. A non-numeric first row is treated as a header.
// Ragged rows, non-numeric cells and non-finite values raise InputError
// naming the file line (and column where applicable).
CsvTable read_numeric_csv(const std::string& path);

// Parses "0-2;3;4-5" into 0-based inclusive column ranges; validates bounds
// against total_columns and rejects overlaps.
std::vector<std::pair<int, int>> parse_block_spec(const std::string& spec,
                                                  int total_columns);

// CSV + block spec -> BlockSample (selected columns concatenated in the
// order the ranges are given).
BlockSample ingest_csv(const std::string& path, const std::string& block_spec);

}  // namespace multivariance
