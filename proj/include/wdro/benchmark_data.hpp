#pragma once

#include <string>
#include <vector>

#include "wdro/data.hpp"

namespace wdro {

/// A categorical benchmark table rebuilt from its generating rule, in the
/// layout of the public repository files (header added).
struct BenchmarkTable {
  std::string name;
  std::string csv;
  DatasetSchema schema;
};

/// Every terminal board of a tic-tac-toe game where x moves first; the class
/// is "positive" iff x completed a line. 958 rows, nine 3-valued squares.
BenchmarkTable tic_tac_toe_table();

/// All 5^4 (left weight, left distance, right weight, right distance) tuples;
/// class L, B or R by comparing the torques. 625 rows.
BenchmarkTable balance_scale_table();

std::vector<std::string> benchmark_table_names();
/// Throws std::invalid_argument on an unknown name.
BenchmarkTable benchmark_table(const std::string& name);

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.schema.json`; returns the CSV path.
std::string write_benchmark_table(const BenchmarkTable& table, const std::string& dir);

}  // namespace wdro
