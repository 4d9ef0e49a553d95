#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace wdro {

/// Rounds to `digits` significant decimal digits (used for JSON output).
double round_significant(double value, int digits = 6);

/// Fixed-point text with `decimals` places, e.g. error rates as "0.0157".
std::string format_fixed(double value, int decimals = 4);

/// Writes to a temporary sibling file and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// Seed of task `index` under a master seed (splitmix64 mix); independent of scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Logical core count (at least 1).
int default_workers();

/// Calls body(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out in fixed contiguous chunks; the first exception is rethrown.
void parallel_for(int count, int workers, const std::function<void(int)>& body);

}  // namespace wdro
