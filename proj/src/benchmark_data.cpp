#include "wdro/benchmark_data.hpp"

#include <array>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wdro/util.hpp"

namespace wdro {

namespace {

using Board = std::array<char, 9>;

constexpr int kLines[8][3] = {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}, {0, 3, 6}, {1, 4, 7}, {2, 5, 8}, {0, 4, 8}, {2, 4, 6}};

bool has_line(const Board& b, char who) {
  for (const auto& l : kLines) {
    if (b[l[0]] == who && b[l[1]] == who && b[l[2]] == who) return true;
  }
  return false;
}

void play(Board& b, char turn, int filled, std::set<Board>& terminal) {
  if (has_line(b, 'x') || has_line(b, 'o') || filled == 9) {
    terminal.insert(b);
    return;
  }
  for (int s = 0; s < 9; ++s) {
    if (b[s] != 'b') continue;
    b[s] = turn;
    play(b, turn == 'x' ? 'o' : 'x', filled + 1, terminal);
    b[s] = 'b';
  }
}

}  // namespace

BenchmarkTable tic_tac_toe_table() {
  std::set<Board> terminal;
  Board b;
  b.fill('b');
  play(b, 'x', 0, terminal);

  static const char* const names[9] = {"top-left",    "top-middle",    "top-right",
                                       "middle-left", "middle-middle", "middle-right",
                                       "bottom-left", "bottom-middle", "bottom-right"};
  std::ostringstream csv;
  std::vector<std::string> row(names, names + 9);
  row.push_back("Class");
  write_csv_row(csv, row);
  for (const auto& t : terminal) {
    for (int s = 0; s < 9; ++s) row[static_cast<std::size_t>(s)] = std::string(1, t[s]);
    row[9] = has_line(t, 'x') ? "positive" : "negative";
    write_csv_row(csv, row);
  }

  BenchmarkTable out;
  out.name = "tic-tac-toe";
  out.csv = csv.str();
  out.schema.label = "Class";
  out.schema.positive = "positive";
  return out;
}

BenchmarkTable balance_scale_table() {
  std::ostringstream csv;
  write_csv_row(csv, {"Class-Name", "Left-Weight", "Left-Distance", "Right-Weight", "Right-Distance"});
  for (int lw = 1; lw <= 5; ++lw) {
    for (int ld = 1; ld <= 5; ++ld) {
      for (int rw = 1; rw <= 5; ++rw) {
        for (int rd = 1; rd <= 5; ++rd) {
          const int left = lw * ld;
          const int right = rw * rd;
          const char* cls = left > right ? "L" : (left < right ? "R" : "B");
          write_csv_row(csv, {cls, std::to_string(lw), std::to_string(ld), std::to_string(rw), std::to_string(rd)});
        }
      }
    }
  }
  BenchmarkTable out;
  out.name = "balance-scale";
  out.csv = csv.str();
  out.schema.label = "Class-Name";
  out.schema.positive = "majority";
  return out;
}

std::vector<std::string> benchmark_table_names() { return {"tic-tac-toe", "balance-scale"}; }

BenchmarkTable benchmark_table(const std::string& name) {
  if (name == "tic-tac-toe") return tic_tac_toe_table();
  if (name == "balance-scale") return balance_scale_table();
  throw std::invalid_argument("unknown benchmark table: " + name);
}

std::string write_benchmark_table(const BenchmarkTable& table, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = (std::filesystem::path(dir) / table.name).string();
  write_file_atomic(stem + ".csv", table.csv);
  write_file_atomic(stem + ".schema.json", table.schema.to_json_text());
  return stem + ".csv";
}

}  // namespace wdro
