#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "wdro/benchmark_data.hpp"

using namespace wdro;
namespace fs = std::filesystem;

namespace {

int positives(const Dataset& d) {
  int c = 0;
  for (int i = 0; i < d.N(); ++i) c += d.y(i) == 1;
  return c;
}

Dataset ingest(const BenchmarkTable& t) {
  std::istringstream in(t.csv);
  return ingest_csv(in, t.schema);
}

}  // namespace

TEST_CASE("tic-tac-toe endgame table") {
  const BenchmarkTable t = benchmark_table("tic-tac-toe");
  const Dataset d = ingest(t);
  CHECK(d.N() == 958);
  CHECK(d.n() == 0);
  CHECK(d.m() == 9);
  CHECK(d.k() == 18);
  CHECK(positives(d) == 626);
}

TEST_CASE("balance-scale table") {
  const BenchmarkTable t = benchmark_table("balance-scale");
  const Dataset d = ingest(t);
  CHECK(d.N() == 625);
  CHECK(d.m() == 4);
  CHECK(d.k() == 16);
  // majority class L is positive
  CHECK(positives(d) == 288);
}

TEST_CASE("table names, unknown names and files on disk") {
  CHECK(benchmark_table_names().size() == 2);
  CHECK_THROWS_AS(benchmark_table("iris"), std::invalid_argument);
  const fs::path dir = fs::temp_directory_path() / "wdro_bench_tables";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const BenchmarkTable t = balance_scale_table();
  const std::string path = write_benchmark_table(t, dir.string());
  CHECK(fs::exists(path));
  const Dataset a = ingest_csv(path, DatasetSchema::load((dir / (t.name + ".schema.json")).string()));
  const Dataset b = ingest(t);
  CHECK(a.Z == b.Z);
  CHECK(a.y == b.y);
  fs::remove_all(dir);
}
