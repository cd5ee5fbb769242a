// Copyright 2026 The ephyspack Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ephyspack/crc32c.h"
#include "ephyspack/ingest.h"
#include "ephyspack/query.h"
#include "ephyspack/validate.h"

namespace ep = ephyspack;
namespace fs = std::filesystem;

namespace {

// One generated session per (duration, channels) shared by all benchmarks.
const fs::path& session(double seconds, std::uint32_t channels) {
  static std::map<std::pair<double, std::uint32_t>, fs::path> cache;
  auto& p = cache[{seconds, channels}];
  if (p.empty()) {
    p = fs::temp_directory_path() /
        ("ephyspack-bench-" + std::to_string(seconds) + "-" + std::to_string(channels) + ".eph");
    fs::remove(p);
    ep::generate_session({.seed = 1, .n_channels = channels, .duration_s = seconds}, p,
                         {.created_time = "2026-01-05T08:00:00Z"});
  }
  return p;
}

void BM_Crc32c(benchmark::State& state) {
  std::vector<std::byte> buf(static_cast<std::size_t>(state.range(0)), std::byte{0x5a});
  for (auto _ : state) benchmark::DoNotOptimize(ep::crc32c(buf));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Crc32c)->Range(1 << 10, 1 << 22);

void BM_Generate(benchmark::State& state) {
  const fs::path p = fs::temp_directory_path() / "ephyspack-bench-gen.eph";
  for (auto _ : state) {
    fs::remove(p);
    ep::generate_session({.seed = 2, .duration_s = static_cast<double>(state.range(0))}, p);
  }
  fs::remove(p);
}
BENCHMARK(BM_Generate)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Open(benchmark::State& state) {
  const auto& p = session(2, 4);
  for (auto _ : state) benchmark::DoNotOptimize(ep::Container::open(p));
}
BENCHMARK(BM_Open)->Unit(benchmark::kMicrosecond);

void BM_Validate(benchmark::State& state) {
  const auto& p = session(4, 8);
  const ep::ValidateOptions opt{.level = state.range(0) ? ep::ValidationLevel::kFull : ep::ValidationLevel::kFast,
                                .threads = static_cast<unsigned>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(ep::validate_file(p, opt));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(fs::file_size(p)));
}
BENCHMARK(BM_Validate)
    ->ArgNames({"full", "threads"})
    ->Args({0, 1})
    ->Args({1, 1})
    ->Args({1, 4})
    ->Unit(benchmark::kMillisecond);

void BM_ReadRegion(benchmark::State& state) {
  ep::Container c = ep::Container::open(session(4, 8));
  const std::uint64_t rows = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ep::read_region(c, "/data/raw", {100, 2}, {rows, 4}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows * 4));
}
BENCHMARK(BM_ReadRegion)->Range(16, 2048);

void BM_TimeAtIndex(benchmark::State& state) {
  ep::RegularSampling s{30000, {{1000, 0.0334}, {50000, 1.6668}, {90000, 3.0001}}};
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ep::time_at_index(s, 0.0, i));
    i = (i + 7919) % 120000;
  }
}
BENCHMARK(BM_TimeAtIndex);

void BM_Inventory(benchmark::State& state) {
  ep::Container c = ep::Container::open(session(2, 4));
  for (auto _ : state) benchmark::DoNotOptimize(ep::inventory(c));
}
BENCHMARK(BM_Inventory)->Unit(benchmark::kMicrosecond);

void BM_EntitiesBySource(benchmark::State& state) {
  ep::Container c = ep::Container::open(session(2, 4));
  for (auto _ : state) benchmark::DoNotOptimize(ep::entities_by_source(c, "tt1", true));
}
BENCHMARK(BM_EntitiesBySource)->Unit(benchmark::kMicrosecond);

void BM_SearchProvenance(benchmark::State& state) {
  ep::Container c = ep::Container::open(session(2, 4));
  for (auto _ : state) benchmark::DoNotOptimize(ep::search_provenance(c, "spike"));
}
BENCHMARK(BM_SearchProvenance)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
