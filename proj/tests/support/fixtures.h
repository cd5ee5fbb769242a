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

// Helpers shared by the unit tests and the acceptance binary. Test-side
// randomness uses std::mt19937_64 so it never shares state or algorithm with
// the library generator.

#ifndef EPHYSPACK_TESTS_SUPPORT_FIXTURES_H_
#define EPHYSPACK_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ephyspack/container.h"
#include "ephyspack/model.h"

namespace ephyspack::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path file(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string read_bytes(const fs::path& path);
void write_bytes(const fs::path& path, const std::string& bytes);

inline constexpr const char* kSessionStart = "2026-01-05T09:30:00+01:00";
inline constexpr const char* kFixedCreated = "2026-01-05T08:00:00Z";

// Fixed uuid and created_time.
CreateOptions fixed_create_options(std::uint64_t salt = 0);

// Fresh file with global metadata and the standard source forest:
//   subj (Subject) > region (BrainRegion) > n0..n3 (Neuron), mua (MUA)
//   amp (Amplifier) > tt (ElectrodeArray) > e0..e3 (Electrode)
//   roi (ROI, parent region)
Container make_session(const fs::path& path, std::uint64_t salt = 0);

inline const std::vector<std::string> kElectrodes = {"e0", "e1", "e2", "e3"};
inline const std::vector<std::string> kUnitSources = {"n0", "n1", "n2", "n3", "mua"};

// Random valid entities; names come from the caller and must be unique. The
// sources referenced are those of make_session.
class EntityFactory {
 public:
  explicit EntityFactory(std::uint64_t seed) : gen_(seed) {}

  TimeSeries time_series(const std::string& name);
  SignalEvents signal_events(const std::string& name);
  ImageStack image_stack(const std::string& name);
  ExperimentalEvents experimental_events(const std::string& name);
  GenericArray generic_array(const std::string& name);
  // Parent, when present, is drawn from `existing`.
  SignalSource source(const std::string& id, const std::vector<std::string>& existing);

  // Finite value with a wide spread of bit patterns (signed zero,
  // subnormals, large magnitudes).
  double any_finite();
  double uniform(double lo, double hi);
  std::uint64_t below(std::uint64_t n);
  std::string text(std::size_t min_len = 1, std::size_t max_len = 12);
  AttrValue attr();
  std::vector<double> sorted_times(std::size_t n, double lo, double hi, bool strict);
  std::mt19937_64& engine() { return gen_; }

 private:
  Tensor numeric_tensor(Extent shape);
  std::mt19937_64 gen_;
};

// Generated sessions for the mutation corpus: exclusive without an image
// stack, then exclusive, multi and probabilistic with one.
std::vector<fs::path> mutation_bases(const TempDir& dir);
// Applies the mutation to the first base that has its target and returns
// that base. Throws MutationNotApplicable when none does.
fs::path apply_mutation(const std::vector<fs::path>& bases, const std::string& id, const fs::path& out);

// Bitwise equality of the element storage of two arrays.
bool bit_equal(const ArrayData& a, const ArrayData& b);
bool bit_equal(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace ephyspack::testing

#endif  // EPHYSPACK_TESTS_SUPPORT_FIXTURES_H_
