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

#ifndef EPHYSPACK_RNG_H_
#define EPHYSPACK_RNG_H_

#include <cstdint>

namespace ephyspack {

// xorshift64* (Vigna 2014, shifts 12/25/27, multiplier 0x2545F4914F6CDD1D)
// seeded through one splitmix64 step. Every derived draw is defined here in
// terms of next(), so sequences match across platforms and languages.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  // 53-bit uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Integer in [0, n); n == 0 yields 0.
  std::uint64_t below(std::uint64_t n);
  // Box-Muller; consumes two draws per call.
  double normal();
  // Exponential interval with the given rate.
  double exponential(double rate);

 private:
  std::uint64_t state_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace ephyspack

#endif  // EPHYSPACK_RNG_H_
