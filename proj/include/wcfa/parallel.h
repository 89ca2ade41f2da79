// wcfa/parallel.h

// Copyright 2026  The wcfa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef WCFA_PARALLEL_H_
#define WCFA_PARALLEL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace wcfa {

using Rng = std::mt19937_64;

// Stream tags keep the random streams of unrelated consumers apart even
// when they share a master seed and an index.
enum class Stream : std::uint64_t {
  kTrial = 1,
  kBootstrap = 2,
  kBatch = 3,
  kModelNoise = 4,
  kTarget = 5,
  kSynthetic = 6,
  kValidation = 7,
  kInit = 8,
};

/// Mixes (master seed, stream, index) into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                          std::uint64_t index = 0,
                          std::uint64_t sub_index = 0);

inline Rng make_rng(std::uint64_t master, Stream stream,
                    std::uint64_t index = 0, std::uint64_t sub_index = 0) {
  return Rng(derive_seed(master, stream, index, sub_index));
}

/// Worker count used when a call passes threads <= 0. Defaults to the
/// hardware concurrency.
int default_threads();
void set_default_threads(int threads);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index is
/// processed exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The first exception thrown by any
/// worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body,
                  int threads = 0);

}  // namespace wcfa

#endif  // WCFA_PARALLEL_H_
