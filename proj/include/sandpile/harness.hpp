#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sandpile/configuration.hpp"
#include "sandpile/errors.hpp"
#include "sandpile/fastfix.hpp"
#include "sandpile/model.hpp"

namespace sandpile {

inline Configuration make_single_pile(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("make_single_pile: negative grain count");
  if (n == 0) return Configuration{};
  return Configuration{std::vector<Height>{n}};
}

/// Worst case for the merge step: a 7 every fourth column and the remainder
/// n mod 7 after the last full block; trailing zeros stripped. Every (7,0,0)
/// window must merge with the (0) window behind it, one merge per block.
inline Configuration make_comb(std::int64_t n) {
  if (n < 0) throw std::invalid_argument("make_comb: negative grain count");
  const std::int64_t blocks = n / 7;
  std::vector<Height> h(static_cast<std::size_t>(4 * blocks + 1), 0);
  for (std::int64_t j = 0; j < blocks; ++j) h[static_cast<std::size_t>(4 * j)] = 7;
  h[static_cast<std::size_t>(4 * blocks)] = n % 7;
  return Configuration(std::move(h)).canonical();
}

/// SplitMix64; fixed algorithm so generated corpora are reproducible across
/// implementations and platforms.
struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

/// Deterministic pseudo-random heights in [0, max_height]:
/// h_i = splitmix64(seed stream) mod (max_height + 1). Not canonicalized.
inline Configuration make_random(std::int64_t length, Height max_height, std::uint64_t seed) {
  if (length < 0) throw std::invalid_argument("make_random: negative length");
  if (max_height < 0) throw std::invalid_argument("make_random: negative max height");
  SplitMix64 rng{seed};
  std::vector<Height> h;
  h.reserve(static_cast<std::size_t>(length));
  for (std::int64_t i = 0; i < length; ++i) {
    h.push_back(static_cast<Height>(rng.next() % static_cast<std::uint64_t>(max_height + 1)));
  }
  return Configuration(std::move(h));
}

enum class Algorithm { naive_seq, fast_general, fast_merge };

inline std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::naive_seq: return "naive-seq";
    case Algorithm::fast_general: return "fast-general";
    case Algorithm::fast_merge: return "fast-merge";
  }
  return "unknown";
}

/// One benchmarked run. Wall time is the minimum over the repetitions;
/// `steps` is the count of rule applications when the algorithm knows it
/// (naive step count, merge-variant transient), empty otherwise.
struct BenchRecord {
  std::string generator;
  std::int64_t length = 0;
  std::int64_t grains = 0;
  Algorithm algorithm = Algorithm::naive_seq;
  std::int64_t wall_ns = 0;
  std::optional<std::int64_t> steps;
  std::int64_t iterations = 0;
  std::int64_t merges = 0;
  std::uint64_t checksum = 0;
};

struct BenchInput {
  std::string generator;
  Configuration config;
};

/// Runs every algorithm on every input, checks that all algorithms agree on
/// the fixed point (a disagreement is a hard failure), and records timings.
inline std::vector<BenchRecord> bench_compare(std::span<const BenchInput> inputs,
                                              std::span<const Algorithm> algorithms,
                                              int repetitions,
                                              std::int64_t step_limit = kDefaultStepLimit) {
  if (repetitions < 1) throw std::invalid_argument("bench_compare: repetitions must be >= 1");
  using clock = std::chrono::steady_clock;
  std::vector<BenchRecord> records;
  for (const BenchInput& input : inputs) {
    std::optional<Configuration> reference;
    for (Algorithm algo : algorithms) {
      BenchRecord rec;
      rec.generator = input.generator;
      rec.length = input.config.length();
      rec.grains = input.config.grains();
      rec.algorithm = algo;
      rec.wall_ns = std::numeric_limits<std::int64_t>::max();
      Configuration fix;
      for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        switch (algo) {
          case Algorithm::naive_seq: {
            RunResult r = run_to_fixpoint(input.config, Model::spm(),
                                          ExecutionMode::sequential, step_limit);
            fix = r.fixpoint.canonical();
            rec.steps = r.steps;
            rec.iterations = r.steps;
            rec.merges = 0;
            break;
          }
          case Algorithm::fast_general: {
            FixpointReport r = fast_fixpoint_general(input.config);
            fix = std::move(r.fixpoint);
            rec.steps = r.transient;
            rec.iterations = r.iterations;
            rec.merges = r.merges;
            break;
          }
          case Algorithm::fast_merge: {
            FixpointReport r = fast_fixpoint_merge(input.config);
            fix = std::move(r.fixpoint);
            rec.steps = r.transient;
            rec.iterations = r.iterations;
            rec.merges = r.merges;
            break;
          }
        }
        const auto dt = std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - t0);
        rec.wall_ns = std::min<std::int64_t>(rec.wall_ns, dt.count());
      }
      if (reference && !canonically_equal(*reference, fix)) {
        throw InternalError("bench_compare: fixed-point mismatch between algorithms");
      }
      if (!reference) reference = fix;
      rec.checksum = canonical_hash(fix);
      records.push_back(std::move(rec));
    }
  }
  return records;
}

inline void write_csv(std::span<const BenchRecord> records, std::ostream& os) {
  os << "generator,l,n,algorithm,wall_ns,steps,iterations,merges,checksum\n";
  for (const BenchRecord& r : records) {
    os << r.generator << ',' << r.length << ',' << r.grains << ',' << algorithm_name(r.algorithm)
       << ',' << r.wall_ns << ',';
    if (r.steps) os << *r.steps;
    os << ',' << r.iterations << ',' << r.merges << ',' << r.checksum << '\n';
  }
}

}  // namespace sandpile
