#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sandpile {

using Height = std::int64_t;

/// A sandpile configuration: column heights from left to right.
///
/// Heights are never negative and every rule application preserves the total
/// grain count. Trailing zero columns are meaningful for windowed operations,
/// so they are kept as given; canonical() strips them for identity purposes
/// (equality of results, orbit-graph vertices).
class Configuration {
 public:
  Configuration() = default;

  explicit Configuration(std::vector<Height> heights) : heights_(std::move(heights)) {
    for (Height h : heights_) {
      if (h < 0) throw std::invalid_argument("Configuration: negative column height");
    }
  }

  Configuration(std::initializer_list<Height> heights)
      : Configuration(std::vector<Height>(heights)) {}

  std::int64_t length() const { return static_cast<std::int64_t>(heights_.size()); }
  bool empty() const { return heights_.empty(); }

  /// Total number of grains.
  std::int64_t grains() const {
    return std::accumulate(heights_.begin(), heights_.end(), std::int64_t{0});
  }

  Height operator[](std::int64_t i) const { return heights_[static_cast<std::size_t>(i)]; }

  /// Height of column i, with columns past either end reading as zero.
  Height at(std::int64_t i) const {
    return (i >= 0 && i < length()) ? heights_[static_cast<std::size_t>(i)] : 0;
  }

  const std::vector<Height>& heights() const { return heights_; }

  /// Copy without trailing zero columns.
  Configuration canonical() const {
    auto h = heights_;
    while (!h.empty() && h.back() == 0) h.pop_back();
    Configuration c;
    c.heights_ = std::move(h);
    return c;
  }

  bool is_canonical() const { return heights_.empty() || heights_.back() != 0; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<Height> heights_;
};

inline bool canonically_equal(const Configuration& a, const Configuration& b) {
  return a.canonical() == b.canonical();
}

/// "3,2,2,1"; the empty configuration renders as the empty string.
inline std::string to_string(const Configuration& c) {
  std::string s;
  for (std::int64_t i = 0; i < c.length(); ++i) {
    if (i > 0) s += ',';
    s += std::to_string(c[i]);
  }
  return s;
}

/// Potential of a configuration: sum over columns of h(h+1)/2. Strictly
/// decreases under every rule application, hence the dynamics never cycle.
inline std::int64_t potential(const Configuration& c) {
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < c.length(); ++i) total += c[i] * (c[i] + 1) / 2;
  return total;
}

/// Sum of column_index * height (0-based). Each sequential SPM move carries
/// one grain one column to the right, so transients equal weight differences.
inline std::int64_t movement_weight(const Configuration& c) {
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < c.length(); ++i) total += i * c[i];
  return total;
}

/// Differences between adjacent columns: d_i = h_i - h_{i+1}.
inline std::vector<Height> height_differences(const Configuration& c) {
  std::vector<Height> d;
  if (c.length() < 2) return d;
  d.reserve(static_cast<std::size_t>(c.length() - 1));
  for (std::int64_t i = 0; i + 1 < c.length(); ++i) d.push_back(c[i] - c[i + 1]);
  return d;
}

/// FNV-1a over the canonical heights. Used for hashing orbit vertices and as
/// the fixed-point checksum in benchmark records.
inline std::uint64_t canonical_hash(const Configuration& c) {
  const Configuration canon = c.canonical();
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xff;
      h *= 0x100000001b3ull;
    }
  };
  mix(static_cast<std::uint64_t>(canon.length()));
  for (std::int64_t i = 0; i < canon.length(); ++i) mix(static_cast<std::uint64_t>(canon[i]));
  return h;
}

}  // namespace sandpile
