#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>

namespace sandpile {

// Floor division for b > 0. Plain integer division truncates toward zero,
// which is one too high for negative numerators.
constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if (a % b != 0 && (a < 0) != (b < 0)) --q;
  return q;
}

constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return -floor_div(-a, b);
}

/// Largest s with s*s <= x, computed in pure integer arithmetic.
constexpr std::int64_t isqrt(std::int64_t x) {
  if (x < 0) throw std::invalid_argument("isqrt: negative argument");
  const auto ux = static_cast<std::uint64_t>(x);
  if (ux < 2) return x;
  // Newton iteration from an initial guess >= sqrt(x); converges downward.
  std::uint64_t s = std::uint64_t{1} << ((std::bit_width(ux) + 1) / 2);
  std::uint64_t t = (s + ux / s) / 2;
  while (t < s) {
    s = t;
    t = (s + ux / s) / 2;
  }
  return static_cast<std::int64_t>(s);
}

constexpr std::int64_t triangular(std::int64_t p) { return p * (p + 1) / 2; }

}  // namespace sandpile
