#pragma once

// Counter-based pseudo-random functions. Every random quantity in the system
// is a pure function of a key and a position, so results never depend on
// evaluation order or thread scheduling.

#include <cstdint>

namespace dppl {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t prf(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix64(mix64(mix64(a) ^ b) ^ c);
}

constexpr std::uint64_t prf(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
  return mix64(prf(a, b, c) ^ d);
}

// Maps 64 random bits to the open interval (0, 1).
constexpr double to_unit(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace dppl
