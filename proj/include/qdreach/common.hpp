#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace qdreach {

// Thrown when a caller violates a documented precondition (dimension
// mismatches, empty inputs, out-of-range parameters).
struct contract_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown by file readers; carries the 1-based line number of the offence.
struct parse_error : std::runtime_error {
  parse_error(const std::string& what, std::size_t line_number)
      : std::runtime_error(what + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  std::size_t line;
};

inline void require(bool condition, const char* message) {
  if (!condition) throw contract_error(message);
}

// Single generator per run; the algorithm name is recorded in run metadata so
// artifacts stay reproducible across toolchains.
using Rng = std::mt19937_64;
inline constexpr const char* kRngAlgorithm = "mt19937_64";

// Uniform double in [0, 1) built from the top 53 bits of the generator
// output. std::uniform_real_distribution is not pinned across standard
// libraries, and byte-identical artifacts for a given seed are part of the
// contract here.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

// FNV-1a: used to derive deterministic per-genotype seeds for robustness
// replicas without touching the run-level generator.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t hash = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ull;
  }
  return hash;
}

}  // namespace qdreach
