#include "rng.hpp"

#include <cmath>
#include <unordered_set>

#include "errors.hpp"

namespace dphc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Stream::Stream(std::uint64_t seed, std::string_view tag,
               std::initializer_list<std::uint64_t> indices) {
  std::uint64_t x = seed ^ fnv1a64(tag);
  splitmix64(x);
  for (std::uint64_t idx : indices) {
    x ^= idx + 0x9E3779B97F4A7C15ULL;
    splitmix64(x);
  }
  bool all_zero = true;
  for (auto& word : state_) {
    word = splitmix64(x);
    all_zero = all_zero && word == 0;
  }
  if (all_zero) state_[0] = 1;  // xoshiro forbids the all-zero state
}

std::uint64_t Stream::next_u64() {
  std::uint64_t* s = state_;
  std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  std::uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Stream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::uniform(double a, double b) { return a + (b - a) * uniform01(); }

double Stream::normal(double mean, double stddev) {
  double u1 = 1.0 - uniform01();  // (0, 1]; keeps log finite
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(2.0 * M_PI * u2);
}

std::uint64_t Stream::below(std::uint64_t n) {
  require(n > 0, Status::invalid_argument, "Stream::below requires n > 0");
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

std::vector<std::uint64_t> Stream::sample_without_replacement(std::uint64_t n,
                                                              std::uint64_t k) {
  require(k <= n, Status::invalid_argument,
          "sample_without_replacement: k exceeds population");
  // Floyd's algorithm keeps memory at O(k) even when n is in the millions.
  std::unordered_set<std::uint64_t> seen;
  std::vector<std::uint64_t> out;
  seen.reserve(static_cast<std::size_t>(k) * 2);
  out.reserve(static_cast<std::size_t>(k));
  for (std::uint64_t j = n - k; j < n; ++j) {
    std::uint64_t t = below(j + 1);
    if (seen.count(t)) t = j;
    seen.insert(t);
    out.push_back(t);
  }
  shuffle(out);
  return out;
}

}  // namespace dphc
