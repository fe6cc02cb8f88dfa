#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace dphc {

// Deterministic splittable random stream: xoshiro256++ seeded through a
// splitmix64 chain over (seed, tag, indices).  Every consumer derives its own
// stream from the dataset/train seed plus a role tag, so generation order is
// independent of thread scheduling.
class Stream {
 public:
  Stream(std::uint64_t seed, std::string_view tag,
         std::initializer_list<std::uint64_t> indices = {});

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [a, b).
  double uniform(double a, double b);
  // Gaussian via Box-Muller; consumes two uniforms per call.
  double normal(double mean, double stddev);
  // Unbiased integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  // k distinct values from [0, n), uniformly, in randomized order.
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n,
                                                        std::uint64_t k);
  // In-place Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_[4];
};

}  // namespace dphc
