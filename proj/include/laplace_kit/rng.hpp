#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace laplace_kit {

// Counter-based generator: each 64-bit output is a hash of (stream key,
// counter), so streams can be split by (seed, tag, chunk) and any draw is
// reproducible regardless of thread scheduling.
class CounterRng {
 public:
  static constexpr std::uint64_t kChunk = 1024;  // draws per derived stream

  static std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : tag) {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static CounterRng stream(std::uint64_t seed, std::string_view tag, std::uint64_t chunk) {
    CounterRng r;
    r.key_ = mix64(mix64(seed) ^ mix64(hash_tag(tag) + 0x632be59bd9b4e019ULL * chunk));
    return r;
  }

  std::uint64_t next_u64() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

  // uniform in (0, 1); never returns 0 or 1
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace laplace_kit
