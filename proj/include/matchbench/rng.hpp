#pragma once

#include <cstdint>

namespace matchbench {

/// Counter-based random stream.
///
/// Every draw is a pure function of (key, counter), so a column of n draws
/// can be produced in any order, or split across threads, and still be
/// bitwise identical. Child streams are derived with split().
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc908ULL)) {}

  CounterStream split(std::uint64_t child) const {
    CounterStream s(0);
    s.key_ = mix(key_ ^ mix(child + 0x9e3779b97f4a7c15ULL));
    return s;
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return mix(mix(key_ + counter * 0x9e3779b97f4a7c15ULL) ^ key_);
  }

  // Uniform on the open interval (0, 1), 53 bits of resolution.
  double uniform(std::uint64_t counter) const {
    return (static_cast<double>(bits(counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t key() const { return key_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
};

}  // namespace matchbench
