#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ydsim {

// Source of uniform variates in [0,1). Virtual so that tests can inject
// scripted draws through the same code path the production generator uses.
struct UnitSource {
  virtual double next_unit() = 0;
  virtual ~UnitSource() = default;

  // Uniform in (0,1], safe as an argument of log().
  double next_unit_pos() { return 1.0 - next_unit(); }
};

// splitmix64 (Steele, Lea, Flood), used only for seeding.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

// xoshiro256** 1.0 (Blackman, Vigna), state expanded from the seed with
// splitmix64. Pure 64-bit integer arithmetic, so streams are identical on
// every platform.
class Xoshiro256ss final : public UnitSource {
 public:
  static constexpr const char* kAlgorithmId = "xoshiro256ss-1.0/splitmix64";

  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  // Replica stream i of a master seed. Documented splitting rule:
  // stream i uses seed = master xor i.
  static Xoshiro256ss stream(std::uint64_t master, std::uint64_t i) {
    return Xoshiro256ss(master ^ i);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // 53-bit mantissa mapping, uniform on [0,1).
  double next_unit() override {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Replays a fixed list of unit draws; for tests exercising selection
// contracts with known outcomes.
class ScriptedUnitSource final : public UnitSource {
 public:
  explicit ScriptedUnitSource(std::vector<double> draws)
      : draws_(std::move(draws)) {}

  double next_unit() override {
    if (next_ >= draws_.size())
      throw std::runtime_error("scripted rng exhausted");
    return draws_[next_++];
  }

 private:
  std::vector<double> draws_;
  std::size_t next_ = 0;
};

inline double exponential_variate(UnitSource& rng, double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential rate must be > 0");
  return -std::log(rng.next_unit_pos()) / rate;
}

}  // namespace ydsim
