#pragma once

// Counter-based random streams (Philox-4x32-10, Salmon et al., SC 2011).
// A stream is a pure function of (master_seed, stream_id, purpose) and the
// draw counter, so per-path results are identical for any worker layout.

#include <cstdint>
#include <cmath>

namespace stablelike {

// Stream purposes keep independent sub-streams (jump candidates, Gaussian
// grid increments, start offsets, ...) from sharing draws.
enum : std::uint32_t {
  kPurposeJumps = 1,
  kPurposeGauss = 2,
  kPurposeOffsets = 3,
  kPurposeGeneric = 4,
};

class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id,
            std::uint32_t purpose = kPurposeGeneric) {
    const std::uint64_t key = master_seed ^ (0x9E3779B97F4A7C15ull * purpose);
    key0_ = static_cast<std::uint32_t>(key);
    key1_ = static_cast<std::uint32_t>(key >> 32);
    c2_ = static_cast<std::uint32_t>(stream_id);
    c3_ = static_cast<std::uint32_t>(stream_id >> 32);
  }

  std::uint64_t next_u64() {
    if (have_ < 2) refill();
    have_ -= 2;
    const std::uint64_t lo = buf_[have_];
    const std::uint64_t hi = buf_[have_ + 1];
    return (hi << 32) | lo;
  }

  // Strict (0,1), 53-bit resolution; never returns an endpoint.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Exponential(1).
  double exponential() { return -std::log(uniform()); }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double normal() {
    if (has_cached_normal_) {
      has_cached_normal_ = false;
      return cached_normal_;
    }
    const double r = std::sqrt(2.0 * exponential());
    const double theta = 2.0 * M_PI * uniform();
    cached_normal_ = r * std::sin(theta);
    has_cached_normal_ = true;
    return r * std::cos(theta);
  }

  // Uniform in {0, ..., n-1}.
  std::uint64_t uniform_index(std::uint64_t n) {
    // 64-bit multiply-shift; bias is < 2^-64 per draw, irrelevant here.
    const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

 private:
  static void round(std::uint32_t& c0, std::uint32_t& c1, std::uint32_t& c2,
                    std::uint32_t& c3, std::uint32_t k0, std::uint32_t k1) {
    const std::uint64_t p0 = 0xD2511F53ull * c0;
    const std::uint64_t p1 = 0xCD9E8D57ull * c2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    c0 = hi1 ^ c1 ^ k0;
    c1 = lo1;
    c2 = hi0 ^ c3 ^ k1;
    c3 = lo0;
  }

  void refill() {
    std::uint32_t x0 = c0_, x1 = c1_, x2 = c2_, x3 = c3_;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int r = 0; r < 10; ++r) {
      round(x0, x1, x2, x3, k0, k1);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    buf_[0] = x0;
    buf_[1] = x1;
    buf_[2] = x2;
    buf_[3] = x3;
    have_ = 4;
    if (++c0_ == 0) ++c1_;  // 64-bit block counter in (c0, c1)
  }

  std::uint32_t key0_ = 0, key1_ = 0;
  std::uint32_t c0_ = 0, c1_ = 0, c2_ = 0, c3_ = 0;
  std::uint32_t buf_[4] = {0, 0, 0, 0};
  int have_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace stablelike
