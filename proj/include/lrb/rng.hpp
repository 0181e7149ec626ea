#pragma once

#include <cstdint>

namespace lrb {

// Counter-based generator (Philox 2x64, 10 rounds). A draw is a pure function
// of (key, stream, counter), so any (trial, purpose) pair can be handed its
// own stream and replayed independently of execution order or thread count.
class CounterRng {
public:
    CounterRng(std::uint64_t key, std::uint64_t stream)
        : key_(key), stream_(stream) {}

    std::uint64_t next_u64() {
        if (avail_ == 0) refill();
        return buf_[--avail_];
    }

    // Uniform double in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double next_range(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Uniform integer in {0, ..., n-1}, unbiased via rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n; // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

private:
    static constexpr std::uint64_t kMul = 0xD2B74407B1CE6E93ULL;
    static constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ULL;

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int avail_ = 0;

    void refill() {
        std::uint64_t c0 = ctr_++;
        std::uint64_t c1 = stream_;
        std::uint64_t k = key_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod =
                static_cast<unsigned __int128>(kMul) * c0;
            const std::uint64_t hi = static_cast<std::uint64_t>(prod >> 64);
            const std::uint64_t lo = static_cast<std::uint64_t>(prod);
            c0 = hi ^ k ^ c1;
            c1 = lo;
            k += kWeyl;
        }
        buf_[0] = c0;
        buf_[1] = c1;
        avail_ = 2;
    }
};

} // namespace lrb
