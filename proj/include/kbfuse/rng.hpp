#pragma once

#include <cstdint>
#include <vector>

namespace kbfuse {

/// Deterministic, implementation-pinned generator (splitmix64 core) so that
/// generated artifacts are byte-identical across platforms and standard
/// library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n). n == 0 returns 0.
    std::uint64_t uniform(std::uint64_t n) {
        if (n == 0) return 0;
        return next_u64() % n;  // modulo bias is irrelevant at these ranges
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        if (hi <= lo) return lo;
        return lo + static_cast<int>(uniform(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Uniform double in [0, 1).
    double real() { return (next_u64() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = uniform(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace kbfuse
