#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gexp {

/// Counter-based normal stream: draw i of stream (seed, id) depends only on
/// (seed, id, i), so parallel schedules cannot reorder results.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t id)
        : base_(mix(mix(seed) ^ mix(id + 0x632be59bd9b4e019ull))) {}

    std::uint64_t next_u64() { return mix(base_ + (++counter_) * kGolden); }

    /// Uniform on (0, 1), symmetric around ½.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box–Muller; draws come in deterministic pairs.
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
    std::uint64_t base_;
    std::uint64_t counter_{0};
    double spare_{0.0};
    bool have_spare_{false};
};

}  // namespace gexp
