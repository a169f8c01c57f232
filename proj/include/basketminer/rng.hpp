#pragma once

// Counter-based random streams. The n-th draw of a stream is a pure
// function of (key, n), so parallel jobs that derive their keys from
// (root seed, job index) reproduce exactly regardless of scheduling.

#include <cstdint>

#include <Eigen/Core>

namespace bm {

/// SplitMix64 finaliser.
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Key for substream `index` under `root`. Distinct `tag`s give unrelated
/// families of substreams from the same root.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index, std::uint64_t tag = 0) noexcept {
    return mix64(mix64(root ^ (tag * 0xD1B54A32D192ED03ULL)) + mix64(index + 0x9E3779B97F4A7C15ULL));
}

class CounterRng {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

    [[nodiscard]] std::uint64_t at(std::uint64_t counter) const noexcept { return mix64(key_ + (counter + 1) * kGamma); }
    std::uint64_t next_u64() noexcept { return at(counter_++); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; draws come in pairs.
    double normal() noexcept;

    void fill_normal(Eigen::Ref<Eigen::VectorXd> out) noexcept;
    [[nodiscard]] Eigen::VectorXd normal_vector(Eigen::Index n) {
        Eigen::VectorXd v(n);
        fill_normal(v);
        return v;
    }

    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace bm
