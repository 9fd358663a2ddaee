#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace qrob {

// Deterministic random source. Every consumer derives its own named substream
// from one root seed, so adding a new consumer never perturbs the draws seen
// by existing ones. Uniform/normal/shuffle are implemented here instead of
// relying on std distributions, whose output is not pinned by the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Substream for a named consumer ("data-split", "init", "batch", ...).
    // An optional index separates per-epoch or per-item streams.
    static Rng substream(std::uint64_t root_seed, std::string_view name,
                         std::uint64_t index = 0);

    std::uint64_t next_u64();

    // Uniform double in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi);

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_int(std::uint64_t n);

    // Standard normal via Box-Muller.
    double normal();

    // Fisher-Yates; unbiased given uniform_int.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

// 64-bit FNV-1a, also used for content digests in run manifests.
std::uint64_t fnv1a64(const void* data, std::size_t len);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace qrob
