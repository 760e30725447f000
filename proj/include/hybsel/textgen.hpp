#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace hybsel {

//! Synthetic input families for the benchmarks. All generators draw raw
//! mt19937_64 outputs, so a (kind, size, seed, ...) tuple names one exact
//! byte string on every platform. The alphabet starts at 'a', keeping the
//! sentinel byte 0x00 out of generated texts.
enum class text_kind : uint8_t { random, repetitive };

namespace detail {

inline void check_text_args(uint64_t size, uint32_t sigma) {
    if (size < 1) throw std::invalid_argument("gen_synthetic_text: size must be positive");
    if (sigma < 1 || sigma > 64) throw std::invalid_argument("gen_synthetic_text: sigma must be in [1, 64]");
}

}  // namespace detail

//! I.i.d. bytes over {'a', ..., 'a' + sigma - 1}.
inline std::vector<uint8_t> gen_random_text(uint64_t size, uint64_t seed, uint32_t sigma = 4) {
    detail::check_text_args(size, sigma);
    std::mt19937_64 rng(seed);
    std::vector<uint8_t> out(size);
    for (auto& b : out) b = uint8_t('a' + rng() % sigma);
    return out;
}

//! One random base segment (size / copies bytes) repeated to the requested
//! size; every copy after the first takes independent point mutations with
//! the given per-byte rate. Low rates give highly repetitive texts with few
//! BWT runs.
inline std::vector<uint8_t> gen_repetitive_text(uint64_t size, uint64_t seed, double mutation_rate,
                                                uint32_t sigma = 4, uint64_t copies = 32) {
    detail::check_text_args(size, sigma);
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
        throw std::invalid_argument("gen_repetitive_text: mutation rate must be in [0, 1]");
    if (copies < 1) throw std::invalid_argument("gen_repetitive_text: copies must be positive");
    std::mt19937_64 rng(seed);
    uint64_t base_len = std::max<uint64_t>(size / copies, 1);
    std::vector<uint8_t> base(base_len);
    for (auto& b : base) b = uint8_t('a' + rng() % sigma);
    std::vector<uint8_t> out;
    out.reserve(size);
    out.insert(out.end(), base.begin(), base.end());
    while (out.size() < size) {
        for (uint64_t k = 0; k < base_len && out.size() < size; ++k) {
            uint8_t b = base[k];
            if (double(rng()) / double(UINT64_MAX) < mutation_rate) b = uint8_t('a' + rng() % sigma);
            out.push_back(b);
        }
    }
    out.resize(size);
    return out;
}

inline std::vector<uint8_t> gen_synthetic_text(text_kind kind, uint64_t size, uint64_t seed,
                                               double mutation_rate = 0.0, uint32_t sigma = 4) {
    switch (kind) {
        case text_kind::random:
            return gen_random_text(size, seed, sigma);
        case text_kind::repetitive:
            return gen_repetitive_text(size, seed, mutation_rate, sigma);
    }
    throw std::invalid_argument("gen_synthetic_text: unknown kind");
}

//! Deterministic uniform draws from [1..bound].
inline std::vector<uint64_t> gen_queries(uint64_t seed, uint64_t bound, uint64_t count) {
    if (bound < 1) throw std::invalid_argument("gen_queries: bound must be positive");
    std::mt19937_64 rng(seed);
    std::vector<uint64_t> q(count);
    for (auto& v : q) v = rng() % bound + 1;
    return q;
}

//! Number of maximal equal-byte runs; n/r is the usual repetitiveness measure.
inline uint64_t count_runs(const std::vector<uint8_t>& s) {
    if (s.empty()) return 0;
    uint64_t runs = 1;
    for (size_t k = 1; k < s.size(); ++k) runs += s[k] != s[k - 1];
    return runs;
}

}  // namespace hybsel
