#pragma once

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <vector>

namespace hybsel {

//! Number of set bits in w.
inline uint32_t popcount_word(uint64_t w) { return static_cast<uint32_t>(std::popcount(w)); }

//! Mask with the k lowest bits set (k may be 64).
inline uint64_t low_mask(uint32_t k) {
    return k >= 64 ? ~uint64_t(0) : (uint64_t(1) << k) - 1;
}

namespace detail {

// select_in_byte_table[b][k] = 1-based position of the (k+1)-th set bit of
// byte b, or 0 when the byte has fewer set bits.
constexpr std::array<std::array<uint8_t, 8>, 256> make_select_in_byte_table() {
    std::array<std::array<uint8_t, 8>, 256> t{};
    for (uint32_t b = 0; b < 256; ++b) {
        uint32_t k = 0;
        for (uint32_t pos = 0; pos < 8; ++pos)
            if (b & (uint32_t(1) << pos)) t[b][k++] = static_cast<uint8_t>(pos + 1);
    }
    return t;
}

inline constexpr auto select_in_byte_table = make_select_in_byte_table();

}  // namespace detail

//! 1-based position of the k-th set bit of w, counting from the LSB.
//! Requires 1 <= k <= popcount_word(w). Steps byte by byte, then finishes
//! with a 256-entry lookup.
inline uint32_t select_in_word(uint64_t w, uint32_t k) {
    assert(k >= 1 && k <= popcount_word(w));
    uint32_t base = 0;
    for (int step = 0; step < 8; ++step) {
        uint32_t c = popcount_word(w & 0xff);
        if (k <= c) return base + detail::select_in_byte_table[w & 0xff][k - 1];
        k -= c;
        w >>= 8;
        base += 8;
    }
    assert(false && "select_in_word: k exceeds the popcount");
    return 0;
}

//! Fixed-length packed bit array. Positions are 1-based and bits are stored
//! LSB-first within 64-bit words; bits past the logical length stay zero in
//! the final word.
class packed_bits {
  public:
    packed_bits() = default;

    explicit packed_bits(uint64_t n) : n_(n), words_((n + 63) / 64, 0) {}

    uint64_t size() const { return n_; }
    uint64_t num_words() const { return words_.size(); }

    bool get(uint64_t i) const {
        assert(i >= 1 && i <= n_);
        return (words_[(i - 1) >> 6] >> ((i - 1) & 63)) & 1;
    }

    void set(uint64_t i, bool v) {
        assert(i >= 1 && i <= n_);
        uint64_t mask = uint64_t(1) << ((i - 1) & 63);
        if (v)
            words_[(i - 1) >> 6] |= mask;
        else
            words_[(i - 1) >> 6] &= ~mask;
    }

    uint64_t word(uint64_t k) const {
        assert(k < words_.size());
        return words_[k];
    }

    const std::vector<uint64_t>& words() const { return words_; }

    //! Rebuilds a vector from its logical length and word array; the word
    //! count must match ceil(n/64).
    static packed_bits from_words(uint64_t n, std::vector<uint64_t> words) {
        assert(words.size() == (n + 63) / 64);
        packed_bits b;
        b.n_ = n;
        b.words_ = std::move(words);
        return b;
    }

    uint64_t count_ones() const {
        uint64_t c = 0;
        for (uint64_t w : words_) c += popcount_word(w);
        return c;
    }

    bool operator==(const packed_bits& other) const = default;

  private:
    uint64_t n_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace hybsel
