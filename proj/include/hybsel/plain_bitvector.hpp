#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "bits.hpp"
#include "io.hpp"

namespace hybsel {

//! Uncompressed bitvector with constant-time rank and fast select for both
//! bit values. Rank keeps one cumulative u64 per 512 bits; select keeps, per
//! bit value, the 512-bit block of every 8192nd occurrence and finishes by
//! scanning words. The support arrays stay below 0.25n bits on top of the
//! raw words.
class plain_bit_vector {
  public:
    static constexpr uint32_t k_rank_sample_bits = 512;
    static constexpr uint32_t k_words_per_sample = k_rank_sample_bits / 64;
    static constexpr uint32_t k_select_sample = 8192;

    plain_bit_vector() = default;

    explicit plain_bit_vector(packed_bits bits) : bits_(std::move(bits)), n_(bits_.size()) {
        build_rank_samples();
        build_select_hints(false);
        build_select_hints(true);
    }

    uint64_t size() const { return n_; }

    //! Occurrences of c in the whole vector.
    uint64_t count(bool c) const { return c ? ones_ : n_ - ones_; }

    bool access(uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("plain_bit_vector::access: position out of range");
        return bits_.get(i);
    }

    //! Occurrences of c in positions [1..i]; rank(c, 0) = 0.
    uint64_t rank(bool c, uint64_t i) const {
        if (i > n_) throw std::out_of_range("plain_bit_vector::rank: position out of range");
        uint64_t k = i / k_rank_sample_bits;
        uint64_t r = rank_samples_[k];
        uint64_t bit = k * k_rank_sample_bits;
        uint64_t widx = k * k_words_per_sample;
        while (bit + 64 <= i) {
            r += popcount_word(bits_.word(widx));
            ++widx;
            bit += 64;
        }
        if (bit < i) r += popcount_word(bits_.word(widx) & low_mask(uint32_t(i - bit)));
        return c ? r : i - r;
    }

    //! Position of the j-th occurrence of c, 1 <= j <= count(c).
    uint64_t select(bool c, uint64_t j) const {
        if (j < 1 || j > count(c))
            throw std::out_of_range("plain_bit_vector::select: occurrence index out of range");
        uint64_t blk = select_hints_[c ? 1 : 0][(j - 1) / k_select_sample];
        for (;;) {
            uint64_t before = block_rank_before(c, blk);
            uint64_t inside = block_count(c, blk);
            if (before + inside >= j) {
                uint64_t local = j - before;
                for (uint64_t widx = blk * k_words_per_sample;; ++widx) {
                    uint64_t w = query_word(c, widx);
                    uint32_t cnt = popcount_word(w);
                    if (local <= cnt) return widx * 64 + select_in_word(w, uint32_t(local));
                    local -= cnt;
                }
            }
            ++blk;
        }
    }

    const packed_bits& bits() const { return bits_; }

    void serialize(std::ostream& os) const {
        io::write_magic(os, k_magic);
        io::write_u32(os, k_version);
        io::write_u64(os, n_);
        io::write_u64(os, ones_);
        io::write_u64_vec(os, bits_.words());
        io::write_u64_vec(os, rank_samples_);
        io::write_u64_vec(os, select_hints_[0]);
        io::write_u64_vec(os, select_hints_[1]);
    }

    static plain_bit_vector load(std::istream& is) {
        io::expect_magic(is, k_magic);
        if (io::read_u32(is) != k_version) throw format_error("plain_bit_vector: unsupported version");
        plain_bit_vector v;
        v.n_ = io::read_u64(is);
        v.ones_ = io::read_u64(is);
        if (v.ones_ > v.n_) throw format_error("plain_bit_vector: one count exceeds length");
        uint64_t nwords = (v.n_ + 63) / 64;
        auto words = io::read_u64_vec(is, nwords);
        if (words.size() != nwords) throw format_error("plain_bit_vector: word count mismatch");
        if (v.n_ % 64 != 0 && nwords > 0 && (words.back() & ~low_mask(uint32_t(v.n_ % 64))) != 0)
            throw format_error("plain_bit_vector: nonzero padding bits");
        v.bits_ = packed_bits::from_words(v.n_, std::move(words));
        uint64_t nsamples = (v.n_ + k_rank_sample_bits - 1) / k_rank_sample_bits + 1;
        v.rank_samples_ = io::read_u64_vec(is, nsamples);
        if (v.rank_samples_.size() != nsamples) throw format_error("plain_bit_vector: sample count mismatch");
        v.select_hints_[0] = io::read_u64_vec(is, v.n_ / k_select_sample + 1);
        v.select_hints_[1] = io::read_u64_vec(is, v.n_ / k_select_sample + 1);
        return v;
    }

    //! Serialized footprint in bytes (matches the stream length exactly).
    uint64_t size_in_bytes() const {
        return 8 + 4 + 8 + 8 + 4 * 8 +
               8 * (bits_.num_words() + rank_samples_.size() + select_hints_[0].size() +
                    select_hints_[1].size());
    }

  private:
    static constexpr char k_magic[9] = "PLAINBV1";
    static constexpr uint32_t k_version = 1;

    packed_bits bits_;
    uint64_t n_ = 0;
    uint64_t ones_ = 0;
    std::vector<uint64_t> rank_samples_;    // cumulative ones before each 512-bit block
    std::vector<uint64_t> select_hints_[2]; // 512-bit block of every 8192nd occurrence

    void build_rank_samples() {
        uint64_t nblocks = (n_ + k_rank_sample_bits - 1) / k_rank_sample_bits;
        rank_samples_.assign(nblocks + 1, 0);
        uint64_t acc = 0;
        for (uint64_t b = 0; b < nblocks; ++b) {
            uint64_t wend = std::min<uint64_t>((b + 1) * k_words_per_sample, bits_.num_words());
            for (uint64_t w = b * k_words_per_sample; w < wend; ++w) acc += popcount_word(bits_.word(w));
            rank_samples_[b + 1] = acc;
        }
        ones_ = acc;
    }

    void build_select_hints(bool c) {
        auto& hints = select_hints_[c ? 1 : 0];
        hints.clear();
        uint64_t seen = 0;
        uint64_t next = 1;  // occurrence index the next hint points at
        for (uint64_t widx = 0; widx < bits_.num_words(); ++widx) {
            uint64_t w = query_word(c, widx);
            uint32_t cnt = popcount_word(w);
            if (seen + cnt >= next) {
                uint64_t pos = widx * 64 + select_in_word(w, uint32_t(next - seen));
                hints.push_back((pos - 1) / k_rank_sample_bits);
                next += k_select_sample;
            }
            seen += cnt;
        }
    }

    // Word widx with the queried bit value as ones, padding masked away.
    uint64_t query_word(bool c, uint64_t widx) const {
        uint64_t w = bits_.word(widx);
        if (!c) w = ~w;
        uint64_t valid = std::min<uint64_t>(64, n_ - widx * 64);
        if (valid < 64) w &= low_mask(uint32_t(valid));
        return w;
    }

    uint64_t block_rank_before(bool c, uint64_t blk) const {
        return c ? rank_samples_[blk] : blk * k_rank_sample_bits - rank_samples_[blk];
    }

    uint64_t block_count(bool c, uint64_t blk) const {
        uint64_t ones = rank_samples_[blk + 1] - rank_samples_[blk];
        if (c) return ones;
        uint64_t valid = std::min<uint64_t>(k_rank_sample_bits, n_ - blk * k_rank_sample_bits);
        return valid - ones;
    }
};

}  // namespace hybsel
