#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

#include "bits.hpp"
#include "io.hpp"

namespace hybsel {

constexpr uint32_t k_block_bits = 256;
constexpr uint32_t k_block_bytes = k_block_bits / 8;  // plain payload size
constexpr uint32_t k_block_words = k_block_bits / 64;

//! How one 256-bit block is stored in the payload array.
//!
//!   minority    positions of the rarer bit value, one byte each
//!   run_length  endings of all runs except the last two, one byte each
//!   plain       the raw 32 bytes
//!
//! Every stored byte is (value - 1) of a 1-based in-block position, so the
//! full range [1..256] fits in eight bits.
enum class block_encoding : uint8_t { minority, run_length, plain };

//! Packed 16-bit block header: bits 0-8 hold the one count, bit 9 the
//! special flag, bits 10-15 the payload length in bytes. The special flag
//! names the minority bit value for minority blocks and the first bit of
//! the block for run-length blocks.
struct block_header {
    uint16_t raw = 0;

    static block_header pack(uint32_t ones, bool special, uint32_t encode_len) {
        assert(ones <= k_block_bits && encode_len <= k_block_bytes);
        return {uint16_t(ones | (uint32_t(special) << 9) | (encode_len << 10))};
    }

    uint32_t ones() const { return raw & 0x1ff; }
    bool special() const { return (raw >> 9) & 1; }
    uint32_t encode_len() const { return raw >> 10; }
};

//! Recovers the encoding from the header alone. Minority is tested first,
//! then plain; everything else is run-length. The encoder breaks cost ties
//! in exactly this order, so the test is unambiguous.
inline block_encoding classify_block(uint32_t ones, uint32_t encode_len, uint32_t blen) {
    if (encode_len == std::min(ones, blen - ones)) return block_encoding::minority;
    if (encode_len == k_block_bytes) return block_encoding::plain;
    return block_encoding::run_length;
}

struct block_stats {
    uint32_t ones = 0;
    uint32_t runs = 0;
};

//! One counts and run count of a block given as zero-padded words.
inline block_stats scan_block(std::span<const uint64_t> words, uint32_t blen) {
    assert(blen >= 1 && blen <= k_block_bits);
    block_stats st;
    uint32_t transitions = 0;
    uint64_t prev_bit = 0;
    uint32_t nw = (blen + 63) / 64;
    for (uint32_t k = 0; k < nw; ++k) {
        uint32_t valid = std::min<uint32_t>(64, blen - 64 * k);
        uint64_t w = words[k] & low_mask(valid);
        st.ones += popcount_word(w);
        uint64_t shifted = (w << 1) | prev_bit;
        uint64_t t = (w ^ shifted) & low_mask(valid);
        if (k == 0) t &= ~uint64_t(1);  // position 1 has no predecessor
        transitions += popcount_word(t);
        prev_bit = (w >> (valid - 1)) & 1;
    }
    st.runs = transitions + 1;
    return st;
}

//! Encodes one block: appends the payload to out and returns the packed
//! header. Cost is bytes only — min(ones, zeros) for minority, runs - 2 for
//! run-length, 32 for plain — and ties resolve minority, then plain, then
//! run-length, matching classify_block.
inline block_header choose_block_encoding(std::span<const uint64_t> words, uint32_t blen,
                                          std::vector<uint8_t>& out) {
    block_stats st = scan_block(words, blen);
    uint32_t zeros = blen - st.ones;
    uint32_t minority_cost = std::min(st.ones, zeros);
    uint32_t run_cost = st.runs >= 2 ? st.runs - 2 : 0;
    uint32_t best = std::min({minority_cost, run_cost, k_block_bytes});
    uint32_t nw = (blen + 63) / 64;

    if (best == minority_cost) {
        bool minority_bit = st.ones < zeros;
        for (uint32_t k = 0; k < nw; ++k) {
            uint32_t valid = std::min<uint32_t>(64, blen - 64 * k);
            uint64_t w = words[k];
            if (!minority_bit) w = ~w;
            w &= low_mask(valid);
            while (w) {
                out.push_back(uint8_t(64 * k + std::countr_zero(w)));
                w &= w - 1;
            }
        }
        return block_header::pack(st.ones, minority_bit, minority_cost);
    }

    if (best == k_block_bytes) {
        uint8_t raw[8];
        for (uint32_t k = 0; k < k_block_words; ++k) {
            io::store_u64_le(raw, k < nw ? words[k] & low_mask(std::min<uint32_t>(64, blen - 64 * k))
                                         : 0);
            out.insert(out.end(), raw, raw + 8);
        }
        return block_header::pack(st.ones, false, k_block_bytes);
    }

    // Run-length: store the endings of all runs but the last two. A run ends
    // at position p when bit p differs from bit p+1.
    uint32_t emitted = 0;
    uint64_t prev_bit = words[0] & 1;
    for (uint32_t k = 0; k < nw && emitted < run_cost; ++k) {
        uint32_t valid = std::min<uint32_t>(64, blen - 64 * k);
        uint64_t w = words[k] & low_mask(valid);
        uint64_t shifted = (w << 1) | prev_bit;
        uint64_t t = (w ^ shifted) & low_mask(valid);
        if (k == 0) t &= ~uint64_t(1);
        while (t && emitted < run_cost) {
            // bit p of t set (0-based) means a run ends at in-block position 64k + p
            out.push_back(uint8_t(64 * k + std::countr_zero(t) - 1));
            t &= t - 1;
            ++emitted;
        }
        prev_bit = (w >> (valid - 1)) & 1;
    }
    assert(emitted == run_cost);
    return block_header::pack(st.ones, words[0] & 1, run_cost);
}

//! Ending position of the next-to-last run of a run-length block, derived
//! from the one count: summing the lengths of the runs holding ones over
//! the stored endings leaves exactly one unknown, which is solvable because
//! run values alternate starting from the special bit.
inline uint32_t recover_last_run_ending(std::span<const uint8_t> payload, bool special,
                                        uint32_t ones, uint32_t blen) {
    uint32_t l = uint32_t(payload.size());
    uint32_t m = l + 2;  // total runs
    uint32_t known = 0, prev = 0;
    for (uint32_t d = 1; d <= l; ++d) {
        uint32_t rd = uint32_t(payload[d - 1]) + 1;
        if (((d + (special ? 1 : 0)) & 1) == 0) known += rd - prev;  // run d holds ones
        prev = rd;
    }
    uint32_t r;
    if (((m + (special ? 1 : 0)) & 1) == 0) {
        // the final run holds the remaining ones
        r = blen - (ones - known);
    } else {
        // run m-1 holds them, and run m-2 = l is fully stored
        uint32_t r_l = l > 0 ? uint32_t(payload[l - 1]) + 1 : 0;
        r = r_l + (ones - known);
    }
    assert(r >= 1 && r < blen);
    return r;
}

//! Occurrences of c among the first i bits of an encoded block, 0 <= i <= blen.
inline uint32_t block_rank(block_encoding kind, std::span<const uint8_t> payload, bool special,
                           uint32_t ones, uint32_t blen, bool c, uint32_t i) {
    assert(i <= blen);
    if (i == 0) return 0;
    switch (kind) {
        case block_encoding::minority: {
            uint32_t k = 0, l = uint32_t(payload.size());
            while (k < l && uint32_t(payload[k]) < i) ++k;  // stored byte < i  <=>  position <= i
            return (c == special) ? k : i - k;
        }
        case block_encoding::plain: {
            uint32_t r = 0, full = i / 64, rem = i % 64;
            for (uint32_t k = 0; k < full; ++k) r += popcount_word(io::load_u64_le(payload.data() + 8 * k));
            if (rem) r += popcount_word(io::load_u64_le(payload.data() + 8 * full) & low_mask(rem));
            return c ? r : i - r;
        }
        case block_encoding::run_length: {
            uint32_t l = uint32_t(payload.size());
            uint32_t r_last = recover_last_run_ending(payload, special, ones, blen);
            uint32_t acc = 0, prev = 0;
            for (uint32_t d = 1; d <= l + 2; ++d) {
                uint32_t rd = d <= l ? uint32_t(payload[d - 1]) + 1 : (d == l + 1 ? r_last : blen);
                bool bit = (d & 1) ? special : !special;  // run values alternate
                uint32_t hi = std::min(rd, i);
                if (bit == c && hi > prev) acc += hi - prev;
                if (rd >= i) break;
                prev = rd;
            }
            return acc;
        }
    }
    return 0;
}

//! Bit at in-block position i, 1 <= i <= blen.
inline bool block_access(block_encoding kind, std::span<const uint8_t> payload, bool special,
                         uint32_t ones, uint32_t blen, uint32_t i) {
    assert(i >= 1 && i <= blen);
    switch (kind) {
        case block_encoding::minority:
            for (uint8_t p : payload) {
                if (uint32_t(p) == i - 1) return special;
                if (uint32_t(p) >= i) break;  // positions are sorted
            }
            return !special;
        case block_encoding::plain:
            return (io::load_u64_le(payload.data() + 8 * ((i - 1) / 64)) >> ((i - 1) % 64)) & 1;
        case block_encoding::run_length: {
            uint32_t l = uint32_t(payload.size());
            for (uint32_t d = 1; d <= l + 2; ++d) {
                uint32_t rd = d <= l ? uint32_t(payload[d - 1]) + 1
                                     : (d == l + 1 ? recover_last_run_ending(payload, special, ones, blen)
                                                   : blen);
                if (i <= rd) return (d & 1) ? special : !special;
            }
            break;
        }
    }
    assert(false);
    return false;
}

//! Position of the q-th occurrence of c in a minority block. When c is the
//! minority value the answer is stored directly; otherwise stored positions
//! are skipped while they precede the q-th majority bit.
inline uint32_t minority_select(std::span<const uint8_t> payload, bool special, bool c, uint32_t q) {
    assert(q >= 1);
    if (c == special) return uint32_t(payload[q - 1]) + 1;
    uint32_t x = 0, l = uint32_t(payload.size());
    // stored[x] < q + x  <=>  the (x+1)-th minority position precedes the answer
    while (x < l && uint32_t(payload[x]) < q + x) ++x;
    return x + q;
}

//! Position of the q-th occurrence of c in a run-length block. Walks stored
//! run endings two at a time (runs alternate values), consuming occurrences
//! of c; the final one or two runs are handled by closed forms, and a block
//! with no stored endings (exactly two runs) resolves arithmetically when
//! allow_two_run_shortcut is set.
inline uint32_t run_length_select(std::span<const uint8_t> payload, bool special, uint32_t ones,
                                  uint32_t blen, bool c, uint32_t q,
                                  bool allow_two_run_shortcut = true) {
    assert(q >= 1);
    uint32_t l = uint32_t(payload.size());
    if (l == 0 && allow_two_run_shortcut) {
        if (c == special) return q;
        return (special ? ones : blen - ones) + q;
    }
    uint32_t a = 0, u = q, x = 0;
    if (c == special) {
        uint32_t r1 = l > 0 ? uint32_t(payload[0]) + 1 : recover_last_run_ending(payload, special, ones, blen);
        uint32_t step = std::min(r1, u);
        a = step;
        u -= step;
        x = 1;
    }
    while (x + 1 < l && u > 0) {
        uint32_t r_lo = uint32_t(payload[x]) + 1;      // end of the run before the next c-run
        uint32_t r_hi = uint32_t(payload[x + 1]) + 1;  // end of the next c-run
        uint32_t step = std::min(r_hi - r_lo, u);
        a = r_lo + step;
        u -= step;
        x += 2;
    }
    if (u > 0) {
        if (x == l) {
            // the q-th occurrence sits in the final run, after every bit of the other value
            a = (c ? blen - ones : ones) + q;
        } else {
            // x == l - 1: it sits in the run right after the last stored ending
            a = uint32_t(payload[l - 1]) + 1 + u;
        }
    }
    return a;
}

//! Position of the q-th occurrence of c in a plain block.
inline uint32_t plain_select(std::span<const uint8_t> payload, uint32_t blen, bool c, uint32_t q) {
    assert(q >= 1);
    for (uint32_t k = 0; 64 * k < blen; ++k) {
        uint64_t w = io::load_u64_le(payload.data() + 8 * k);
        if (!c) w = ~w;
        uint32_t valid = std::min<uint32_t>(64, blen - 64 * k);
        w &= low_mask(valid);
        uint32_t cnt = popcount_word(w);
        if (q <= cnt) return 64 * k + select_in_word(w, q);
        q -= cnt;
    }
    assert(false && "plain_select: q exceeds the occurrence count");
    return 0;
}

//! Single dispatch point used by the enclosing vector's select query.
inline uint32_t block_select(block_encoding kind, std::span<const uint8_t> payload, bool special,
                             uint32_t ones, uint32_t blen, bool c, uint32_t q,
                             bool allow_two_run_shortcut = true) {
    switch (kind) {
        case block_encoding::minority:
            return minority_select(payload, special, c, q);
        case block_encoding::run_length:
            return run_length_select(payload, special, ones, blen, c, q, allow_two_run_shortcut);
        case block_encoding::plain:
            return plain_select(payload, blen, c, q);
    }
    assert(false);
    return 0;
}

}  // namespace hybsel
