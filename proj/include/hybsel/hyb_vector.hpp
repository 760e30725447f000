#pragma once

#include <atomic>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "block_codec.hpp"
#include "io.hpp"

namespace hybsel {

constexpr uint32_t k_hyperblock_blocks = uint32_t(1) << 23;  // blocks per hyperblock
constexpr uint64_t k_hyperblock_bits = uint64_t(k_hyperblock_blocks) * k_block_bits;

//! Build-time tuning for hyb_vector.
struct hyb_params {
    //! Blocks per superblock; must be 8, 16, 32 or 64.
    uint32_t blocks_per_superblock = 16;
    //! Bounds each select lookup table to n / select_space_param bits.
    uint32_t select_space_param = 128;
    bool build_select0 = true;
    bool build_select1 = true;
};

//! Global toggle: when set, select queries take the general header-scan path
//! even where a uniform superblock or a two-run block allows an early
//! return. Seeded from the HYBSEL_DISABLE_SHORTCUTS environment variable
//! ("1" disables the shortcuts); useful for differential testing.
inline std::atomic<bool>& select_shortcut_override() {
    static std::atomic<bool> flag{[] {
        const char* e = std::getenv("HYBSEL_DISABLE_SHORTCUTS");
        return e != nullptr && e[0] == '1';
    }()};
    return flag;
}

inline bool select_shortcuts_disabled() { return select_shortcut_override().load(std::memory_order_relaxed); }
inline void set_select_shortcuts_disabled(bool v) { select_shortcut_override().store(v, std::memory_order_relaxed); }
inline void refresh_select_shortcuts_from_env() {
    const char* e = std::getenv("HYBSEL_DISABLE_SHORTCUTS");
    set_select_shortcuts_disabled(e != nullptr && e[0] == '1');
}

//! Sampled superblock table for one bit value. Entry i (1-based) holds the
//! superblock containing occurrence k_interval*(i-1)+1; the final entry is
//! the total superblock count, so consecutive entries bracket the superblock
//! of any occurrence and bound the select binary search.
class select_index {
  public:
    select_index() = default;
    select_index(uint64_t k_interval, std::vector<uint64_t> table)
        : k_interval_(k_interval), table_(std::move(table)) {}

    bool empty() const { return table_.empty(); }
    uint64_t interval() const { return k_interval_; }
    const std::vector<uint64_t>& table() const { return table_; }

    void serialize(std::ostream& os) const {
        io::write_u64(os, k_interval_);
        io::write_u64_vec(os, table_);
    }

    static select_index load(std::istream& is, uint64_t max_entries) {
        uint64_t k = io::read_u64(is);
        if (k < 1) throw format_error("select_index: zero interval");
        auto table = io::read_u64_vec(is, max_entries);
        return select_index(k, std::move(table));
    }

    uint64_t size_in_bytes() const { return 8 + 8 + 8 * table_.size(); }

  private:
    uint64_t k_interval_ = 1;
    std::vector<uint64_t> table_;
};

//! Compressed bitvector with rank, select and access support.
//!
//! The input is cut into 256-bit blocks, each stored under the cheapest of
//! three byte-aligned encodings (see block_codec.hpp). Headers come in three
//! levels so every per-query scan is bounded:
//!
//!   hyperblock  every 2^23 blocks: global one count and payload offset
//!               before the hyperblock (u64 each)
//!   superblock  every blocks_per_superblock blocks: one count and payload
//!               offset local to the hyperblock (u32 each, top offset bit
//!               flags an all-equal superblock), plus the 16-bit headers of
//!               its blocks
//!   block       one count, special flag and payload length (packed u16)
//!
//! rank walks one superblock's headers and finishes inside one block.
//! select first narrows to a superblock through the sampled select_index
//! and a binary search on cumulative counts, then reuses the same in-block
//! machinery. Uniform superblocks and two-run blocks resolve arithmetically
//! unless the shortcut override is set.
class hyb_vector {
  public:
    hyb_vector() = default;

    explicit hyb_vector(const packed_bits& bits, const hyb_params& params = {}) {
        uint32_t bs = params.blocks_per_superblock;
        if (bs != 8 && bs != 16 && bs != 32 && bs != 64)
            throw std::invalid_argument("hyb_vector: blocks_per_superblock must be 8, 16, 32 or 64");
        if (params.select_space_param < 1)
            throw std::invalid_argument("hyb_vector: select_space_param must be positive");
        n_ = bits.size();
        bs_ = bs;
        select_space_param_ = params.select_space_param;

        uint64_t nb = block_count();
        hyper_.reserve(hyperblock_count());
        sb_.reserve(superblock_count());
        blocks_.assign(superblock_count() * bs_, 0);

        uint64_t tot_ones = 0, tot_off = 0;
        uint64_t hb_ones = 0, hb_off = 0;
        for (uint64_t ib = 0; ib < nb; ++ib) {
            if (ib % k_hyperblock_blocks == 0) {
                hyper_.push_back({tot_ones, tot_off});
                hb_ones = tot_ones;
                hb_off = tot_off;
            }
            if (ib % bs_ == 0) sb_.push_back({uint32_t(tot_ones - hb_ones), uint32_t(tot_off - hb_off)});
            uint32_t blen = block_len(ib + 1);
            uint64_t wtmp[k_block_words] = {0, 0, 0, 0};
            uint32_t nw = (blen + 63) / 64;
            for (uint32_t k = 0; k < nw; ++k) wtmp[k] = bits.word(ib * k_block_words + k);
            block_header h = choose_block_encoding({wtmp, nw}, blen, payload_);
            blocks_[ib] = h.raw;
            tot_ones += h.ones();
            tot_off += h.encode_len();
        }
        ones_ = tot_ones;
        payload_.shrink_to_fit();
        mark_uniform_superblocks();

        if (params.build_select1) {
            sel_[1] = build_select_index(true);
            sel_built_[1] = true;
        }
        if (params.build_select0) {
            sel_[0] = build_select_index(false);
            sel_built_[0] = true;
        }
    }

    uint64_t size() const { return n_; }

    //! Occurrences of c in the whole vector.
    uint64_t count(bool c) const { return c ? ones_ : n_ - ones_; }

    uint32_t blocks_per_superblock() const { return bs_; }
    uint64_t payload_size() const { return payload_.size(); }

    uint64_t block_count() const { return (n_ + k_block_bits - 1) / k_block_bits; }

    uint64_t superblock_count() const {
        uint64_t sb_bits = uint64_t(bs_) * k_block_bits;
        return (n_ + sb_bits - 1) / sb_bits;
    }

    uint64_t hyperblock_count() const { return (n_ + k_hyperblock_bits - 1) / k_hyperblock_bits; }

    bool access(uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("hyb_vector::access: position out of range");
        uint64_t ib = (i - 1) / k_block_bits;
        uint64_t isb = ib / bs_;
        if (sb_[isb].uniform()) return superblock_value(isb);
        uint64_t off = payload_offset(isb);
        for (uint64_t j = isb * bs_; j < ib; ++j) off += block_header{blocks_[j]}.encode_len();
        block_header h{blocks_[ib]};
        uint32_t blen = block_len(ib + 1);
        return block_access(classify_block(h.ones(), h.encode_len(), blen), payload_span(off, h.encode_len()),
                            h.special(), h.ones(), blen, uint32_t(i - ib * k_block_bits));
    }

    //! Occurrences of c in positions [1..i]; rank(c, 0) = 0.
    uint64_t rank(bool c, uint64_t i) const {
        if (i > n_) throw std::out_of_range("hyb_vector::rank: position out of range");
        if (i == 0) return 0;
        uint64_t ib = (i - 1) / k_block_bits;
        uint64_t isb = ib / bs_;
        uint64_t r1 = hyper_[ib / k_hyperblock_blocks].ones_before + sb_[isb].local_ones;
        if (sb_[isb].uniform()) {
            if (superblock_value(isb)) r1 += i - isb * uint64_t(bs_) * k_block_bits;
            return c ? r1 : i - r1;
        }
        uint64_t off = payload_offset(isb);
        for (uint64_t j = isb * bs_; j < ib; ++j) {
            block_header h{blocks_[j]};
            r1 += h.ones();
            off += h.encode_len();
        }
        block_header h{blocks_[ib]};
        uint32_t blen = block_len(ib + 1);
        r1 += block_rank(classify_block(h.ones(), h.encode_len(), blen), payload_span(off, h.encode_len()),
                         h.special(), h.ones(), blen, true, uint32_t(i - ib * k_block_bits));
        return c ? r1 : i - r1;
    }

    //! Result of narrowing a select query to one superblock.
    struct superblock_locator {
        uint64_t superblock;    // 1-based
        uint64_t hyper_rank;    // occurrences of c before the containing hyperblock
        uint64_t super_rank;    // occurrences of c between hyperblock start and superblock start
        uint64_t payload_base;  // global payload offset of the superblock's first block
        bool uniform;
    };

    //! Superblock of the q-th occurrence of c: two sampled table entries
    //! bracket it, a binary search on cumulative counts pins it down.
    //! Requires a built select index and 1 <= q <= count(c).
    superblock_locator find_superblock(bool c, uint64_t q) const {
        const select_index& idx = sel_[c ? 1 : 0];
        const auto& table = idx.table();
        uint64_t u = (q - 1) / idx.interval() + 1;
        assert(u + 1 <= table.size());
        uint64_t lo = table[u - 1], hi = table[u];
        while (lo < hi) {
            uint64_t mid = lo + (hi - lo + 1) / 2;
            if (rank_before_superblock(c, mid) < q)
                lo = mid;
            else
                hi = mid - 1;
        }
        uint64_t ih = hyper_of_superblock(lo);
        uint64_t h1 = hyper_[ih - 1].ones_before;
        uint64_t s1 = sb_[lo - 1].local_ones;
        uint64_t hyper_bits = (ih - 1) * k_hyperblock_bits;
        uint64_t local_bits = (lo - 1) * uint64_t(bs_) * k_block_bits - hyper_bits;
        return {lo, c ? h1 : hyper_bits - h1, c ? s1 : local_bits - s1,
                hyper_[ih - 1].offset_before + sb_[lo - 1].local_off(), sb_[lo - 1].uniform()};
    }

    //! Result of scanning one superblock's block headers.
    struct block_locator {
        uint64_t block;       // 1-based global block index
        uint64_t rank_sum;    // occurrences of c in the superblock's earlier blocks
        uint64_t offset_sum;  // payload bytes of the superblock's earlier blocks
        block_header header;
    };

    //! Block of the q_residual-th occurrence of c inside a superblock,
    //! counting from the superblock start. The scan never leaves the
    //! superblock (the final one may hold fewer than bs blocks).
    block_locator scan_block_headers(uint64_t superblock, bool c, uint64_t q_residual) const {
        uint64_t first = (superblock - 1) * bs_;
        uint64_t last = std::min<uint64_t>(first + bs_, block_count());
        uint64_t rank_sum = 0, off_sum = 0;
        for (uint64_t j = first; j < last; ++j) {
            block_header h{blocks_[j]};
            uint64_t cnt = c ? h.ones() : block_len(j + 1) - h.ones();
            if (rank_sum + cnt >= q_residual) return {j + 1, rank_sum, off_sum, h};
            rank_sum += cnt;
            off_sum += h.encode_len();
        }
        assert(false && "scan_block_headers: residual exceeds the superblock count");
        throw std::logic_error("hyb_vector: internal select inconsistency");
    }

    //! Position of the q-th occurrence of c, 1 <= q <= count(c). Requires
    //! the select index for c.
    uint64_t select(bool c, uint64_t q) const {
        if (!sel_built_[c ? 1 : 0])
            throw std::logic_error("hyb_vector::select: no select index built for this bit value");
        if (q < 1 || q > count(c))
            throw std::out_of_range("hyb_vector::select: occurrence index out of range");
        bool shortcuts = !select_shortcuts_disabled();
        superblock_locator sb = find_superblock(c, q);
        uint64_t q_rem = q - sb.hyper_rank - sb.super_rank;
        uint64_t sb_begin = (sb.superblock - 1) * uint64_t(bs_) * k_block_bits;
        if (sb.uniform && shortcuts) return sb_begin + q_rem;
        block_locator bl = scan_block_headers(sb.superblock, c, q_rem);
        uint32_t blen = block_len(bl.block);
        uint32_t local =
            block_select(classify_block(bl.header.ones(), bl.header.encode_len(), blen),
                         payload_span(sb.payload_base + bl.offset_sum, bl.header.encode_len()),
                         bl.header.special(), bl.header.ones(), blen, c, uint32_t(q_rem - bl.rank_sum),
                         shortcuts);
        return (bl.block - 1) * k_block_bits + local;
    }

    bool has_select_index(bool c) const { return sel_built_[c ? 1 : 0]; }

    const select_index& select_table(bool c) const { return sel_[c ? 1 : 0]; }

    //! Builds the sampled superblock table for c from the headers alone.
    //! With rank_c occurrences, the sampling interval is sized so the table
    //! has at most max(n / (select_space_param * 64), 2) entries; no
    //! occurrences yield an empty table.
    select_index build_select_index(bool c) const {
        uint64_t total = count(c);
        if (total == 0) return select_index();
        uint64_t m_max = std::max<uint64_t>(n_ / (uint64_t(select_space_param_) * 64), 2);
        uint64_t k_int = (total + m_max - 2) / (m_max - 1);
        uint64_t m = (total + k_int - 1) / k_int + 1;
        std::vector<uint64_t> table(m);
        uint64_t nsb = superblock_count();
        uint64_t sb = 1;
        for (uint64_t i = 1; i < m; ++i) {
            uint64_t j = k_int * (i - 1) + 1;
            while (cum_count_through(c, sb) < j) ++sb;
            table[i - 1] = sb;
        }
        table[m - 1] = nsb;
        return select_index(k_int, std::move(table));
    }

    void serialize(std::ostream& os) const {
        io::write_magic(os, k_magic);
        io::write_u32(os, k_version);
        io::write_u64(os, n_);
        io::write_u8(os, uint8_t(bs_));
        io::write_u8(os, (sel_built_[0] ? 1 : 0) | (sel_built_[1] ? 2 : 0));
        for (int k = 0; k < 6; ++k) io::write_u8(os, 0);
        io::write_u64(os, hyper_.size());
        for (const auto& h : hyper_) {
            io::write_u64(os, h.ones_before);
            io::write_u64(os, h.offset_before);
        }
        io::write_u64(os, sb_.size());
        for (uint64_t s = 0; s < sb_.size(); ++s) {
            io::write_u32(os, sb_[s].local_ones);
            io::write_u32(os, sb_[s].off_bits);
            for (uint32_t k = 0; k < bs_; ++k) io::write_u16(os, blocks_[s * bs_ + k]);
        }
        io::write_u64(os, payload_.size());
        io::write_bytes(os, payload_.data(), payload_.size());
        for (int c = 0; c < 2; ++c)
            if (sel_built_[c]) sel_[c].serialize(os);
    }

    static hyb_vector load(std::istream& is) {
        io::expect_magic(is, k_magic);
        if (io::read_u32(is) != k_version) throw format_error("hyb_vector: unsupported version");
        hyb_vector v;
        v.n_ = io::read_u64(is);
        uint32_t bs = io::read_u8(is);
        if (bs != 8 && bs != 16 && bs != 32 && bs != 64)
            throw format_error("hyb_vector: invalid superblock size");
        v.bs_ = bs;
        uint8_t flags = io::read_u8(is);
        if (flags > 3) throw format_error("hyb_vector: invalid flags");
        for (int k = 0; k < 6; ++k) io::read_u8(is);  // reserved
        if (io::read_u64(is) != v.hyperblock_count()) throw format_error("hyb_vector: hyperblock count mismatch");
        v.hyper_.resize(v.hyperblock_count());
        for (auto& h : v.hyper_) {
            h.ones_before = io::read_u64(is);
            h.offset_before = io::read_u64(is);
        }
        if (io::read_u64(is) != v.superblock_count()) throw format_error("hyb_vector: superblock count mismatch");
        v.sb_.resize(v.superblock_count());
        v.blocks_.assign(v.superblock_count() * v.bs_, 0);
        for (uint64_t s = 0; s < v.sb_.size(); ++s) {
            v.sb_[s].local_ones = io::read_u32(is);
            v.sb_[s].off_bits = io::read_u32(is);
            for (uint32_t k = 0; k < v.bs_; ++k) v.blocks_[s * v.bs_ + k] = io::read_u16(is);
        }
        uint64_t plen = io::read_u64(is);
        if (plen > v.block_count() * k_block_bytes) throw format_error("hyb_vector: payload length out of bounds");
        v.payload_.resize(plen);
        io::read_bytes(is, v.payload_.data(), plen);
        for (int c = 0; c < 2; ++c)
            if (flags & (1 << c)) {
                v.sel_[c] = select_index::load(is, v.n_ + 2);
                v.sel_built_[c] = true;
            }
        v.recompute_ones();
        return v;
    }

    //! Serialized footprint in bytes (matches the stream length exactly).
    uint64_t size_in_bytes() const {
        uint64_t bytes = 8 + 4 + 8 + 1 + 1 + 6;
        bytes += 8 + 16 * hyper_.size();
        bytes += 8 + (8 + 2 * uint64_t(bs_)) * sb_.size();
        bytes += 8 + payload_.size();
        for (int c = 0; c < 2; ++c)
            if (sel_built_[c]) bytes += sel_[c].size_in_bytes();
        return bytes;
    }

  private:
    static constexpr char k_magic[9] = "HYBSEL01";
    static constexpr uint32_t k_version = 1;

    struct hyper_header {
        uint64_t ones_before = 0;    // ones in the vector before this hyperblock
        uint64_t offset_before = 0;  // payload bytes before this hyperblock
    };

    struct super_header {
        uint32_t local_ones = 0;  // ones between hyperblock start and this superblock
        uint32_t off_bits = 0;    // bits 0..30: local payload offset, bit 31: uniform flag

        uint32_t local_off() const { return off_bits & 0x7fffffffu; }
        bool uniform() const { return off_bits >> 31; }
    };

    uint64_t n_ = 0;
    uint64_t ones_ = 0;
    uint32_t bs_ = 16;
    uint32_t select_space_param_ = 128;
    std::vector<hyper_header> hyper_;
    std::vector<super_header> sb_;
    std::vector<uint16_t> blocks_;  // bs_ header slots per superblock, tail slots zero
    std::vector<uint8_t> payload_;
    select_index sel_[2];
    bool sel_built_[2] = {false, false};

    uint32_t block_len(uint64_t block) const {  // 1-based
        return uint32_t(std::min<uint64_t>(k_block_bits, n_ - (block - 1) * k_block_bits));
    }

    std::span<const uint8_t> payload_span(uint64_t off, uint32_t len) const {
        assert(off + len <= payload_.size());
        return {payload_.data() + off, len};
    }

    uint64_t payload_offset(uint64_t isb) const {  // 0-based superblock
        return hyper_[isb * bs_ / k_hyperblock_blocks].offset_before + sb_[isb].local_off();
    }

    //! Bit value filling a uniform superblock (0-based index).
    bool superblock_value(uint64_t isb) const { return block_header{blocks_[isb * bs_]}.ones() > 0; }

    uint64_t hyper_of_superblock(uint64_t sb) const {  // both 1-based
        return uint64_t(bs_) * (sb - 1) / k_hyperblock_blocks + 1;
    }

    //! Occurrences of c before superblock sb (1-based).
    uint64_t rank_before_superblock(bool c, uint64_t sb) const {
        uint64_t ih = hyper_of_superblock(sb);
        uint64_t r1 = hyper_[ih - 1].ones_before + sb_[sb - 1].local_ones;
        return c ? r1 : (sb - 1) * uint64_t(bs_) * k_block_bits - r1;
    }

    //! Occurrences of c in superblocks [1..sb].
    uint64_t cum_count_through(bool c, uint64_t sb) const {
        return sb < superblock_count() ? rank_before_superblock(c, sb + 1) : count(c);
    }

    void mark_uniform_superblocks() {
        uint64_t nb = block_count();
        for (uint64_t s = 0; s < sb_.size(); ++s) {
            uint64_t first = s * bs_, last = std::min<uint64_t>(first + bs_, nb);
            uint64_t sones = 0;
            for (uint64_t j = first; j < last; ++j) sones += block_header{blocks_[j]}.ones();
            uint64_t valid = std::min<uint64_t>(uint64_t(bs_) * k_block_bits, n_ - s * uint64_t(bs_) * k_block_bits);
            if (sones == 0 || sones == valid) sb_[s].off_bits |= 0x80000000u;
        }
    }

    void recompute_ones() {
        ones_ = 0;
        uint64_t nsb = superblock_count();
        if (nsb == 0) return;
        ones_ = rank_before_superblock(true, nsb);
        for (uint64_t j = (nsb - 1) * bs_; j < block_count(); ++j)
            ones_ += block_header{blocks_[j]}.ones();
    }
};

}  // namespace hybsel
