#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bits.hpp"

namespace hybsel {

//! Sentinel-terminated byte string. The sentinel 0x00 is appended when
//! missing, must not occur anywhere else, and is strictly smaller than every
//! other byte, which keeps all suffixes distinct. Positions are 1-based.
class text {
  public:
    explicit text(std::vector<uint8_t> bytes) {
        if (bytes.empty() || bytes.back() != 0) bytes.push_back(0);
        for (size_t k = 0; k + 1 < bytes.size(); ++k)
            if (bytes[k] == 0) throw std::invalid_argument("text: sentinel byte 0x00 in the interior");
        bytes_ = std::move(bytes);
    }

    static text from_string(std::string_view s) {
        return text(std::vector<uint8_t>(s.begin(), s.end()));
    }

    uint64_t size() const { return bytes_.size(); }

    uint8_t operator[](uint64_t i) const {
        assert(i >= 1 && i <= bytes_.size());
        return bytes_[i - 1];
    }

    const std::vector<uint8_t>& bytes() const { return bytes_; }

  private:
    std::vector<uint8_t> bytes_;
};

//! Suffix array by prefix doubling: O(n log^2 n) with plain sorts, entirely
//! adequate at desk scale. Returned values are 1-based text positions in
//! lexicographic suffix order.
inline std::vector<uint32_t> suffix_array(const text& s) {
    uint32_t n = uint32_t(s.size());
    std::vector<uint32_t> sa(n), rank(n), next(n);
    std::iota(sa.begin(), sa.end(), 0u);
    for (uint32_t i = 0; i < n; ++i) rank[i] = s.bytes()[i];
    for (uint32_t k = 1;; k *= 2) {
        auto cmp = [&](uint32_t a, uint32_t b) {
            if (rank[a] != rank[b]) return rank[a] < rank[b];
            uint32_t ra = a + k < n ? rank[a + k] + 1 : 0;
            uint32_t rb = b + k < n ? rank[b + k] + 1 : 0;
            return ra < rb;
        };
        std::sort(sa.begin(), sa.end(), cmp);
        next[sa[0]] = 0;
        for (uint32_t i = 1; i < n; ++i) next[sa[i]] = next[sa[i - 1]] + (cmp(sa[i - 1], sa[i]) ? 1 : 0);
        rank.swap(next);
        if (rank[sa[n - 1]] == n - 1) break;
    }
    for (auto& v : sa) ++v;
    return sa;
}

//! Inverse of a 1-based permutation: isa[sa[i] - 1] = i.
inline std::vector<uint32_t> inverse_permutation(std::span<const uint32_t> sa) {
    std::vector<uint32_t> isa(sa.size());
    for (uint32_t i = 0; i < uint32_t(sa.size()); ++i) isa[sa[i] - 1] = i + 1;
    return isa;
}

//! LCP array in suffix-array order: lcp[i] is the longest common prefix of
//! the suffixes at sa positions i and i-1 (lcp[1] = 0). Kasai's algorithm:
//! walking positions in text order lets each comparison resume one short of
//! the previous match length, so total work is linear.
inline std::vector<uint32_t> lcp_array(const text& s, std::span<const uint32_t> sa) {
    uint32_t n = uint32_t(s.size());
    auto isa = inverse_permutation(sa);
    std::vector<uint32_t> lcp(n, 0);
    uint32_t h = 0;
    for (uint32_t j = 1; j <= n; ++j) {
        uint32_t r = isa[j - 1];
        if (r > 1) {
            uint32_t k = sa[r - 2];
            while (j + h <= n && k + h <= n && s[j + h] == s[k + h]) ++h;
            lcp[r - 1] = h;
            if (h > 0) --h;
        } else {
            h = 0;
        }
    }
    return lcp;
}

//! Burrows-Wheeler transform: bwt[i] is the byte preceding suffix sa[i],
//! wrapping to the final byte for the first suffix.
inline std::vector<uint8_t> bwt(const text& s, std::span<const uint32_t> sa) {
    uint32_t n = uint32_t(s.size());
    std::vector<uint8_t> out(n);
    for (uint32_t i = 0; i < n; ++i) out[i] = sa[i] == 1 ? s[n] : s[sa[i] - 1];
    return out;
}

//! Permuted LCP array: plcp[j] is the lcp value of text position j, i.e.
//! lcp[isa[j]].
inline std::vector<uint32_t> plcp_array(std::span<const uint32_t> sa, std::span<const uint32_t> lcp) {
    std::vector<uint32_t> plcp(sa.size());
    for (uint32_t i = 0; i < uint32_t(sa.size()); ++i) plcp[sa[i] - 1] = lcp[i];
    return plcp;
}

//! Encodes a permuted LCP array as a 2n-bit vector with ones at positions
//! plcp[j] + 2j. The positions are strictly increasing exactly because
//! plcp[j+1] >= plcp[j] - 1; any input violating that is rejected.
inline packed_bits plcp_bitvector(std::span<const uint32_t> plcp) {
    uint64_t n = plcp.size();
    packed_bits bits(2 * n);
    uint64_t prev = 0;
    for (uint64_t j = 1; j <= n; ++j) {
        uint64_t pos = uint64_t(plcp[j - 1]) + 2 * j;
        if (pos <= prev)
            throw std::invalid_argument("plcp_bitvector: values violate the one-step monotonicity");
        if (pos > 2 * n) throw std::invalid_argument("plcp_bitvector: value out of range");
        bits.set(pos, true);
        prev = pos;
    }
    return bits;
}

//! Reads plcp[j] back out of the encoded bitvector: the j-th one sits at
//! plcp[j] + 2j. Works with any backend offering select.
template <class BV>
inline uint32_t plcp_query(const BV& encoded, uint64_t j) {
    uint64_t n = encoded.size() / 2;
    if (j < 1 || j > n) throw std::out_of_range("plcp_query: text position out of range");
    return uint32_t(encoded.select(true, j) - 2 * j);
}

//! One-stop bundle for the benchmark paths.
struct text_index {
    std::vector<uint32_t> sa;
    std::vector<uint32_t> isa;
    std::vector<uint32_t> lcp;
    std::vector<uint32_t> plcp;
    std::vector<uint8_t> bwt;
};

inline text_index build_text_index(const text& s) {
    text_index ti;
    ti.sa = suffix_array(s);
    ti.isa = inverse_permutation(ti.sa);
    ti.lcp = lcp_array(s, ti.sa);
    ti.plcp = plcp_array(ti.sa, ti.lcp);
    ti.bwt = bwt(s, ti.sa);
    return ti;
}

}  // namespace hybsel
