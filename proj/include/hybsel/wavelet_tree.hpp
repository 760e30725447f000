#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <functional>
#include <queue>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "io.hpp"

namespace hybsel {

//! Anything usable as a wavelet tree node payload: 1-based bit access plus
//! rank and select over both bit values, and a self-framing serialization.
template <class V>
concept rank_select_vector = requires(const V& v, const packed_bits& b, std::ostream& os, std::istream& is) {
    { v.size() } -> std::convertible_to<uint64_t>;
    { v.access(uint64_t(1)) } -> std::convertible_to<bool>;
    { v.rank(true, uint64_t(0)) } -> std::convertible_to<uint64_t>;
    { v.select(true, uint64_t(1)) } -> std::convertible_to<uint64_t>;
    { v.size_in_bytes() } -> std::convertible_to<uint64_t>;
    v.serialize(os);
    { V::load(is) } -> std::same_as<V>;
};

enum class wt_shape : uint8_t { balanced = 0, huffman = 1 };

//! Binary code tree over the occurring byte values of a string. Each
//! internal node stores one bitvector routing its positions to the children
//! (0 = left, 1 = right), so string access, rank and select all reduce to a
//! root-to-leaf walk of bitvector operations.
//!
//! The balanced shape splits the sorted occurring alphabet in half at every
//! level (the left child takes the lower floor(k/2) symbols); the huffman
//! shape merges the two lightest subtrees, breaking weight ties by smallest
//! contained symbol, with the lighter side becoming the left child.
template <rank_select_vector BV>
class wavelet_tree {
  public:
    //! Builds the node bitvector payloads; lets callers inject backend
    //! build parameters.
    using builder_fn = std::function<BV(const packed_bits&)>;

    static builder_fn default_builder() {
        return [](const packed_bits& b) { return BV(b); };
    }

    wavelet_tree() = default;

    wavelet_tree(std::span<const uint8_t> s, wt_shape shape, const builder_fn& build = default_builder())
        : shape_(shape), n_(s.size()) {
        if (s.empty()) throw std::invalid_argument("wavelet_tree: empty input");
        std::array<uint64_t, 256> freq{};
        for (uint8_t b : s) ++freq[b];
        for (uint32_t v = 0; v < 256; ++v)
            if (freq[v]) alphabet_.push_back(uint8_t(v));
        if (alphabet_.size() == 1) {
            nodes_.push_back(node{});
            nodes_[0].symbol = alphabet_[0];
            return;
        }
        std::vector<proto_node> skeleton;
        uint32_t root = shape == wt_shape::balanced
                            ? build_balanced(skeleton, 0, uint32_t(alphabet_.size()))
                            : build_huffman(skeleton, freq);
        flatten_preorder(skeleton, root);
        derive_codes(0, {});
        fill_node(0, std::vector<uint8_t>(s.begin(), s.end()), 0, build);
    }

    uint64_t size() const { return n_; }
    wt_shape shape() const { return shape_; }
    const std::vector<uint8_t>& alphabet() const { return alphabet_; }
    bool contains(uint8_t c) const { return !code_[c].empty() || (single_leaf() && alphabet_[0] == c); }

    //! Occurrences of c in the whole string.
    uint64_t count(uint8_t c) const { return rank(c, n_); }

    uint8_t access(uint64_t i) const {
        if (i < 1 || i > n_) throw std::out_of_range("wavelet_tree::access: position out of range");
        const node* nd = &nodes_[0];
        while (nd->symbol < 0) {
            bool bit = nd->bv.access(i);
            i = nd->bv.rank(bit, i);
            nd = &nodes_[bit ? nd->right : nd->left];
        }
        return uint8_t(nd->symbol);
    }

    //! Occurrences of c in positions [1..i]; rank(c, 0) = 0 and symbols that
    //! never occur yield 0.
    uint64_t rank(uint8_t c, uint64_t i) const {
        if (i > n_) throw std::out_of_range("wavelet_tree::rank: position out of range");
        if (single_leaf()) return alphabet_[0] == c ? i : 0;
        const auto& code = code_[c];
        if (code.empty()) return 0;
        const node* nd = &nodes_[0];
        for (uint8_t bit : code) {
            i = nd->bv.rank(bit != 0, i);
            nd = &nodes_[bit ? nd->right : nd->left];
        }
        return i;
    }

    //! Position of the j-th occurrence of c: walk down recording the path,
    //! then map the occurrence index back up with one select per level.
    uint64_t select(uint8_t c, uint64_t j) const {
        if (!contains(c)) throw std::out_of_range("wavelet_tree::select: symbol does not occur");
        if (single_leaf()) {
            if (j < 1 || j > n_) throw std::out_of_range("wavelet_tree::select: occurrence index out of range");
            return j;
        }
        if (j < 1 || j > rank(c, n_))
            throw std::out_of_range("wavelet_tree::select: occurrence index out of range");
        const auto& code = code_[c];
        std::vector<uint32_t> path;
        path.reserve(code.size());
        uint32_t at = 0;
        for (uint8_t bit : code) {
            path.push_back(at);
            at = bit ? nodes_[at].right : nodes_[at].left;
        }
        uint64_t pos = j;
        for (size_t d = code.size(); d-- > 0;) pos = nodes_[path[d]].bv.select(code[d] != 0, pos);
        return pos;
    }

    //! Code (bit path) of an occurring symbol; empty for a single-leaf tree.
    std::span<const uint8_t> code_of(uint8_t c) const { return code_[c]; }

    uint32_t node_count() const { return uint32_t(nodes_.size()); }
    bool node_is_leaf(uint32_t idx) const { return nodes_[idx].symbol >= 0; }
    uint32_t node_left(uint32_t idx) const { return nodes_[idx].left; }
    uint32_t node_right(uint32_t idx) const { return nodes_[idx].right; }
    uint8_t node_symbol(uint32_t idx) const { return uint8_t(nodes_[idx].symbol); }
    const BV& node_vector(uint32_t idx) const { return nodes_[idx].bv; }

    //! Total bits stored across all node bitvectors (the shape cost).
    uint64_t total_bitvector_bits() const {
        uint64_t bits = 0;
        for (const auto& nd : nodes_)
            if (nd.symbol < 0) bits += nd.bv.size();
        return bits;
    }

    void serialize(std::ostream& os) const {
        io::write_magic(os, k_magic);
        io::write_u32(os, k_version);
        io::write_u8(os, uint8_t(shape_));
        io::write_u64(os, n_);
        io::write_u16(os, uint16_t(alphabet_.size()));
        io::write_bytes(os, alphabet_.data(), alphabet_.size());
        for (uint8_t c : alphabet_) {
            const auto& code = code_[c];
            io::write_u8(os, uint8_t(code.size()));
            io::write_bytes(os, code.data(), code.size());
        }
        io::write_u32(os, uint32_t(nodes_.size()));
        write_node(os, 0);
    }

    static wavelet_tree load(std::istream& is) {
        io::expect_magic(is, k_magic);
        if (io::read_u32(is) != k_version) throw format_error("wavelet_tree: unsupported version");
        wavelet_tree wt;
        uint8_t shape = io::read_u8(is);
        if (shape > 1) throw format_error("wavelet_tree: invalid shape tag");
        wt.shape_ = wt_shape(shape);
        wt.n_ = io::read_u64(is);
        uint16_t sigma = io::read_u16(is);
        if (sigma < 1 || sigma > 256) throw format_error("wavelet_tree: invalid alphabet size");
        wt.alphabet_.resize(sigma);
        io::read_bytes(is, wt.alphabet_.data(), sigma);
        for (uint8_t c : wt.alphabet_) {
            uint8_t len = io::read_u8(is);
            wt.code_[c].resize(len);
            io::read_bytes(is, wt.code_[c].data(), len);
            for (uint8_t bit : wt.code_[c])
                if (bit > 1) throw format_error("wavelet_tree: invalid code bit");
        }
        uint32_t count = io::read_u32(is);
        if (count < 1 || count > 2 * 256) throw format_error("wavelet_tree: invalid node count");
        wt.nodes_.reserve(count);
        wt.read_node(is, count);
        if (wt.nodes_.size() != count) throw format_error("wavelet_tree: node count mismatch");
        wt.verify_codes();
        return wt;
    }

    //! Serialized footprint in bytes (matches the stream length exactly).
    uint64_t size_in_bytes() const {
        uint64_t bytes = 8 + 4 + 1 + 8 + 2 + alphabet_.size();
        for (uint8_t c : alphabet_) bytes += 1 + code_[c].size();
        bytes += 4;
        for (const auto& nd : nodes_) bytes += nd.symbol >= 0 ? 2 : 1 + nd.bv.size_in_bytes();
        return bytes;
    }

  private:
    static constexpr char k_magic[9] = "WVLTREE1";
    static constexpr uint32_t k_version = 1;

    struct node {
        uint32_t left = 0, right = 0;  // valid only for internal nodes
        int16_t symbol = -1;           // >= 0 marks a leaf
        BV bv;
    };

    struct proto_node {
        int left = -1, right = -1, symbol = -1;
    };

    wt_shape shape_ = wt_shape::balanced;
    uint64_t n_ = 0;
    std::vector<uint8_t> alphabet_;  // occurring symbols, ascending
    std::vector<node> nodes_;        // preorder, root at 0
    std::array<std::vector<uint8_t>, 256> code_;

    bool single_leaf() const { return nodes_.size() == 1; }

    //! Splits alphabet_[lo, hi) in half; returns the skeleton node index.
    uint32_t build_balanced(std::vector<proto_node>& skel, uint32_t lo, uint32_t hi) {
        uint32_t idx = uint32_t(skel.size());
        skel.push_back({});
        if (hi - lo == 1) {
            skel[idx].symbol = alphabet_[lo];
            return idx;
        }
        uint32_t mid = lo + (hi - lo) / 2;
        uint32_t l = build_balanced(skel, lo, mid);
        uint32_t r = build_balanced(skel, mid, hi);
        skel[idx].left = int(l);
        skel[idx].right = int(r);
        return idx;
    }

    uint32_t build_huffman(std::vector<proto_node>& skel, const std::array<uint64_t, 256>& freq) {
        using entry = std::tuple<uint64_t, uint32_t, uint32_t>;  // weight, smallest symbol, node
        std::priority_queue<entry, std::vector<entry>, std::greater<>> heap;
        for (uint8_t c : alphabet_) {
            skel.push_back({-1, -1, int(c)});
            heap.emplace(freq[c], c, uint32_t(skel.size() - 1));
        }
        while (heap.size() > 1) {
            auto [wa, ma, a] = heap.top();
            heap.pop();
            auto [wb, mb, b] = heap.top();
            heap.pop();
            skel.push_back({int(a), int(b), -1});
            heap.emplace(wa + wb, std::min(ma, mb), uint32_t(skel.size() - 1));
        }
        return std::get<2>(heap.top());
    }

    void flatten_preorder(const std::vector<proto_node>& skel, uint32_t root) {
        nodes_.reserve(skel.size());
        copy_preorder(skel, root);
    }

    uint32_t copy_preorder(const std::vector<proto_node>& skel, uint32_t at) {
        uint32_t idx = uint32_t(nodes_.size());
        nodes_.push_back(node{});
        nodes_[idx].symbol = int16_t(skel[at].symbol);
        if (skel[at].symbol < 0) {
            uint32_t l = copy_preorder(skel, uint32_t(skel[at].left));
            uint32_t r = copy_preorder(skel, uint32_t(skel[at].right));
            nodes_[idx].left = l;
            nodes_[idx].right = r;
        }
        return idx;
    }

    void derive_codes(uint32_t at, std::vector<uint8_t> prefix) {
        const node& nd = nodes_[at];
        if (nd.symbol >= 0) {
            code_[uint8_t(nd.symbol)] = std::move(prefix);
            return;
        }
        auto left = prefix;
        left.push_back(0);
        derive_codes(nd.left, std::move(left));
        prefix.push_back(1);
        derive_codes(nd.right, std::move(prefix));
    }

    //! Routes the node's subsequence into its bitvector and recurses.
    void fill_node(uint32_t at, std::vector<uint8_t>&& seq, uint32_t depth, const builder_fn& build) {
        node& nd = nodes_[at];
        if (nd.symbol >= 0) return;
        packed_bits bits(seq.size());
        std::vector<uint8_t> ls, rs;
        for (uint64_t i = 0; i < seq.size(); ++i) {
            if (code_[seq[i]][depth]) {
                bits.set(i + 1, true);
                rs.push_back(seq[i]);
            } else {
                ls.push_back(seq[i]);
            }
        }
        seq.clear();
        seq.shrink_to_fit();
        nd.bv = build(bits);
        fill_node(nd.left, std::move(ls), depth + 1, build);
        fill_node(nd.right, std::move(rs), depth + 1, build);
    }

    void write_node(std::ostream& os, uint32_t at) const {
        const node& nd = nodes_[at];
        if (nd.symbol >= 0) {
            io::write_u8(os, 0);
            io::write_u8(os, uint8_t(nd.symbol));
            return;
        }
        io::write_u8(os, 1);
        nd.bv.serialize(os);
        write_node(os, nd.left);
        write_node(os, nd.right);
    }

    uint32_t read_node(std::istream& is, uint32_t max_nodes) {
        if (nodes_.size() >= max_nodes) throw format_error("wavelet_tree: node stream too long");
        uint32_t idx = uint32_t(nodes_.size());
        nodes_.push_back(node{});
        uint8_t tag = io::read_u8(is);
        if (tag == 0) {
            nodes_[idx].symbol = io::read_u8(is);
            return idx;
        }
        if (tag != 1) throw format_error("wavelet_tree: invalid node tag");
        nodes_[idx].bv = BV::load(is);
        uint32_t l = read_node(is, max_nodes);
        uint32_t r = read_node(is, max_nodes);
        nodes_[idx].left = l;
        nodes_[idx].right = r;
        return idx;
    }

    //! Cross-checks the stored code table against the loaded tree shape.
    void verify_codes() const {
        for (uint8_t c : alphabet_) {
            const auto& code = code_[c];
            if (single_leaf()) {
                if (!code.empty() || nodes_[0].symbol != c) throw format_error("wavelet_tree: code/tree mismatch");
                continue;
            }
            uint32_t at = 0;
            for (uint8_t bit : code) {
                if (nodes_[at].symbol >= 0) throw format_error("wavelet_tree: code/tree mismatch");
                at = bit ? nodes_[at].right : nodes_[at].left;
                if (at >= nodes_.size()) throw format_error("wavelet_tree: code/tree mismatch");
            }
            if (nodes_[at].symbol != c) throw format_error("wavelet_tree: code/tree mismatch");
        }
    }
};

}  // namespace hybsel
