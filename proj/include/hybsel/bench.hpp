#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hyb_vector.hpp"
#include "plain_bitvector.hpp"
#include "text_index.hpp"
#include "textgen.hpp"
#include "wavelet_tree.hpp"

namespace hybsel {

//! Inputs stay at desk scale; larger texts are rejected up front.
constexpr uint64_t k_input_cap_bytes = uint64_t(64) << 20;

struct bench_config {
    std::string name = "input";     // label for the CSV text column
    std::vector<uint8_t> raw;       // text bytes; the sentinel is appended if missing
    std::string backend = "hyb";    // "hyb" or "plain"
    uint32_t blocks_per_superblock = 16;
    std::string shape = "huff";     // "huff" or "blcd", BWT benchmark only
    uint64_t queries = 100000;
    uint64_t seed = 0;
};

struct bench_record {
    std::string name;
    uint64_t n = 0;            // text length including the sentinel
    std::string structure;     // "plcp" or "bwt-select"
    std::string backend;
    uint32_t bs = 0;           // 0 for the plain backend
    std::string shape;         // "-" for the plcp benchmark
    double build_ms = 0;
    double avg_query_ns = 0;
    uint64_t size_bytes = 0;
    double size_relative = 0;  // size_bytes / n
    uint64_t answers_checksum = 0;  // not a CSV column; defeats dead-code elimination
};

inline void write_csv_header(std::ostream& os) {
    os << "text,n,structure,backend,bs,shape,build_ms,avg_query_ns,size_bytes,size_relative\n";
}

inline void write_csv_row(std::ostream& os, const bench_record& r) {
    os << r.name << ',' << r.n << ',' << r.structure << ',' << r.backend << ',' << r.bs << ','
       << r.shape << ',' << r.build_ms << ',' << r.avg_query_ns << ',' << r.size_bytes << ','
       << r.size_relative << '\n';
}

namespace detail {

inline void check_bench_config(const bench_config& cfg, bool with_shape) {
    if (cfg.backend != "hyb" && cfg.backend != "plain")
        throw std::invalid_argument("bench: backend must be 'hyb' or 'plain'");
    if (with_shape && cfg.shape != "huff" && cfg.shape != "blcd")
        throw std::invalid_argument("bench: shape must be 'huff' or 'blcd'");
    if (cfg.raw.size() > k_input_cap_bytes)
        throw std::invalid_argument("bench: input exceeds the 64 MiB cap");
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

constexpr uint64_t k_verify_queries = 1000;

template <class BV>
void run_plcp_queries(const BV& encoded, const std::vector<uint32_t>& plcp, const bench_config& cfg,
                      bench_record& rec) {
    uint64_t n = plcp.size();
    // Pre-timing correctness pass: a query batch checked against the in-core
    // array; any mismatch aborts the run.
    for (uint64_t j : gen_queries(cfg.seed + 1, n, k_verify_queries))
        if (plcp_query(encoded, j) != plcp[j - 1])
            throw std::runtime_error("bench-plcp: verification query mismatch, aborting");
    auto queries = gen_queries(cfg.seed, n, cfg.queries);
    uint64_t checksum = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (uint64_t j : queries) checksum += plcp_query(encoded, j);
    double elapsed_ms = ms_since(t0);
    rec.avg_query_ns = cfg.queries ? elapsed_ms * 1e6 / double(cfg.queries) : 0;
    rec.answers_checksum = checksum;
    rec.size_bytes = encoded.size_in_bytes();
}

template <class WT>
void run_bwt_select_queries(const WT& wt, const std::vector<uint8_t>& bwt_str, const bench_config& cfg,
                            bench_record& rec) {
    uint64_t n = bwt_str.size();
    // Occurrence counts and, for verification, all positions per symbol.
    std::array<std::vector<uint64_t>, 256> positions;
    for (uint64_t k = 0; k < n; ++k) positions[bwt_str[k]].push_back(k + 1);
    auto draw = [&](std::mt19937_64& rng) {
        uint64_t pos = rng() % n;
        uint8_t c = bwt_str[pos];
        uint64_t j = rng() % positions[c].size() + 1;
        return std::pair<uint8_t, uint64_t>{c, j};
    };
    std::mt19937_64 verify_rng(cfg.seed + 1);
    for (uint64_t k = 0; k < k_verify_queries; ++k) {
        auto [c, j] = draw(verify_rng);
        if (wt.select(c, j) != positions[c][j - 1])
            throw std::runtime_error("bench-bwt-select: verification query mismatch, aborting");
    }
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::pair<uint8_t, uint64_t>> queries(cfg.queries);
    for (auto& q : queries) q = draw(rng);
    uint64_t checksum = 0;
    auto t0 = std::chrono::steady_clock::now();
    for (auto [c, j] : queries) checksum += wt.select(c, j);
    double elapsed_ms = ms_since(t0);
    rec.avg_query_ns = cfg.queries ? elapsed_ms * 1e6 / double(cfg.queries) : 0;
    rec.answers_checksum = checksum;
    rec.size_bytes = wt.size_in_bytes();
}

}  // namespace detail

//! Builds the sampled-lcp structure over the input text on the requested
//! backend, verifies it, then times batched queries.
inline bench_record bench_plcp(const bench_config& cfg) {
    detail::check_bench_config(cfg, false);
    text t(cfg.raw);
    bench_record rec;
    rec.name = cfg.name;
    rec.n = t.size();
    rec.structure = "plcp";
    rec.backend = cfg.backend;
    rec.bs = cfg.backend == "hyb" ? cfg.blocks_per_superblock : 0;
    rec.shape = "-";

    auto t0 = std::chrono::steady_clock::now();
    auto sa = suffix_array(t);
    auto lcp = lcp_array(t, sa);
    auto plcp = plcp_array(sa, lcp);
    packed_bits bits = plcp_bitvector(plcp);
    if (cfg.backend == "hyb") {
        hyb_vector v(bits, hyb_params{.blocks_per_superblock = cfg.blocks_per_superblock,
                                      .build_select0 = false, .build_select1 = true});
        rec.build_ms = detail::ms_since(t0);
        detail::run_plcp_queries(v, plcp, cfg, rec);
    } else {
        plain_bit_vector v(std::move(bits));
        rec.build_ms = detail::ms_since(t0);
        detail::run_plcp_queries(v, plcp, cfg, rec);
    }
    rec.size_relative = double(rec.size_bytes) / double(rec.n);
    return rec;
}

//! Builds a wavelet tree over the input's Burrows-Wheeler transform on the
//! requested shape and backend, verifies it, then times batched selects.
inline bench_record bench_bwt_select(const bench_config& cfg) {
    detail::check_bench_config(cfg, true);
    text t(cfg.raw);
    bench_record rec;
    rec.name = cfg.name;
    rec.n = t.size();
    rec.structure = "bwt-select";
    rec.backend = cfg.backend;
    rec.bs = cfg.backend == "hyb" ? cfg.blocks_per_superblock : 0;
    rec.shape = cfg.shape;
    wt_shape shape = cfg.shape == "huff" ? wt_shape::huffman : wt_shape::balanced;

    auto t0 = std::chrono::steady_clock::now();
    auto sa = suffix_array(t);
    auto bwt_str = bwt(t, sa);
    if (cfg.backend == "hyb") {
        uint32_t bs = cfg.blocks_per_superblock;
        wavelet_tree<hyb_vector> wt(bwt_str, shape, [bs](const packed_bits& b) {
            return hyb_vector(b, hyb_params{.blocks_per_superblock = bs});
        });
        rec.build_ms = detail::ms_since(t0);
        detail::run_bwt_select_queries(wt, bwt_str, cfg, rec);
    } else {
        wavelet_tree<plain_bit_vector> wt(bwt_str, shape);
        rec.build_ms = detail::ms_since(t0);
        detail::run_bwt_select_queries(wt, bwt_str, cfg, rec);
    }
    rec.size_relative = double(rec.size_bytes) / double(rec.n);
    return rec;
}

//! On-disk container written by the CLI build command: a fixed header naming
//! the structure, then the structure's own stream.
struct structure_file_header {
    uint8_t structure = 0;  // 0 = plcp, 1 = bwt-select
    uint8_t backend = 0;    // 0 = plain, 1 = hyb
    uint8_t shape = 0xff;   // 0 = blcd, 1 = huff, 0xff = not applicable
    uint8_t bs = 0;         // 0 for the plain backend
    uint64_t text_n = 0;    // text length including the sentinel
};

namespace detail {

constexpr char k_structure_magic[9] = "HSBUILD1";
constexpr uint32_t k_structure_version = 1;

}  // namespace detail

inline void write_structure_header(std::ostream& os, const structure_file_header& h) {
    io::write_magic(os, detail::k_structure_magic);
    io::write_u32(os, detail::k_structure_version);
    io::write_u8(os, h.structure);
    io::write_u8(os, h.backend);
    io::write_u8(os, h.shape);
    io::write_u8(os, h.bs);
    io::write_u64(os, h.text_n);
}

inline structure_file_header read_structure_header(std::istream& is) {
    io::expect_magic(is, detail::k_structure_magic);
    if (io::read_u32(is) != detail::k_structure_version)
        throw format_error("structure file: unsupported version");
    structure_file_header h;
    h.structure = io::read_u8(is);
    h.backend = io::read_u8(is);
    h.shape = io::read_u8(is);
    h.bs = io::read_u8(is);
    h.text_n = io::read_u64(is);
    if (h.structure > 1) throw format_error("structure file: invalid structure tag");
    if (h.backend > 1) throw format_error("structure file: invalid backend tag");
    return h;
}

//! Builds the requested structure and writes the container; returns the
//! header that was written.
inline structure_file_header build_structure_file(const bench_config& cfg, const std::string& structure,
                                                  std::ostream& os) {
    detail::check_bench_config(cfg, structure == "bwt-select");
    if (structure != "plcp" && structure != "bwt-select")
        throw std::invalid_argument("build: structure must be 'plcp' or 'bwt-select'");
    text t(cfg.raw);
    bool hyb = cfg.backend == "hyb";
    structure_file_header h;
    h.structure = structure == "plcp" ? 0 : 1;
    h.backend = hyb ? 1 : 0;
    h.bs = hyb ? uint8_t(cfg.blocks_per_superblock) : 0;
    h.text_n = t.size();
    auto sa = suffix_array(t);
    if (structure == "plcp") {
        packed_bits bits = plcp_bitvector(plcp_array(sa, lcp_array(t, sa)));
        write_structure_header(os, h);
        if (hyb)
            hyb_vector(bits, hyb_params{.blocks_per_superblock = cfg.blocks_per_superblock,
                                        .build_select0 = false, .build_select1 = true})
                .serialize(os);
        else
            plain_bit_vector(std::move(bits)).serialize(os);
        return h;
    }
    h.shape = cfg.shape == "huff" ? 1 : 0;
    auto bwt_str = bwt(t, sa);
    wt_shape shape = cfg.shape == "huff" ? wt_shape::huffman : wt_shape::balanced;
    write_structure_header(os, h);
    if (hyb) {
        uint32_t bs = cfg.blocks_per_superblock;
        wavelet_tree<hyb_vector> wt(bwt_str, shape, [bs](const packed_bits& b) {
            return hyb_vector(b, hyb_params{.blocks_per_superblock = bs});
        });
        wt.serialize(os);
    } else {
        wavelet_tree<plain_bit_vector> wt(bwt_str, shape);
        wt.serialize(os);
    }
    return h;
}

}  // namespace hybsel
