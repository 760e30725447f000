#include <doctest.h>

#include <algorithm>
#include <sstream>

#include <hybsel/bench.hpp>

#include "test_support.hpp"

using namespace hybsel;

namespace {

bench_config small_config(std::string backend) {
    bench_config cfg;
    cfg.name = "probe";
    cfg.raw = gen_repetitive_text(20000, 3, 0.02);
    cfg.backend = std::move(backend);
    cfg.blocks_per_superblock = 8;
    cfg.queries = 4000;
    cfg.seed = 17;
    return cfg;
}

}  // namespace

TEST_CASE("plcp benchmark records are self-consistent") {
    for (const char* backend : {"plain", "hyb"}) {
        auto rec = bench_plcp(small_config(backend));
        CHECK(rec.name == "probe");
        CHECK(rec.n == 20001);  // the sentinel is appended
        CHECK(rec.structure == "plcp");
        CHECK(rec.backend == backend);
        CHECK(rec.bs == (rec.backend == "hyb" ? 8 : 0));
        CHECK(rec.shape == "-");
        CHECK(rec.build_ms > 0);
        CHECK(rec.size_bytes > 0);
        CHECK(rec.size_relative == doctest::Approx(double(rec.size_bytes) / double(rec.n)));
        CHECK(rec.answers_checksum > 0);
    }
}

TEST_CASE("both backends answer the same plcp query batch identically") {
    auto plain_rec = bench_plcp(small_config("plain"));
    auto hyb_rec = bench_plcp(small_config("hyb"));
    CHECK(plain_rec.answers_checksum == hyb_rec.answers_checksum);
}

TEST_CASE("both backends answer the same bwt select batch identically") {
    for (const char* shape : {"huff", "blcd"}) {
        auto mk = [&](const char* backend) {
            auto cfg = small_config(backend);
            cfg.shape = shape;
            return bench_bwt_select(cfg);
        };
        auto plain_rec = mk("plain");
        auto hyb_rec = mk("hyb");
        CHECK(plain_rec.structure == "bwt-select");
        CHECK(plain_rec.shape == shape);
        CHECK(plain_rec.answers_checksum == hyb_rec.answers_checksum);
        CHECK(plain_rec.answers_checksum > 0);
    }
}

TEST_CASE("benchmark timing and checksums are reproducible across runs") {
    auto a = bench_plcp(small_config("hyb"));
    auto b = bench_plcp(small_config("hyb"));
    CHECK(a.answers_checksum == b.answers_checksum);
    CHECK(a.size_bytes == b.size_bytes);
}

TEST_CASE("csv output follows the fixed schema") {
    std::ostringstream os;
    write_csv_header(os);
    auto rec = bench_plcp(small_config("plain"));
    write_csv_row(os, rec);
    std::istringstream is(os.str());
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(header == "text,n,structure,backend,bs,shape,build_ms,avg_query_ns,size_bytes,size_relative");
    CHECK(std::count(row.begin(), row.end(), ',') == 9);
    CHECK(row.substr(0, 6) == "probe,");
    CHECK(row.find(",plcp,plain,0,-,") != std::string::npos);
}

TEST_CASE("config validation rejects bad backends, shapes, and oversized inputs") {
    auto cfg = small_config("hyb");
    cfg.backend = "fast";
    CHECK_THROWS_AS(bench_plcp(cfg), std::invalid_argument);
    cfg = small_config("hyb");
    cfg.shape = "fibonacci";
    CHECK_THROWS_AS(bench_bwt_select(cfg), std::invalid_argument);
    cfg = small_config("plain");
    cfg.raw.assign(k_input_cap_bytes + 1, 'a');
    CHECK_THROWS_AS(bench_plcp(cfg), std::invalid_argument);
    cfg = small_config("plain");
    cfg.raw[7] = 0;  // interior sentinel byte
    CHECK_THROWS_AS(bench_plcp(cfg), std::invalid_argument);
}

TEST_CASE("structure files round-trip through the container header") {
    auto cfg = small_config("hyb");

    SUBCASE("plcp structure") {
        std::ostringstream os;
        auto h = build_structure_file(cfg, "plcp", os);
        CHECK(h.structure == 0);
        CHECK(h.backend == 1);
        CHECK(h.bs == 8);
        CHECK(h.shape == 0xff);
        CHECK(h.text_n == 20001);
        std::istringstream is(os.str());
        auto h2 = read_structure_header(is);
        CHECK(h2.structure == h.structure);
        CHECK(h2.backend == h.backend);
        CHECK(h2.bs == h.bs);
        CHECK(h2.text_n == h.text_n);
        auto v = hyb_vector::load(is);
        CHECK(v.size() == 2 * 20001);
        // spot-check a query against a fresh in-memory build
        text t(cfg.raw);
        auto sa = suffix_array(t);
        auto plcp = plcp_array(sa, lcp_array(t, sa));
        for (uint64_t j : gen_queries(5, t.size(), 200)) REQUIRE(plcp_query(v, j) == plcp[j - 1]);
    }

    SUBCASE("bwt-select structure") {
        cfg.shape = "blcd";
        std::ostringstream os;
        auto h = build_structure_file(cfg, "bwt-select", os);
        CHECK(h.structure == 1);
        CHECK(h.shape == 0);
        std::istringstream is(os.str());
        auto h2 = read_structure_header(is);
        CHECK(h2.structure == 1);
        auto wt = wavelet_tree<hyb_vector>::load(is);
        CHECK(wt.size() == 20001);
        CHECK(wt.shape() == wt_shape::balanced);
    }

    SUBCASE("unknown structure names are rejected") {
        std::ostringstream os;
        CHECK_THROWS_AS(build_structure_file(cfg, "fm-index", os), std::invalid_argument);
    }

    SUBCASE("corrupted container magic is rejected") {
        std::ostringstream os;
        build_structure_file(cfg, "plcp", os);
        std::string bad = os.str();
        bad[0] ^= 0x40;
        std::istringstream is(bad);
        CHECK_THROWS_AS(read_structure_header(is), format_error);
    }
}
