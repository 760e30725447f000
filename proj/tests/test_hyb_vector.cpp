#include <doctest.h>

#include <cstdlib>
#include <random>
#include <sstream>

#include <hybsel/hyb_vector.hpp>
#include <hybsel/plain_bitvector.hpp>

#include "test_support.hpp"

using namespace hybsel;

namespace {

// every valid superblock size
const uint32_t k_all_bs[] = {8, 16, 32, 64};

void check_against_oracle(const hyb_vector& v, const packed_bits& bits, uint64_t probes, uint64_t seed) {
    plain_bit_vector oracle(bits);
    REQUIRE(v.size() == bits.size());
    REQUIRE(v.count(true) == oracle.count(true));
    std::mt19937_64 rng(seed);
    uint64_t n = v.size();
    for (uint64_t t = 0; t < probes; ++t) {
        uint64_t i = rng() % (n + 1);
        REQUIRE(v.rank(true, i) == oracle.rank(true, i));
        REQUIRE(v.rank(false, i) == oracle.rank(false, i));
        if (i >= 1) REQUIRE(v.access(i) == oracle.access(i));
    }
    for (bool c : {false, true}) {
        uint64_t total = v.count(c);
        for (uint64_t t = 0; t < probes && total > 0; ++t) {
            uint64_t j = rng() % total + 1;
            REQUIRE(v.select(c, j) == oracle.select(c, j));
        }
    }
}

}  // namespace

TEST_CASE("hyb_vector rejects invalid build parameters") {
    packed_bits bits(100);
    CHECK_THROWS_AS(hyb_vector(bits, hyb_params{.blocks_per_superblock = 10}), std::invalid_argument);
    CHECK_THROWS_AS(hyb_vector(bits, hyb_params{.blocks_per_superblock = 0}), std::invalid_argument);
    CHECK_THROWS_AS(hyb_vector(bits, hyb_params{.select_space_param = 0}), std::invalid_argument);
}

TEST_CASE("hyb_vector on the empty vector") {
    hyb_vector v{packed_bits(0)};
    CHECK(v.size() == 0);
    CHECK(v.count(true) == 0);
    CHECK(v.rank(true, 0) == 0);
    CHECK(v.payload_size() == 0);
    CHECK(v.select_table(true).empty());
    CHECK_THROWS_AS(v.select(true, 1), std::out_of_range);
    CHECK_THROWS_AS(v.access(1), std::out_of_range);
}

TEST_CASE("hyb_vector on all zeros") {
    uint64_t n = uint64_t(1) << 18;
    hyb_vector v{packed_bits(n)};
    CHECK(v.size() == n);
    CHECK(v.count(true) == 0);
    CHECK(v.payload_size() == 0);  // uniform blocks carry no payload
    CHECK(v.rank(true, n) == 0);
    CHECK(v.rank(false, n) == n);
    CHECK(v.access(12345) == false);
    CHECK(v.select(false, 1) == 1);
    CHECK(v.select(false, n) == n);
    CHECK(v.select_table(true).empty());
    CHECK_THROWS_AS(v.select(true, 1), std::out_of_range);
    // headers dominate the footprint and stay far below the raw bits
    CHECK(v.size_in_bytes() < n / 64);
}

TEST_CASE("hyb_vector single one") {
    packed_bits bits(100000);
    bits.set(77777, true);
    hyb_vector v(bits);
    CHECK(v.count(true) == 1);
    CHECK(v.select(true, 1) == 77777);
    CHECK(v.rank(true, 77776) == 0);
    CHECK(v.rank(true, 77777) == 1);
    CHECK(v.select(false, 77777) == 77778);
}

TEST_CASE("hyb_vector access reproduces the source bits") {
    auto bits = testsup::random_bits(uint64_t(1) << 18, 0.37, 404);
    hyb_vector v(bits);
    std::mt19937_64 rng(405);
    for (int t = 0; t < 20000; ++t) {
        uint64_t i = rng() % bits.size() + 1;
        REQUIRE(v.access(i) == bits.get(i));
    }
    CHECK_THROWS_AS(v.access(0), std::out_of_range);
    CHECK_THROWS_AS(v.access(bits.size() + 1), std::out_of_range);
}

TEST_CASE("hyb_vector matches the plain oracle across input families and superblock sizes") {
    uint64_t n = (uint64_t(1) << 17) + 333;  // partial final block and superblock
    int family = 0;
    for (auto make : {+[](uint64_t n) { return testsup::random_bits(n, 0.5, 1); },
                      +[](uint64_t n) { return testsup::random_bits(n, 0.01, 2); },
                      +[](uint64_t n) { return testsup::random_bits(n, 0.99, 3); },
                      +[](uint64_t n) { return testsup::run_bits(n, 4000, 4); },
                      +[](uint64_t n) { return testsup::run_bits(n, 3, 5); }}) {
        auto bits = make(n);
        for (uint32_t bs : k_all_bs) {
            hyb_vector v(bits, hyb_params{.blocks_per_superblock = bs});
            check_against_oracle(v, bits, 600, 1000 + family);
        }
        ++family;
    }
}

TEST_CASE("hyb_vector select is consistent with rank and access") {
    auto bits = testsup::run_bits(200000, 700, 17);
    hyb_vector v(bits);
    std::mt19937_64 rng(18);
    for (bool c : {false, true})
        for (int t = 0; t < 2000; ++t) {
            uint64_t j = rng() % v.count(c) + 1;
            uint64_t pos = v.select(c, j);
            REQUIRE(v.access(pos) == c);
            REQUIRE(v.rank(c, pos) == j);
        }
}

TEST_CASE("hyb_vector rank and select argument validation") {
    auto bits = testsup::random_bits(5000, 0.5, 19);
    hyb_vector v(bits);
    CHECK_THROWS_AS(v.rank(true, 5001), std::out_of_range);
    CHECK_THROWS_AS(v.select(true, 0), std::out_of_range);
    CHECK_THROWS_AS(v.select(true, v.count(true) + 1), std::out_of_range);

    hyb_vector no_zero_index(bits, hyb_params{.build_select0 = false});
    CHECK(no_zero_index.has_select_index(true));
    CHECK_FALSE(no_zero_index.has_select_index(false));
    CHECK(no_zero_index.select(true, 1) == v.select(true, 1));
    CHECK_THROWS_AS(no_zero_index.select(false, 1), std::logic_error);
}

TEST_CASE("select index shape: sampled entries bracket occurrences") {
    auto bits = testsup::random_bits(uint64_t(1) << 16, 0.23, 23);
    hyb_vector v(bits);
    for (bool c : {false, true}) {
        const select_index& idx = v.select_table(c);
        const auto& table = idx.table();
        REQUIRE(table.size() >= 2);
        CHECK(table.back() == v.superblock_count());
        for (size_t k = 1; k < table.size(); ++k) CHECK(table[k - 1] <= table[k]);
        // every entry but the last names the superblock of its sampled occurrence
        plain_bit_vector oracle(bits);
        uint64_t sb_bits = uint64_t(v.blocks_per_superblock()) * 256;
        for (size_t i = 1; i + 1 <= table.size(); ++i) {
            uint64_t j = idx.interval() * (i - 1) + 1;
            if (j > v.count(c)) break;
            CHECK(table[i - 1] == (oracle.select(c, j) - 1) / sb_bits + 1);
        }
    }
}

TEST_CASE("select index degenerate sizing at small n") {
    // n small enough that the table is capped at two entries
    auto bits = testsup::random_bits(8192, 0.5, 29);
    hyb_vector v(bits);
    for (bool c : {false, true}) {
        const select_index& idx = v.select_table(c);
        uint64_t total = v.count(c);
        REQUIRE(idx.table().size() == 2);
        CHECK(idx.interval() == total);  // one sample plus the terminator
        CHECK(idx.table()[1] == v.superblock_count());
    }
    check_against_oracle(v, bits, 400, 30);
}

TEST_CASE("select index space law on random inputs") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 25; ++t) {
        uint64_t n = (uint64_t(1) << 14) + rng() % (uint64_t(1) << 17);
        double p = 0.05 + 0.9 * double(rng()) / double(UINT64_MAX);
        auto bits = testsup::random_bits(n, p, rng());
        bits.set(1, false);
        bits.set(2, true);  // both values occur
        uint32_t bs = k_all_bs[t % 4];
        hyb_vector v(bits, hyb_params{.blocks_per_superblock = bs});
        for (bool c : {false, true}) {
            uint64_t entries = v.select_table(c).table().size();
            CHECK(64 * entries <= n / 128);
        }
    }
}

TEST_CASE("find_superblock pins down occurrences") {
    // c-bits confined to a few superblocks force long empty stretches,
    // adversarial for the bracketed binary search
    uint64_t n = uint64_t(1) << 18;
    packed_bits bits(n);
    std::mt19937_64 rng(37);
    for (uint64_t k = 0; k < 200; ++k) {
        uint64_t cluster = (rng() % 8) * (n / 8);
        bits.set(cluster + rng() % 3000 + 1, true);
    }
    hyb_vector v(bits);
    plain_bit_vector oracle(bits);
    uint64_t sb_bits = uint64_t(v.blocks_per_superblock()) * 256;
    for (bool c : {false, true}) {
        uint64_t total = v.count(c);
        // q = 1 must land exactly on the first sampled superblock
        CHECK(v.find_superblock(c, 1).superblock == v.select_table(c).table()[0]);
        for (int t = 0; t < 1500; ++t) {
            uint64_t q = rng() % total + 1;
            auto loc = v.find_superblock(c, q);
            uint64_t expect = (oracle.select(c, q) - 1) / sb_bits + 1;  // linear-scan truth
            REQUIRE(loc.superblock == expect);
            REQUIRE(loc.hyper_rank + loc.super_rank == oracle.rank(c, (loc.superblock - 1) * sb_bits));
        }
    }
}

TEST_CASE("scan_block_headers stops at the right block") {
    uint64_t bs = 16;
    uint64_t n = bs * 256 * 5 + 300;  // partial final superblock: one full block + 44 bits
    auto bits = testsup::random_bits(n, 0.5, 41);
    hyb_vector v(bits, hyb_params{.blocks_per_superblock = uint32_t(bs)});
    plain_bit_vector oracle(bits);

    // first c-bit of a superblock: zero sums
    for (bool c : {false, true}) {
        auto bl = v.scan_block_headers(1, c, 1);
        CHECK(bl.rank_sum == 0);
        CHECK(bl.offset_sum == 0);
        CHECK(bl.block == (oracle.select(c, 1) - 1) / 256 + 1);
    }

    // queries into the final partial superblock, including its last block
    uint64_t last_sb = v.superblock_count();
    uint64_t before = oracle.rank(true, (last_sb - 1) * bs * 256);
    uint64_t inside = oracle.count(true) - before;
    REQUIRE(inside > 0);
    for (uint64_t q_res = 1; q_res <= inside; q_res += 7) {
        auto bl = v.scan_block_headers(last_sb, true, q_res);
        uint64_t expect_block = (oracle.select(true, before + q_res) - 1) / 256 + 1;
        REQUIRE(bl.block == expect_block);
        REQUIRE(bl.rank_sum == oracle.rank(true, (bl.block - 1) * 256) - before);
    }
}

TEST_CASE("shortcut paths agree with the general path") {
    // giant aligned runs: every superblock is uniform
    uint64_t sb_bits = 16 * 256;
    uint64_t n = sb_bits * 64;
    packed_bits uniform(n);
    for (uint64_t k = 0; k < 64; k += 2)
        for (uint64_t i = k * sb_bits + 1; i <= (k + 1) * sb_bits; ++i) uniform.set(i, true);

    // every block has exactly two runs, superblocks are mixed
    packed_bits tworun(n);
    for (uint64_t b = 0; b < n / 256; ++b) {
        uint64_t len = b * 37 % 255 + 1;
        for (uint64_t i = 1; i <= len; ++i) tworun.set(b * 256 + i, true);
    }

    for (const packed_bits* bits : {&uniform, &tworun}) {
        hyb_vector v(*bits);
        plain_bit_vector oracle(*bits);
        std::mt19937_64 rng(43);
        for (bool c : {false, true}) {
            uint64_t total = v.count(c);
            for (int t = 0; t < 1200; ++t) {
                uint64_t j = rng() % total + 1;
                uint64_t expect = oracle.select(c, j);
                set_select_shortcuts_disabled(false);
                uint64_t fast = v.select(c, j);
                set_select_shortcuts_disabled(true);
                uint64_t slow = v.select(c, j);
                set_select_shortcuts_disabled(false);
                REQUIRE(fast == expect);
                REQUIRE(slow == expect);
            }
        }
    }
}

TEST_CASE("shortcut override follows the environment variable") {
    set_select_shortcuts_disabled(false);
    setenv("HYBSEL_DISABLE_SHORTCUTS", "1", 1);
    refresh_select_shortcuts_from_env();
    CHECK(select_shortcuts_disabled());
    setenv("HYBSEL_DISABLE_SHORTCUTS", "0", 1);
    refresh_select_shortcuts_from_env();
    CHECK_FALSE(select_shortcuts_disabled());
    unsetenv("HYBSEL_DISABLE_SHORTCUTS");
    refresh_select_shortcuts_from_env();
    CHECK_FALSE(select_shortcuts_disabled());
}

TEST_CASE("hyb_vector serialization round-trip and rejection") {
    auto bits = testsup::run_bits((uint64_t(1) << 17) + 100, 900, 47);
    hyb_vector v(bits, hyb_params{.blocks_per_superblock = 32});
    std::ostringstream os;
    v.serialize(os);
    std::string data = os.str();
    CHECK(data.size() == v.size_in_bytes());

    std::istringstream is(data);
    hyb_vector w = hyb_vector::load(is);
    CHECK(w.size() == v.size());
    CHECK(w.count(true) == v.count(true));
    CHECK(w.blocks_per_superblock() == 32);
    std::mt19937_64 rng(48);
    for (int t = 0; t < 1500; ++t) {
        uint64_t i = rng() % v.size() + 1;
        REQUIRE(w.access(i) == v.access(i));
        REQUIRE(w.rank(true, i) == v.rank(true, i));
    }
    for (bool c : {false, true})
        for (int t = 0; t < 400; ++t) {
            uint64_t j = rng() % v.count(c) + 1;
            REQUIRE(w.select(c, j) == v.select(c, j));
        }

    SUBCASE("corrupted magic is rejected") {
        std::string bad = data;
        bad[3] ^= 0x40;
        std::istringstream bs(bad);
        CHECK_THROWS_AS(hyb_vector::load(bs), format_error);
    }
    SUBCASE("bad version is rejected") {
        std::string bad = data;
        bad[8] = 9;
        std::istringstream bs(bad);
        CHECK_THROWS_AS(hyb_vector::load(bs), format_error);
    }
    SUBCASE("bad superblock size is rejected") {
        std::string bad = data;
        bad[20] = 5;  // B_s byte right after magic, version, n
        std::istringstream bs(bad);
        CHECK_THROWS_AS(hyb_vector::load(bs), format_error);
    }
    SUBCASE("truncation is rejected") {
        std::istringstream bs(data.substr(0, data.size() - 9));
        CHECK_THROWS_AS(hyb_vector::load(bs), format_error);
    }
}

TEST_CASE("hyb_vector serialized empty vector is header-only") {
    hyb_vector v{packed_bits(0)};
    std::ostringstream os;
    v.serialize(os);
    // fixed header (28) + three zero counts (24) + two empty select indexes (32)
    CHECK(os.str().size() == 84);
    CHECK(v.size_in_bytes() == 84);
    std::istringstream is(os.str());
    hyb_vector w = hyb_vector::load(is);
    CHECK(w.size() == 0);
}

TEST_CASE("size_in_bytes equals the stream length across configurations") {
    std::mt19937_64 rng(53);
    for (uint32_t bs : k_all_bs) {
        auto bits = testsup::random_bits(30000 + rng() % 5000, 0.1, rng());
        hyb_vector v(bits, hyb_params{.blocks_per_superblock = bs, .build_select0 = (bs != 32)});
        std::ostringstream os;
        v.serialize(os);
        CHECK(os.str().size() == v.size_in_bytes());
    }
}

TEST_CASE("compressible inputs serialize small") {
    // all-zero input: headers only
    uint64_t n = uint64_t(1) << 20;
    hyb_vector zeros{packed_bits(n)};
    CHECK(zeros.size_in_bytes() * 8 < n / 8);

    // 16 Mbit vector whose blocks all have at most 10 runs: payload must
    // stay within 8 bytes per block, a quarter of the plain encoding
    uint64_t big_n = uint64_t(1) << 24;
    packed_bits runs(big_n);
    std::mt19937_64 rng(57);
    for (uint64_t b = 0; b < big_n / 256; ++b) {
        uint64_t nruns = rng() % 9 + 1;  // tail fill may add one more, keeping the total <= 10
        bool v = rng() & 1;
        uint64_t at = 1;
        for (uint64_t r = 0; r < nruns && at <= 256; ++r) {
            uint64_t len = rng() % (256 / nruns) + 1;
            for (uint64_t k = 0; k < len && at <= 256; ++k, ++at)
                if (v) runs.set(b * 256 + at, true);
            v = !v;
        }
        if (v && at <= 256)
            for (; at <= 256; ++at) runs.set(b * 256 + at, true);
    }
    hyb_vector rv(runs);
    CHECK(rv.payload_size() <= 8 * (big_n / 256));
    check_against_oracle(rv, runs, 300, 58);
}
