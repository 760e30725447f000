#include <doctest.h>

#include <random>

#include <hybsel/bits.hpp>

#include "test_support.hpp"

using namespace hybsel;

TEST_CASE("popcount_word on fixed words") {
    CHECK(popcount_word(0x0) == 0);
    CHECK(popcount_word(~uint64_t(0)) == 64);
    CHECK(popcount_word(0xF0F0) == 8);
    CHECK(popcount_word(uint64_t(1) << 63) == 1);
}

TEST_CASE("select_in_word on fixed words") {
    CHECK(select_in_word(0b1, 1) == 1);
    CHECK(select_in_word(0b101000, 1) == 4);
    CHECK(select_in_word(0b101000, 2) == 6);
    CHECK(select_in_word(~uint64_t(0), 64) == 64);
    CHECK(select_in_word(uint64_t(1) << 63, 1) == 64);
}

TEST_CASE("select_in_word matches a bit scan on random words") {
    std::mt19937_64 rng(42);
    for (int t = 0; t < 100000; ++t) {
        uint64_t w = rng();
        if (t % 3 == 0) w &= rng();  // mix in sparser words
        uint32_t pc = popcount_word(w);
        if (pc == 0) continue;
        uint32_t k = uint32_t(rng() % pc) + 1;
        uint32_t seen = 0, expect = 0;
        for (uint32_t pos = 1; pos <= 64; ++pos)
            if ((w >> (pos - 1)) & 1 && ++seen == k) {
                expect = pos;
                break;
            }
        REQUIRE(select_in_word(w, k) == expect);
    }
}

TEST_CASE("packed_bits set/get round-trip and word layout") {
    packed_bits b(130);
    CHECK(b.size() == 130);
    CHECK(b.num_words() == 3);
    b.set(1, true);
    b.set(64, true);
    b.set(65, true);
    b.set(130, true);
    CHECK(b.get(1));
    CHECK(b.get(64));
    CHECK(b.get(65));
    CHECK(b.get(130));
    CHECK_FALSE(b.get(2));
    CHECK_FALSE(b.get(129));
    CHECK(b.word(0) == ((uint64_t(1) << 63) | 1));
    CHECK(b.word(1) == 1);
    CHECK(b.word(2) == 2);  // bit 130 is the second bit of the third word
    b.set(64, false);
    CHECK_FALSE(b.get(64));
    CHECK(b.count_ones() == 3);
}

TEST_CASE("packed_bits from_words rebuilds an equal vector") {
    auto b = testsup::random_bits(1000, 0.3, 7);
    auto words = b.words();
    auto b2 = packed_bits::from_words(b.size(), std::move(words));
    CHECK(b == b2);
}
