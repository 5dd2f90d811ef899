// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "maskeq/field.hpp"
#include "testutil.hpp"

using namespace maskeq;

TEST_CASE("field construction accepts the stock moduli") {
    CHECK(Field::aes().width() == 8);
    CHECK(Field::aes().modulus() == 0x11B);
    CHECK(Field::present().size() == 16);
    CHECK(Field(16, 0x1002B).order() == 65535);
    CHECK(Field(1, 0x3).mask() == 1);
}

TEST_CASE("field construction rejects bad moduli") {
    CHECK_THROWS_AS(Field(8, 0x11C), std::invalid_argument); // reducible
    CHECK_THROWS_AS(Field(8, 0x1B), std::invalid_argument);  // degree 7
    CHECK_THROWS_AS(Field(8, 0x21B), std::invalid_argument); // degree 9
    CHECK_THROWS_AS(Field(0, 0x1), std::invalid_argument);
    CHECK_THROWS_AS(Field(17, 0x20000 | 0x9), std::invalid_argument);
    CHECK_THROWS_AS(Field(4, 0x18), std::invalid_argument); // X^4+X^3 = X^3(X+1)
}

TEST_CASE("irreducibility screen matches the classic lists") {
    // all degree-4 irreducibles over GF(2)
    CHECK(Field::check_irreducible(0x13)); // X^4+X+1
    CHECK(Field::check_irreducible(0x19)); // X^4+X^3+1
    CHECK(Field::check_irreducible(0x1F)); // X^4+X^3+X^2+X+1
    CHECK_FALSE(Field::check_irreducible(0x11)); // (X^2+X+1)^2
    CHECK_FALSE(Field::check_irreducible(0x15));
    CHECK_FALSE(Field::check_irreducible(0x1B));
    CHECK_FALSE(Field::check_irreducible(0x1D));
}

TEST_CASE("aes multiplication hits the textbook example") {
    Field f = Field::aes();
    CHECK(f.mul(0x57, 0x83) == 0xC1);
    CHECK(f.mul(0x53, 0xCA) == 0x01); // mutual inverses
    CHECK(f.mul(0x02, 0x87) == 0x15); // xtime across the modulus
}

TEST_CASE("multiplication agrees with the schoolbook oracle") {
    Field f4 = Field::present();
    for (Elem a = 0; a < 16; ++a)
        for (Elem b = 0; b < 16; ++b)
            CHECK(f4.mul(a, b) == test::naive_mul(4, 0x13, a, b));

    Field f8 = Field::aes();
    std::mt19937_64 rng(7);
    for (int i = 0; i < 4000; ++i) {
        Elem a = rng() & 0xFF, b = rng() & 0xFF;
        CHECK(f8.mul(a, b) == test::naive_mul(8, 0x11B, a, b));
    }

    Field f16(16, 0x1002B);
    for (int i = 0; i < 2000; ++i) {
        Elem a = rng() & 0xFFFF, b = rng() & 0xFFFF;
        CHECK(f16.mul(a, b) == test::naive_mul(16, 0x1002B, a, b));
    }
}

TEST_CASE("field axioms hold at sampled points") {
    Field f = Field::aes();
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        Elem a = rng() & 0xFF, b = rng() & 0xFF, c = rng() & 0xFF;
        CHECK(f.mul(a, b) == f.mul(b, a));
        CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
        CHECK(f.mul(a, b ^ c) == (f.mul(a, b) ^ f.mul(a, c)));
        CHECK(f.mul(a, 1) == a);
        CHECK(f.mul(a, 0) == 0);
    }
}

TEST_CASE("log tables reproduce the peasant product") {
    Field f8 = Field::aes();
    REQUIRE(f8.has_log_tables());
    for (Elem a = 0; a < 256; ++a)
        for (Elem b = 0; b < 256; b += 3)
            CHECK(f8.mul_via_tables(a, b) == f8.mul(a, b));

    Field f4 = Field::present();
    REQUIRE(f4.has_log_tables());
    for (Elem a = 0; a < 16; ++a)
        for (Elem b = 0; b < 16; ++b)
            CHECK(f4.mul_via_tables(a, b) == f4.mul(a, b));

    CHECK_FALSE(Field(16, 0x1002B).has_log_tables());
}

TEST_CASE("pow and exponent reduction") {
    Field f = Field::present();
    for (Elem a = 0; a < 16; ++a) {
        CHECK(f.pow(a, 0) == 1);
        CHECK(f.pow(a, 1) == a);
        CHECK(f.pow(a, 2) == f.mul(a, a));
        // Frobenius fixed point of the full field: x^(2^n) = x
        CHECK(f.pow(a, 16) == a);
        if (a != 0) CHECK(f.pow(a, 15) == 1);
    }

    CHECK(f.reduce_exponent(1) == 1);
    CHECK(f.reduce_exponent(15) == 15);
    CHECK(f.reduce_exponent(16) == 1);
    CHECK(f.reduce_exponent(30) == 15);
    CHECK(f.reduce_exponent(31) == 1);

    // reduced exponent computes the same power everywhere, 0 included
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        std::uint64_t k = 1 + rng() % 10000;
        std::uint64_t r = f.reduce_exponent(k);
        CHECK(r >= 1);
        CHECK(r <= 15);
        for (Elem a = 0; a < 16; ++a) CHECK(f.pow(a, k) == f.pow(a, r));
    }
}
