// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace maskeq {

using Elem = std::uint32_t; // value of a GF(2^n) element, always < 2^n

// GF(2^n) = GF(2)[X]/(P), n <= 16. Addition is XOR, multiplication is
// carry-less product reduced mod P (Russian peasant). Immutable once built.
class Field {
public:
    // poly is the (n+1)-bit modulus with bit n set, e.g. n=8, poly=0x11B.
    // Throws std::invalid_argument if the width is off or poly is reducible.
    Field(unsigned n, std::uint32_t poly);

    static Field aes() { return Field(8, 0x11B); }     // AES field
    static Field present() { return Field(4, 0x13); }  // GF(16), X^4+X+1

    unsigned width() const { return n_; }
    std::uint32_t modulus() const { return poly_; }
    std::uint32_t size() const { return 1u << n_; }      // 2^n
    std::uint32_t order() const { return size() - 1; }   // 2^n - 1
    Elem mask() const { return size() - 1; }

    static Elem add(Elem a, Elem b) { return a ^ b; }

    Elem mul(Elem a, Elem b) const {
        Elem acc = 0;
        while (b) {
            if (b & 1) acc ^= a;
            a <<= 1;
            if (a & size()) a ^= poly_;
            b >>= 1;
        }
        return acc;
    }

    // a^k by square-and-multiply; a^0 = 1 for every a, including a = 0.
    Elem pow(Elem a, std::uint64_t k) const;

    // Smallest exponent in [1, 2^n-1] with x^k = x^result for all x.
    // ((k-1) mod (2^n-1)) + 1: never maps to 0, so 0^k stays 0.
    std::uint64_t reduce_exponent(std::uint64_t k) const;

    // Trial division by every polynomial of degree in [1, deg/2].
    static bool check_irreducible(std::uint32_t poly);

    // Log/antilog tables exist for n <= 8 (test cross-check of mul).
    bool has_log_tables() const { return !log_.empty(); }
    Elem mul_via_tables(Elem a, Elem b) const;

private:
    unsigned n_;
    std::uint32_t poly_;
    std::vector<std::uint16_t> log_, alog_;
};

} // namespace maskeq
