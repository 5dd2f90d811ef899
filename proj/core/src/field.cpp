// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/field.hpp"

#include <bit>
#include <stdexcept>

namespace maskeq {

static unsigned degree(std::uint32_t p) {
    return p ? std::bit_width(p) - 1 : 0;
}

// remainder of carry-less division a mod b
static std::uint32_t clmod(std::uint64_t a, std::uint32_t b) {
    unsigned db = degree(b);
    while (a && degree(static_cast<std::uint32_t>(a)) >= db && a >> db) {
        unsigned da = 63 - std::countl_zero(a);
        a ^= static_cast<std::uint64_t>(b) << (da - db);
    }
    return static_cast<std::uint32_t>(a);
}

bool Field::check_irreducible(std::uint32_t poly) {
    unsigned d = degree(poly);
    if (d < 1) return false;
    for (std::uint32_t q = 2; degree(q) <= d / 2; ++q)
        if (clmod(poly, q) == 0) return false;
    return true;
}

Field::Field(unsigned n, std::uint32_t poly) : n_(n), poly_(poly) {
    if (n < 1 || n > 16)
        throw std::invalid_argument("field width must be in [1,16]");
    if (degree(poly) != n)
        throw std::invalid_argument("modulus must have degree exactly n");
    if (!check_irreducible(poly))
        throw std::invalid_argument("modulus is reducible");
    if (n_ <= 8) {
        // find a generator, then fill log/antilog
        std::uint32_t N = size();
        for (Elem g = 2; g < N; ++g) {
            std::vector<std::uint16_t> log(N, 0), alog(N - 1, 0);
            Elem x = 1;
            std::uint32_t i = 0;
            for (; i < N - 1; ++i) {
                if (x == 1 && i > 0) break; // g's order < N-1
                alog[i] = static_cast<std::uint16_t>(x);
                log[x] = static_cast<std::uint16_t>(i);
                x = mul(x, g);
            }
            if (i == N - 1 && x == 1) {
                log_ = std::move(log);
                alog_ = std::move(alog);
                break;
            }
        }
    }
}

Elem Field::pow(Elem a, std::uint64_t k) const {
    Elem r = 1;
    while (k) {
        if (k & 1) r = mul(r, a);
        a = mul(a, a);
        k >>= 1;
    }
    return r;
}

std::uint64_t Field::reduce_exponent(std::uint64_t k) const {
    if (k == 0) throw std::invalid_argument("exponent 0 has no monomial form");
    return (k - 1) % order() + 1;
}

Elem Field::mul_via_tables(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    std::uint32_t s = log_[a] + log_[b];
    return alog_[s % order()];
}

} // namespace maskeq
