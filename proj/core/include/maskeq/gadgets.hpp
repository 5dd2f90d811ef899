// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace maskeq {

// Generators for the benchmark gadget family. Each returns a complete
// program: field directive, any needed affine definitions, and the
// procedure(s) at masking order d (d+1 shares).

// pairwise-random multiplication: randoms r_{i,j} for i<j, the reflected
// r_{j,i} folded with the cross products, then per-share accumulation
std::string gen_isw_mult(int d, unsigned n = 8, std::uint32_t poly = 0x11B);

// one shared random, XORed into every share above 0; share 0 absorbs all
// the occurrences so the encoded value is unchanged
std::string gen_refresh_masks(int d, unsigned n = 8,
                              std::uint32_t poly = 0x11B);

// a fresh random per share above 0; share 0 absorbs them all
std::string gen_refreshm(int d, unsigned n = 8, std::uint32_t poly = 0x11B);

// the inversion exponentiation chain (x^254 for n=8) over masked
// multiplications, share-wise squarings and refreshes
std::string gen_aes_sbox_inverse(int d, unsigned n = 8,
                                 std::uint32_t poly = 0x11B);

// dispatch by kind: isw-mult | refreshm | refresh-masks | aes-sbox-inverse
std::string gen_gadget(const std::string& kind, int d, unsigned n = 8,
                       std::uint32_t poly = 0x11B);

} // namespace maskeq
