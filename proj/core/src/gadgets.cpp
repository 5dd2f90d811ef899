// maskeq: equivalence checking for masked finite-field programs
// SPDX-License-Identifier: Apache-2.0
#include "maskeq/gadgets.hpp"

#include <sstream>

#include "maskeq/diag.hpp"

namespace maskeq {

namespace {

void check_order(int d) {
    if (d < 0 || d > 200)
        throw SemanticError("masking order must be between 0 and 200, got " +
                            std::to_string(d));
}

std::string hex(std::uint32_t v) {
    std::ostringstream os;
    os << "0x" << std::uppercase << std::hex << v;
    return os.str();
}

void emit_field(std::ostringstream& os, unsigned n, std::uint32_t poly) {
    os << "field " << n << " " << hex(poly) << ";\n\n";
}

// the masked multiplication body, shared by sec_mult and the s-box program
void emit_isw_body(std::ostringstream& os, int d) {
    for (int i = 0; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            os << "    r" << i << "_" << j << " <- rand;\n";
    for (int i = 0; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            os << "    r" << j << "_" << i << " <- (r" << i << "_" << j
               << " ^ a" << i << " * b" << j << ") ^ a" << j << " * b" << i
               << ";\n";
    for (int i = 0; i <= d; ++i) {
        os << "    c" << i << " <- a" << i << " * b" << i;
        for (int j = 0; j <= d; ++j)
            if (j != i) os << " ^ r" << i << "_" << j;
        os << ";\n";
    }
}

void emit_sec_mult(std::ostringstream& os, int d) {
    os << "proc sec_mult(a, b) -> c {\n";
    os << "    c <- a * b;\n";
    os << "shares " << d + 1 << ";\n";
    emit_isw_body(os, d);
    os << "}\n";
}

void emit_refreshm(std::ostringstream& os, int d) {
    os << "proc refreshm(x) -> y {\n";
    os << "    y <- x;\n";
    os << "shares " << d + 1 << ";\n";
    for (int i = 1; i <= d; ++i) os << "    r" << i << " <- rand;\n";
    for (int i = 1; i <= d; ++i)
        os << "    y" << i << " <- x" << i << " ^ r" << i << ";\n";
    os << "    y0 <- x0";
    for (int i = 1; i <= d; ++i) os << " ^ r" << i;
    os << ";\n";
    os << "}\n";
}

} // namespace

std::string gen_isw_mult(int d, unsigned n, std::uint32_t poly) {
    check_order(d);
    std::ostringstream os;
    emit_field(os, n, poly);
    emit_sec_mult(os, d);
    return os.str();
}

std::string gen_refresh_masks(int d, unsigned n, std::uint32_t poly) {
    check_order(d);
    std::ostringstream os;
    emit_field(os, n, poly);
    os << "proc refresh_masks(x) -> y {\n";
    os << "    y <- x;\n";
    os << "shares " << d + 1 << ";\n";
    if (d > 0) os << "    r <- rand;\n";
    for (int i = 1; i <= d; ++i)
        os << "    y" << i << " <- x" << i << " ^ r;\n";
    os << "    y0 <- x0";
    for (int i = 1; i <= d; ++i) os << " ^ r";
    os << ";\n";
    os << "}\n";
    return os.str();
}

std::string gen_refreshm(int d, unsigned n, std::uint32_t poly) {
    check_order(d);
    std::ostringstream os;
    emit_field(os, n, poly);
    emit_refreshm(os, d);
    return os.str();
}

std::string gen_aes_sbox_inverse(int d, unsigned n, std::uint32_t poly) {
    check_order(d);
    std::ostringstream os;
    emit_field(os, n, poly);
    os << "affine exp2(x) -> y {\n"
          "    y <- x * x;\n"
          "}\n\n";
    os << "affine exp4(x) -> y {\n"
          "    y <- exp2(exp2(x));\n"
          "}\n\n";
    os << "affine exp16(x) -> y {\n"
          "    y <- exp4(exp4(x));\n"
          "}\n\n";
    emit_sec_mult(os, d);
    os << "\n";
    emit_refreshm(os, d);
    os << "\n";
    os << "proc sec_exp254(x) -> y {\n";
    os << "    z <- exp2(x);\n"
          "    y <- z * x;\n"
          "    w <- exp4(y);\n"
          "    y <- y * w;\n"
          "    y <- exp16(y);\n"
          "    y <- y * w;\n"
          "    y <- y * z;\n";
    os << "shares " << d + 1 << ";\n";
    os << "    z <- exp2(x);\n"
          "    z <- refreshm(z);\n"
          "    y <- sec_mult(z, x);\n"
          "    w <- exp4(y);\n"
          "    w <- refreshm(w);\n"
          "    y <- sec_mult(y, w);\n"
          "    y <- exp16(y);\n"
          "    y <- sec_mult(y, w);\n"
          "    y <- sec_mult(y, z);\n";
    os << "}\n";
    return os.str();
}

std::string gen_gadget(const std::string& kind, int d, unsigned n,
                       std::uint32_t poly) {
    if (kind == "isw-mult") return gen_isw_mult(d, n, poly);
    if (kind == "refreshm") return gen_refreshm(d, n, poly);
    if (kind == "refresh-masks") return gen_refresh_masks(d, n, poly);
    if (kind == "aes-sbox-inverse") return gen_aes_sbox_inverse(d, n, poly);
    throw SemanticError("unknown gadget kind '" + kind +
                        "' (expected isw-mult, refreshm, refresh-masks or "
                        "aes-sbox-inverse)");
}

} // namespace maskeq
