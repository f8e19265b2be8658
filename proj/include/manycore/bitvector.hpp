// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manycore/sim_error.hpp"

namespace manycore {

// Fixed-width little-endian bit vector used for wire-format packing.
// Field accessors address sub-ranges by LSB offset; fields are <= 64 bits.
class BitVector {
public:
    BitVector() = default;

    explicit BitVector(uint32_t width)
        : width_(width), words_((width + 63) / 64, 0) {}

    uint32_t width() const { return width_; }

    uint64_t get_field(uint32_t offset, uint32_t bits) const {
        check_range(offset, bits);
        uint64_t v = 0;
        for (uint32_t i = 0; i < bits; ++i) {
            uint32_t pos = offset + i;
            v |= uint64_t((words_[pos / 64] >> (pos % 64)) & 1u) << i;
        }
        return v;
    }

    void set_field(uint32_t offset, uint32_t bits, uint64_t value) {
        check_range(offset, bits);
        if (bits < 64 && (value >> bits) != 0)
            fail_config("bit field overflow: value 0x", std::hex, value,
                        " does not fit in ", std::dec, bits, " bits");
        for (uint32_t i = 0; i < bits; ++i) {
            uint32_t pos = offset + i;
            uint64_t mask = uint64_t(1) << (pos % 64);
            if ((value >> i) & 1)
                words_[pos / 64] |= mask;
            else
                words_[pos / 64] &= ~mask;
        }
    }

    // Hex string, zero padded to ceil(width/4) digits, most significant first.
    std::string to_hex() const {
        uint32_t digits = (width_ + 3) / 4;
        std::string out(digits, '0');
        for (uint32_t d = 0; d < digits; ++d) {
            uint32_t lo = d * 4;
            uint32_t n = lo + 4 <= width_ ? 4 : width_ - lo;
            uint64_t nib = get_field(lo, n);
            out[digits - 1 - d] = "0123456789abcdef"[nib];
        }
        return out;
    }

    static BitVector from_hex(uint32_t width, const std::string& hex) {
        BitVector bv(width);
        uint32_t digits = (width + 3) / 4;
        if (hex.size() != digits)
            fail_config("hex string '", hex, "' has ", hex.size(),
                        " digits, expected ", digits, " for width ", width);
        for (uint32_t d = 0; d < digits; ++d) {
            char c = hex[digits - 1 - d];
            uint64_t nib;
            if (c >= '0' && c <= '9') nib = uint64_t(c - '0');
            else if (c >= 'a' && c <= 'f') nib = uint64_t(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') nib = uint64_t(c - 'A' + 10);
            else fail_config("bad hex digit '", c, "'");
            uint32_t lo = d * 4;
            uint32_t n = lo + 4 <= width ? 4 : width - lo;
            if (n < 4 && (nib >> n) != 0)
                fail_config("hex string '", hex, "' overflows width ", width);
            bv.set_field(lo, n, nib);
        }
        return bv;
    }

    bool operator==(const BitVector& o) const {
        return width_ == o.width_ && words_ == o.words_;
    }
    bool operator!=(const BitVector& o) const { return !(*this == o); }

private:
    void check_range(uint32_t offset, uint32_t bits) const {
        if (bits == 0 || bits > 64 || offset + bits > width_)
            fail_config("bit range [", offset, ", ", offset + bits,
                        ") out of bounds for width ", width_);
    }

    uint32_t width_ = 0;
    std::vector<uint64_t> words_;
};

}  // namespace manycore
