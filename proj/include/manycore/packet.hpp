// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "manycore/bitvector.hpp"

namespace manycore {

// Grid position. X grows eastward, Y grows southward; the south IO row sits
// at y == mesh rows.
struct Coordinate {
    uint32_t x = 0;
    uint32_t y = 0;

    bool operator==(const Coordinate&) const = default;
};

inline uint64_t coord_key(Coordinate c) {
    return (uint64_t(c.y) << 32) | c.x;
}

inline bool operator<(Coordinate a, Coordinate b) {
    return coord_key(a) < coord_key(b);
}

std::string to_string(Coordinate c);

enum class OpCode : uint8_t {
    RemoteLoad   = 0b00,
    RemoteStore  = 0b01,
    RemoteSwapAq = 0b10,
    RemoteSwapRl = 0b11,
};

const char* to_string(OpCode op);
OpCode opcode_from_bits(uint64_t bits);

// Forward-path request word. Field widths are fixed by PacketFormat; values
// here are kept in plain integers and range-checked on encode.
struct Packet {
    uint64_t addr = 0;   // word-granularity local address
    OpCode op = OpCode::RemoteLoad;
    uint64_t op_ex = 0;  // byte mask, one bit per data byte
    uint64_t data = 0;
    Coordinate src;
    Coordinate dest;

    bool operator==(const Packet&) const = default;
};

enum class ReturnKind : uint8_t { Credit, Data };

// Reverse-path reply, routed back to the original requester.
struct ReturnPacket {
    ReturnKind kind = ReturnKind::Credit;
    uint64_t data = 0;   // zero for Credit
    Coordinate dest;     // coordinates of the requester

    bool operator==(const ReturnPacket&) const = default;
};

// Wire layout: MSB-first field order addr, op, op_ex, data, src_y, src_x,
// y, x. The x field occupies the least significant bits.
struct PacketFormat {
    uint32_t x_cord_width = 1;
    uint32_t y_cord_width = 1;
    uint32_t addr_width = 20;
    uint32_t data_width = 32;

    uint32_t op_ex_width() const { return data_width / 8; }

    uint32_t packet_width() const {
        return addr_width + 2 + op_ex_width() + data_width +
               2 * (y_cord_width + x_cord_width);
    }

    uint64_t data_mask() const {
        return data_width >= 64 ? ~uint64_t(0)
                                : (uint64_t(1) << data_width) - 1;
    }

    void validate() const;
    void validate_fields(const Packet& p) const;

    BitVector encode(const Packet& p) const;
    Packet decode(const BitVector& bits) const;
};

// Local address decode. The top bit of the word address selects the
// configuration space; word offsets 0 and 1 are the freeze and arbiter
// priority registers.
enum class ConfigReg : uint8_t { Freeze, ArbiterPriority, Reserved };

struct LocalAddress {
    bool is_config = false;
    uint64_t word_offset = 0;     // offset within the selected space
    ConfigReg reg = ConfigReg::Reserved;  // meaningful when is_config
};

LocalAddress decode_local_address(uint64_t addr, uint32_t addr_width);

// Word address of a configuration register, for masters poking remote
// endpoints.
uint64_t config_space_addr(uint32_t addr_width, uint64_t word_offset);

// Construction helpers that keep the op-specific field rules: loads carry
// zero op_ex/data, stores carry a non-empty byte mask.
Packet make_load(uint64_t addr, Coordinate src, Coordinate dest);
Packet make_store(uint64_t addr, uint64_t data, uint64_t mask, Coordinate src,
                  Coordinate dest);
Packet make_swap(OpCode op, uint64_t addr, uint64_t data, Coordinate src,
                 Coordinate dest);

}  // namespace manycore
