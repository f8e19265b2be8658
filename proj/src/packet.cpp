// SPDX-License-Identifier: Apache-2.0

#include "manycore/packet.hpp"

#include <sstream>

namespace manycore {

std::string to_string(Coordinate c) {
    std::ostringstream os;
    os << "(x=" << c.x << ",y=" << c.y << ")";
    return os.str();
}

const char* to_string(OpCode op) {
    switch (op) {
        case OpCode::RemoteLoad: return "load";
        case OpCode::RemoteStore: return "store";
        case OpCode::RemoteSwapAq: return "swap_aq";
        case OpCode::RemoteSwapRl: return "swap_rl";
    }
    return "?";
}

OpCode opcode_from_bits(uint64_t bits) {
    if (bits > 3) fail_config("op code bits out of range: ", bits);
    return static_cast<OpCode>(bits);
}

void PacketFormat::validate() const {
    if (x_cord_width == 0 || x_cord_width > 16)
        fail_config("x_cord_width must be in [1,16], got ", x_cord_width);
    if (y_cord_width == 0 || y_cord_width > 16)
        fail_config("y_cord_width must be in [1,16], got ", y_cord_width);
    if (addr_width == 0 || addr_width > 60)
        fail_config("addr_width must be in [1,60], got ", addr_width);
    if (data_width == 0 || data_width > 64 || data_width % 8 != 0)
        fail_config("data_width must be a multiple of 8 in [8,64], got ",
                    data_width);
}

namespace {

void check_field(const char* name, uint64_t value, uint32_t bits) {
    if (bits < 64 && (value >> bits) != 0)
        fail_config("packet field ", name, "=0x", std::hex, value,
                    " overflows ", std::dec, bits, " bits");
}

}  // namespace

void PacketFormat::validate_fields(const Packet& p) const {
    check_field("addr", p.addr, addr_width);
    check_field("op_ex", p.op_ex, op_ex_width());
    check_field("data", p.data, data_width);
    check_field("src_x", p.src.x, x_cord_width);
    check_field("src_y", p.src.y, y_cord_width);
    check_field("x", p.dest.x, x_cord_width);
    check_field("y", p.dest.y, y_cord_width);
}

BitVector PacketFormat::encode(const Packet& p) const {
    validate();
    validate_fields(p);
    BitVector bv(packet_width());
    uint32_t off = 0;
    bv.set_field(off, x_cord_width, p.dest.x); off += x_cord_width;
    bv.set_field(off, y_cord_width, p.dest.y); off += y_cord_width;
    bv.set_field(off, x_cord_width, p.src.x);  off += x_cord_width;
    bv.set_field(off, y_cord_width, p.src.y);  off += y_cord_width;
    bv.set_field(off, data_width, p.data);     off += data_width;
    bv.set_field(off, op_ex_width(), p.op_ex); off += op_ex_width();
    bv.set_field(off, 2, uint64_t(p.op));      off += 2;
    bv.set_field(off, addr_width, p.addr);
    return bv;
}

Packet PacketFormat::decode(const BitVector& bits) const {
    validate();
    if (bits.width() != packet_width())
        fail_config("packet bit vector width ", bits.width(),
                    " does not match configured width ", packet_width());
    Packet p;
    uint32_t off = 0;
    p.dest.x = uint32_t(bits.get_field(off, x_cord_width)); off += x_cord_width;
    p.dest.y = uint32_t(bits.get_field(off, y_cord_width)); off += y_cord_width;
    p.src.x = uint32_t(bits.get_field(off, x_cord_width));  off += x_cord_width;
    p.src.y = uint32_t(bits.get_field(off, y_cord_width));  off += y_cord_width;
    p.data = bits.get_field(off, data_width);               off += data_width;
    p.op_ex = bits.get_field(off, op_ex_width());           off += op_ex_width();
    p.op = opcode_from_bits(bits.get_field(off, 2));        off += 2;
    p.addr = bits.get_field(off, addr_width);
    return p;
}

LocalAddress decode_local_address(uint64_t addr, uint32_t addr_width) {
    if (addr_width == 0 || addr_width > 60)
        fail_config("addr_width must be in [1,60], got ", addr_width);
    if ((addr >> addr_width) != 0)
        fail_config("address 0x", std::hex, addr, " overflows ", std::dec,
                    addr_width, " bits");
    LocalAddress out;
    uint64_t msb = uint64_t(1) << (addr_width - 1);
    if (addr & msb) {
        out.is_config = true;
        out.word_offset = addr & (msb - 1);
        switch (out.word_offset) {
            case 0: out.reg = ConfigReg::Freeze; break;
            case 1: out.reg = ConfigReg::ArbiterPriority; break;
            default: out.reg = ConfigReg::Reserved; break;
        }
    } else {
        out.is_config = false;
        out.word_offset = addr;
    }
    return out;
}

uint64_t config_space_addr(uint32_t addr_width, uint64_t word_offset) {
    if (addr_width == 0 || addr_width > 60)
        fail_config("addr_width must be in [1,60], got ", addr_width);
    uint64_t msb = uint64_t(1) << (addr_width - 1);
    if (word_offset >= msb)
        fail_config("config word offset ", word_offset, " overflows");
    return msb | word_offset;
}

Packet make_load(uint64_t addr, Coordinate src, Coordinate dest) {
    Packet p;
    p.addr = addr;
    p.op = OpCode::RemoteLoad;
    p.src = src;
    p.dest = dest;
    return p;
}

Packet make_store(uint64_t addr, uint64_t data, uint64_t mask, Coordinate src,
                  Coordinate dest) {
    if (mask == 0) fail_config("store byte mask must have at least one bit set");
    Packet p;
    p.addr = addr;
    p.op = OpCode::RemoteStore;
    p.op_ex = mask;
    p.data = data;
    p.src = src;
    p.dest = dest;
    return p;
}

Packet make_swap(OpCode op, uint64_t addr, uint64_t data, Coordinate src,
                 Coordinate dest) {
    if (op != OpCode::RemoteSwapAq && op != OpCode::RemoteSwapRl)
        fail_config("make_swap requires a swap op");
    Packet p;
    p.addr = addr;
    p.op = op;
    p.data = data;
    p.src = src;
    p.dest = dest;
    return p;
}

}  // namespace manycore
