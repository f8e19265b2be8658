// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "manycore/packet.hpp"

using namespace manycore;

namespace {

const PacketFormat kSmall{2, 2, 4, 8};  // x, y, addr, data

OpCode op_from_name(const std::string& s) {
    if (s == "load") return OpCode::RemoteLoad;
    if (s == "store") return OpCode::RemoteStore;
    if (s == "swap_aq") return OpCode::RemoteSwapAq;
    if (s == "swap_rl") return OpCode::RemoteSwapRl;
    FAIL("bad op name ", s);
    return OpCode::RemoteLoad;
}

Packet random_packet(const PacketFormat& fmt, std::mt19937_64& rng) {
    auto bits = [&](uint32_t w) {
        return rng() & ((w >= 64) ? ~uint64_t(0) : ((uint64_t(1) << w) - 1));
    };
    Packet p;
    p.addr = bits(fmt.addr_width);
    p.op = opcode_from_bits(rng() & 3);
    p.op_ex = bits(fmt.op_ex_width());
    p.data = bits(fmt.data_width);
    p.src = {uint32_t(bits(fmt.x_cord_width)), uint32_t(bits(fmt.y_cord_width))};
    p.dest = {uint32_t(bits(fmt.x_cord_width)), uint32_t(bits(fmt.y_cord_width))};
    return p;
}

}  // namespace

TEST_CASE("packet width follows the declared field layout") {
    CHECK(kSmall.packet_width() == 4 + 2 + 1 + 8 + 2 * (2 + 2));
    CHECK(kSmall.packet_width() == 23);
    PacketFormat deflt{3, 4, 20, 32};
    CHECK(deflt.packet_width() == 20 + 2 + 4 + 32 + 2 * (4 + 3));
}

TEST_CASE("op encodings match the four defined values") {
    CHECK(uint64_t(OpCode::RemoteLoad) == 0b00);
    CHECK(uint64_t(OpCode::RemoteStore) == 0b01);
    CHECK(uint64_t(OpCode::RemoteSwapAq) == 0b10);
    CHECK(uint64_t(OpCode::RemoteSwapRl) == 0b11);
    for (uint64_t b = 0; b < 4; ++b)
        CHECK(uint64_t(opcode_from_bits(b)) == b);
    CHECK_THROWS_AS(opcode_from_bits(4), ConfigError);
}

TEST_CASE("all-zero packet encodes to the all-zero vector") {
    Packet p;
    BitVector bv = kSmall.encode(p);
    CHECK(bv.width() == 23);
    CHECK(bv.to_hex() == "000000");
    Packet back = kSmall.decode(bv);
    CHECK(back == p);
    CHECK(back.op == OpCode::RemoteLoad);
}

TEST_CASE("store op lands in the op field as 0b01") {
    Packet p = make_store(0, 0, 1, {0, 0}, {0, 0});
    BitVector bv = kSmall.encode(p);
    // op sits just above data + op_ex + coords: offset 8+8+1 = 17.
    CHECK(bv.get_field(17, 2) == 0b01);
    Packet rl = make_swap(OpCode::RemoteSwapRl, 0, 0, {0, 0}, {0, 0});
    CHECK(kSmall.encode(rl).get_field(17, 2) == 0b11);
}

TEST_CASE("golden fixture vectors") {
    std::ifstream in(FIXTURES_DIR "/packet_vectors.txt");
    REQUIRE(in.good());
    std::string line;
    int vectors = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string hex, opname;
        Packet p;
        uint64_t src_x, src_y, x, y;
        is >> hex >> std::hex >> p.addr >> std::dec >> opname >> std::hex >>
            p.op_ex >> p.data >> std::dec >> src_x >> src_y >> x >> y;
        REQUIRE(is);
        p.op = op_from_name(opname);
        p.src = {uint32_t(src_x), uint32_t(src_y)};
        p.dest = {uint32_t(x), uint32_t(y)};
        CHECK(kSmall.encode(p).to_hex() == hex);
        CHECK(kSmall.decode(BitVector::from_hex(23, hex)) == p);
        ++vectors;
    }
    CHECK(vectors == 5);
}

TEST_CASE("encode/decode round trip over random packets") {
    std::mt19937_64 rng(0xc0ffee);
    for (int i = 0; i < 1000; ++i) {
        Packet p = random_packet(kSmall, rng);
        CHECK(kSmall.decode(kSmall.encode(p)) == p);
    }
    PacketFormat wide{4, 5, 20, 32};
    for (int i = 0; i < 1000; ++i) {
        Packet p = random_packet(wide, rng);
        CHECK(wide.decode(wide.encode(p)) == p);
    }
}

TEST_CASE("field overflow and width mismatch are configuration errors") {
    Packet p;
    p.addr = 1 << 4;  // 5 bits into a 4-bit field
    CHECK_THROWS_AS(kSmall.encode(p), ConfigError);
    p = Packet{};
    p.dest.x = 4;
    CHECK_THROWS_AS(kSmall.encode(p), ConfigError);
    CHECK_THROWS_AS(kSmall.decode(BitVector(22)), ConfigError);
    CHECK_THROWS_AS(kSmall.decode(BitVector(24)), ConfigError);
}

TEST_CASE("local address decode splits on the top word-address bit") {
    // 20-bit word addresses: MSB is bit 19.
    auto la = decode_local_address(0x80000, 20);
    CHECK(la.is_config);
    CHECK(la.reg == ConfigReg::Freeze);
    CHECK(la.word_offset == 0);

    la = decode_local_address(0x80001, 20);
    CHECK(la.is_config);
    CHECK(la.reg == ConfigReg::ArbiterPriority);
    CHECK(la.word_offset == 1);

    la = decode_local_address(0x80002, 20);
    CHECK(la.is_config);
    CHECK(la.reg == ConfigReg::Reserved);

    la = decode_local_address(0x00005, 20);
    CHECK(!la.is_config);
    CHECK(la.word_offset == 5);

    // The decode depends only on the MSB.
    for (uint64_t addr : {uint64_t(0), uint64_t(0x7ffff)})
        CHECK(!decode_local_address(addr, 20).is_config);
    for (uint64_t addr : {uint64_t(0x80000), uint64_t(0xfffff)})
        CHECK(decode_local_address(addr, 20).is_config);

    CHECK(config_space_addr(20, 0) == 0x80000);
    CHECK(config_space_addr(20, 1) == 0x80001);
}

TEST_CASE("construction helpers keep op field rules") {
    Packet ld = make_load(7, {0, 0}, {1, 1});
    CHECK(ld.op_ex == 0);
    CHECK(ld.data == 0);
    CHECK_THROWS_AS(make_store(0, 1, 0, {0, 0}, {1, 1}), ConfigError);
    CHECK_THROWS_AS(make_swap(OpCode::RemoteLoad, 0, 0, {0, 0}, {1, 1}),
                    ConfigError);
}

TEST_CASE("bitvector hex round trip") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 200; ++i) {
        uint32_t width = 1 + uint32_t(rng() % 90);
        BitVector bv(width);
        for (uint32_t b = 0; b < width; ++b)
            if (rng() & 1) bv.set_field(b, 1, 1);
        CHECK(BitVector::from_hex(width, bv.to_hex()) == bv);
    }
    CHECK_THROWS_AS(BitVector::from_hex(4, "ff"), ConfigError);
    CHECK_THROWS_AS(BitVector::from_hex(5, "ff"), ConfigError);  // overflow
}
