// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "manycore/fifo.hpp"
#include "manycore/packet.hpp"
#include "manycore/sim_error.hpp"

namespace manycore {

// The three latency-insensitive handshakes used on the links.
//  - ValidReady: fires when both sides assert in the same cycle; neither
//    signal may combinationally depend on the other at the asserting side.
//  - ValidYumi: receiver asserts yumi only while observing valid.
//  - ValidOnly: no backpressure; a presented datum is always consumed.
enum class HandshakeKind : uint8_t { ValidReady, ValidYumi, ValidOnly };

inline bool handshake_fire(HandshakeKind kind, bool valid, bool ready_or_yumi) {
    switch (kind) {
        case HandshakeKind::ValidReady:
            return valid && ready_or_yumi;
        case HandshakeKind::ValidYumi:
            if (ready_or_yumi && !valid)
                fail_protocol("yumi asserted without valid");
            return ready_or_yumi;
        case HandshakeKind::ValidOnly:
            return valid;
    }
    return false;
}

// Per-packet bookkeeping carried alongside the wire word. Not part of the
// encoded format; the simulator uses it for latency and ordering accounting.
struct PacketMeta {
    uint64_t arrival_cycle = 0;  // source-queue arrival
    uint64_t fire_cycle = 0;     // network entry (out_request fire)
    uint32_t pair_seq = 0;       // per (src,dest) injection sequence number
    uint16_t router_hops = 0;
    bool measured = false;
};

struct FwdWord {
    Packet pkt;
    PacketMeta meta;
};

struct RevWord {
    ReturnPacket rp;
};

inline Coordinate routing_dest(const FwdWord& w) { return w.pkt.dest; }
inline Coordinate routing_dest(const RevWord& w) { return w.rp.dest; }

// A link is a forward channel paired with an independent reverse channel;
// in this simulator each channel is realized as the downstream input FIFO
// it feeds, so "wiring a link" is exchanging FIFO pointers. These aliases
// name the two sides where fabrics pass them around.
using FwdChannel = Fifo<FwdWord>;
using RevChannel = Fifo<RevWord>;

}  // namespace manycore
