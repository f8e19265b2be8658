// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "manycore/fabric.hpp"

namespace manycore {

// Two-router demo topology: a sequence master at (0,0) on the processor
// port of router (0,0), a memory slave at (1,1) hanging off the south port
// of router (0,1), every other direction stubbed and tied off.
//
//   MASTER(0,0)   TIED          TIED       TIED      (y, x)
//         \        |               \        |
//          +----------------+       +----------------+
//   TIED---| ROUTER (0,0)   |-------| ROUTER (0,1)   |--- TIED
//          +----------------+       +----------------+
//                  |                        |
//                TIED                   SLAVE(1,1)
FabricConfig golden_roundtrip_config(uint32_t read_count,
                                     uint32_t endpoint_fifo_els = 4);

struct GoldenResult {
    std::vector<SequenceMaster::Response> responses;
    std::vector<std::string> errors;
    bool fence_passed = false;
    uint64_t cycles = 0;
};

// Runs the round trip to completion and returns the response log. The
// uncontended reply to read i lands exactly 7 + i cycles after the first
// read fires.
GoldenResult run_golden_roundtrip(uint32_t read_count,
                                  uint32_t endpoint_fifo_els = 4,
                                  uint64_t max_cycles = 100000);

struct OrderingDemoResult {
    uint64_t near_value = 0;
    uint64_t far_value = 0;
    std::vector<OrderingDemoMaster::Return> returns;
};

// A master at (0,0) loads from the far slave at (2,0), then from the near
// slave at (1,0) on the next cycle; the near response overtakes the far
// one.
OrderingDemoResult run_ordering_demo(uint64_t max_cycles = 10000);

struct FreezeDemoResult {
    uint64_t issued_before_freeze = 0;
    uint64_t issued_while_frozen = 0;
    uint64_t issued_after_unfreeze = 0;
    std::vector<uint64_t> arb_reads;  // initial, after 1 write, after 2 writes
    bool worker_done = false;
};

// A controller at (0,0) freezes and unfreezes a traffic source at (1,0) by
// storing to its freeze register, and double-writes the arbiter priority
// register to show the toggle returning to its initial value.
FreezeDemoResult run_freeze_demo(uint64_t max_cycles = 20000);

}  // namespace manycore
