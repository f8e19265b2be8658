// SPDX-License-Identifier: Apache-2.0

#include "manycore/scenarios.hpp"

namespace manycore {

FabricConfig golden_roundtrip_config(uint32_t read_count,
                                     uint32_t endpoint_fifo_els) {
    FabricConfig fc;
    fc.cols = 2;
    fc.rows = 1;
    fc.endpoint.fifo_els = endpoint_fifo_els;
    fc.endpoint.max_out_credits = 16;

    SequenceMasterSpec master;
    master.cfg.count = read_count;
    master.cfg.base_addr = 0;
    master.cfg.dest = Coordinate{1, 1};
    fc.nodes.emplace(Coordinate{0, 0}, master);

    fc.nodes.emplace(Coordinate{1, 1}, MemorySlaveSpec{});
    return fc;
}

GoldenResult run_golden_roundtrip(uint32_t read_count,
                                  uint32_t endpoint_fifo_els,
                                  uint64_t max_cycles) {
    Fabric fabric(golden_roundtrip_config(read_count, endpoint_fifo_els));
    auto* master = fabric.node_at<SequenceMaster>(Coordinate{0, 0});
    while (!master->done() && fabric.cycle() < max_cycles) fabric.tick();
    if (!master->done())
        fail_protocol("round trip did not finish within ", max_cycles,
                      " cycles");
    GoldenResult r;
    r.responses = master->responses();
    r.errors = master->errors();
    r.fence_passed = master->fence_passed();
    r.cycles = fabric.cycle();
    return r;
}

OrderingDemoResult run_ordering_demo(uint64_t max_cycles) {
    constexpr uint64_t kNearValue = 0xAAA;
    constexpr uint64_t kFarValue = 0xBBB;

    FabricConfig fc;
    fc.cols = 3;
    fc.rows = 1;

    OrderingMasterSpec master;
    master.cfg.far = Coordinate{2, 0};
    master.cfg.near = Coordinate{1, 0};
    master.cfg.addr = 0;
    fc.nodes.emplace(Coordinate{0, 0}, master);

    MemorySlaveSpec near_slave;
    near_slave.init[0] = kNearValue;
    fc.nodes.emplace(Coordinate{1, 0}, near_slave);

    MemorySlaveSpec far_slave;
    far_slave.init[0] = kFarValue;
    fc.nodes.emplace(Coordinate{2, 0}, far_slave);

    Fabric fabric(fc);
    auto* m = fabric.node_at<OrderingDemoMaster>(Coordinate{0, 0});
    while (m->returns().size() < 2 && fabric.cycle() < max_cycles)
        fabric.tick();
    if (m->returns().size() < 2)
        fail_protocol("ordering demo did not finish within ", max_cycles,
                      " cycles");
    OrderingDemoResult r;
    r.near_value = kNearValue;
    r.far_value = kFarValue;
    r.returns = m->returns();
    return r;
}

FreezeDemoResult run_freeze_demo(uint64_t max_cycles) {
    FabricConfig fc;
    fc.cols = 3;
    fc.rows = 1;

    const Coordinate worker{1, 0};
    const Coordinate sink{2, 0};

    // Worker streams stores to the sink until frozen.
    TrafficGenSpec ts;
    ts.cfg.rate = 1.0;
    ts.cfg.fixed_dest = sink;
    fc.nodes.emplace(worker, ts);
    fc.nodes.emplace(sink, MemorySlaveSpec{});

    using Step = ConfigScriptNode::Step;
    using K = ConfigScriptNode::OpKind;
    ConfigScriptSpec script;
    script.steps = {
        Step{K::Delay, 60, 0, {}},
        Step{K::LoadConfig, 0, 1, worker},   // arbiter priority, initial
        Step{K::StoreConfig, 1, 0, worker},  // freeze
        Step{K::Delay, 40, 0, {}},
        Step{K::StoreConfig, 1, 1, worker},  // toggle arb once
        Step{K::LoadConfig, 0, 1, worker},
        Step{K::StoreConfig, 1, 1, worker},  // toggle arb back
        Step{K::LoadConfig, 0, 1, worker},
        Step{K::Delay, 40, 0, {}},
        Step{K::StoreConfig, 0, 0, worker},  // unfreeze
        Step{K::Delay, 60, 0, {}},
    };
    fc.nodes.emplace(Coordinate{0, 0}, script);

    Fabric fabric(fc);
    auto* w = fabric.node_at<TrafficGenNode>(worker);
    auto* ctl = fabric.node_at<ConfigScriptNode>(Coordinate{0, 0});
    auto* wep = fabric.endpoint_at(worker);

    FreezeDemoResult r;

    // Sample issue counters around the freeze window by watching the
    // worker's freeze register.
    uint64_t issued_at_freeze = 0, issued_at_unfreeze = 0;
    bool seen_frozen = false;
    while (!ctl->done() && fabric.cycle() < max_cycles) {
        bool was_frozen = wep->frozen();
        fabric.tick();
        if (!was_frozen && wep->frozen()) {
            issued_at_freeze = w->issued();
            seen_frozen = true;
        }
        if (was_frozen && !wep->frozen()) issued_at_unfreeze = w->issued();
    }
    // Let in-flight traffic settle.
    uint64_t settle = fabric.cycle() + 200;
    while (fabric.cycle() < settle) fabric.tick();

    if (!seen_frozen)
        fail_protocol("freeze demo never observed the frozen state");
    r.issued_before_freeze = issued_at_freeze;
    r.issued_while_frozen = issued_at_unfreeze - issued_at_freeze;
    r.issued_after_unfreeze = w->issued() - issued_at_unfreeze;
    r.arb_reads = ctl->load_results();
    r.worker_done = ctl->done();
    return r;
}

}  // namespace manycore
