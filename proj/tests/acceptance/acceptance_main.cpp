// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each criterion runs standalone and prints
// one PASS/FAIL line; the exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "manycore/experiment.hpp"
#include "manycore/scenarios.hpp"

using namespace manycore;

namespace {

struct Check {
    std::vector<std::string> notes;
    bool ok = true;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("FAILED: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

// --- 1: golden round trip -------------------------------------------------

void criterion_golden(Check& c) {
    GoldenResult r = run_golden_roundtrip(16);
    c.expect(r.errors.empty(), "returned values all match expectations");
    c.expect(r.responses.size() == 16, "all 16 responses observed");
    for (std::size_t i = 0; i < r.responses.size(); ++i) {
        c.expect(r.responses[i].cycles_after_first_issue == 7 + i,
                 cat("response ", i, " at cycle ", 7 + i, " (got ",
                     r.responses[i].cycles_after_first_issue, ")"));
        c.expect(r.responses[i].returned == r.responses[i].expected,
                 cat("response ", i, " value"));
    }
    c.note(cat("first response ",
               r.responses.empty() ? 0 : r.responses[0].cycles_after_first_issue,
               " cycles after first read issue, then +1 per read"));
}

// --- 2: turn legality -----------------------------------------------------

void criterion_turn_legality(Check& c) {
    uint64_t delivered = 0, illegal = 0;
    auto run_one = [&](TrafficPattern p, double rate, uint64_t packets,
                       uint64_t seed) {
        TrafficSpec spec;
        spec.pattern = p;
        spec.injection_rate = rate;
        spec.warmup_cycles = 300;
        spec.measure_packets = packets;
        spec.drain = true;
        SimReport rep = run_experiment(8, 8, spec, seed);
        delivered += rep.delivered;
        illegal += rep.illegal_turn_hops;
    };
    run_one(TrafficPattern::UniformRandom, 0.25, 40000, 101);
    run_one(TrafficPattern::Transpose, 0.15, 30000, 102);
    run_one(TrafficPattern::NearestNeighbor, 0.5, 30000, 103);
    c.expect(delivered >= 100000, cat("at least 1e5 packets delivered (got ",
                                      delivered, ")"));
    c.expect(illegal == 0,
             cat("zero N->W / N->E hops observed (got ", illegal, ")"));
    c.note(cat(delivered, " packets delivered, 0 illegal turns"));
}

// --- 3: deadlock freedom and conservation over random scenarios ------------

std::string run_scenario(uint64_t seed) {
    std::mt19937_64 rng(seed);
    uint32_t cols = 2 + uint32_t(rng() % 7);
    uint32_t rows = 2 + uint32_t(rng() % 7);

    FabricConfig fc;
    fc.cols = cols;
    fc.rows = rows;
    fc.seed = seed;
    fc.endpoint.max_out_credits =
        credits_recommended(Fabric::max_round_trip_cycles(cols, rows), 1.0);
    fc.endpoint.warn_out_of_credits = false;

    std::vector<Coordinate> traffic_coords;

    const Coordinate anchor_slave{cols - 1, rows - 1};
    for (uint32_t y = 0; y < rows; ++y) {
        for (uint32_t x = 0; x < cols; ++x) {
            Coordinate here{x, y};
            if (here == anchor_slave) {
                fc.nodes.emplace(here, MemorySlaveSpec{});
                continue;
            }
            uint64_t roll = rng() % 100;
            if (roll < 55 || (x == 0 && y == 0)) {
                traffic_coords.push_back(here);
            } else if (roll < 80) {
                MemorySlaveSpec ms;
                ms.latency = 1 + uint32_t(rng() % 3);
                fc.nodes.emplace(here, ms);
            }
            // otherwise tied off
        }
    }
    // Sometimes hang an IO device off the south edge.
    std::vector<Coordinate> io_targets;
    if (rng() % 3 == 0) {
        uint32_t col = uint32_t(rng() % cols);
        IoSlaveSpec io;
        io.span = 1 + uint32_t(rng() % 2);
        io.latency = 1 + uint32_t(rng() % 2);
        fc.nodes.emplace(Coordinate{col, rows}, io);
        for (uint32_t s = 0; s < io.span; ++s)
            io_targets.push_back(Coordinate{col, rows + s});
    }
    // Sometimes add lock contenders exercising the swap ops. They are
    // master-only nodes, so they must never be traffic targets: a node
    // that cannot absorb incoming requests would wedge the network.
    bool with_locks = traffic_coords.size() >= 2 && (rng() % 4 == 0);
    std::vector<Coordinate> contenders;
    if (with_locks) {
        contenders.push_back(traffic_coords.back());
        traffic_coords.pop_back();
        if (traffic_coords.size() >= 2) {
            contenders.push_back(traffic_coords.back());
            traffic_coords.pop_back();
        }
        for (std::size_t i = 0; i < contenders.size(); ++i) {
            LockContenderSpec lc;
            lc.cfg.lock_home = anchor_slave;
            lc.cfg.lock_addr = 5000;  // clear of traffic addresses
            lc.cfg.my_id = 10 + i;
            lc.cfg.target_acquisitions = 2;
            lc.cfg.cs_cycles = 3;
            fc.nodes.emplace(contenders[i], lc);
        }
    }

    // Targets: every absorbing node (traffic generators double as slaves,
    // memory slaves, the IO span); never the master-only contenders.
    std::vector<Coordinate> targets = io_targets;
    for (const auto& [coord, spec] : fc.nodes)
        if (std::holds_alternative<MemorySlaveSpec>(spec))
            targets.push_back(coord);
    targets.insert(targets.end(), traffic_coords.begin(),
                   traffic_coords.end());

    double rate = 0.03 + double(rng() % 28) / 100.0;
    for (Coordinate tc : traffic_coords) {
        TrafficGenSpec ts;
        ts.cfg.rate = rate;
        ts.cfg.store_fraction = 0.6;
        ts.cfg.dest_choices = targets;
        fc.nodes.emplace(tc, ts);
    }

    try {
        Fabric f(fc);
        f.stats().set_measure_from(UINT64_MAX);
        f.run(1200);
        for (auto* n : f.traffic_nodes()) n->set_arrivals_enabled(false);
        uint64_t budget = 60000;
        while (!f.quiescent() && f.cycle() < budget) f.tick();
        if (!f.quiescent())
            return cat("did not drain within ", budget, " cycles");
        if (f.stats().fired() != f.stats().delivered())
            return cat("fired ", f.stats().fired(), " != delivered ",
                       f.stats().delivered());
        if (f.stats().replies_injected() != f.stats().credits_delivered())
            return "reverse network did not drain";
        f.finalize_checkers();
        if (!f.stats().flags().empty()) return f.stats().flags().front();
    } catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

void criterion_deadlock_freedom(Check& c) {
    uint64_t total_ok = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        std::string err = run_scenario(seed);
        if (err.empty()) {
            ++total_ok;
        } else {
            c.expect(false, cat("scenario ", seed, ": ", err));
            if (total_ok + 10 < seed) break;  // stop flooding
        }
    }
    c.expect(total_ok == 100, "all 100 scenarios drained cleanly");
    c.note("100 seeded scenarios: every packet delivered, every credit "
           "restored, credits+outstanding==max each cycle");
}

// --- 4: ordering ------------------------------------------------------------

void criterion_ordering(Check& c) {
    // Point-to-point order is asserted at every delivery in every run (a
    // violation throws); re-run a heavy mixed workload to exercise it.
    TrafficSpec spec;
    spec.injection_rate = 0.3;
    spec.store_fraction = 0.5;
    spec.warmup_cycles = 200;
    spec.measure_packets = 20000;
    SimReport rep = run_experiment(6, 6, spec, 7);
    c.expect(rep.delivered > 20000, "ordered delivery under congestion");

    OrderingDemoResult demo = run_ordering_demo();
    c.expect(demo.returns.size() == 2, "both demo responses returned");
    c.expect(demo.returns[0].data == demo.near_value,
             "near response reaches the master first");
    c.expect(demo.returns[1].data == demo.far_value,
             "far response arrives second");
    c.note(cat("near response overtook far (cycles ", demo.returns[0].cycle,
               " < ", demo.returns[1].cycle, ")"));
}

// --- 5: bisection analytics -------------------------------------------------

void criterion_bisection(Check& c) {
    const uint32_t k = 8;
    uint64_t crossing = 0, total = 0;
    for (uint32_t sy = 0; sy < k; ++sy)
        for (uint32_t sx = 0; sx < k; ++sx)
            for (uint32_t dy = 0; dy < k; ++dy)
                for (uint32_t dx = 0; dx < k; ++dx) {
                    if (sx == dx && sy == dy) continue;
                    ++total;
                    if (crosses_bisection({sx, sy}, {dx, dy}, k)) ++crossing;
                }
    double exact = double(crossing) / double(total);

    TrafficSpec spec;
    spec.injection_rate = 0.15;
    spec.warmup_cycles = 300;
    spec.measure_packets = 15000;
    SimReport rep = run_experiment(k, k, spec, 19);
    double measured =
        double(rep.bisection_crossings) / double(rep.records.size());
    c.expect(rep.records.size() >= 10000, "at least 1e4 measured packets");
    c.expect(std::abs(measured - exact) <= 0.05 * exact,
             cat("crossing fraction ", measured, " within 5% of ", exact));

    c.expect(bisection_bound(16) == 0.25,
             "16x16 bound is one injection per 4 cycles");
    c.note(cat("crossing fraction ", measured, " vs exact ", exact,
               "; bound(16) = 0.25/node/cycle"));
}

// --- 6: saturation bracketing ------------------------------------------------

std::vector<SweepRow> uniform_sweep(std::vector<double> rates) {
    ExperimentPlan plan;
    plan.cols = 8;
    plan.rows = 8;
    plan.pattern = TrafficPattern::UniformRandom;
    plan.rates = std::move(rates);
    plan.base_seed = 33;
    plan.base.warmup_cycles = 1500;
    plan.base.measure_packets = 40000;
    plan.base.drain = false;
    plan.base.max_cycles = 40000;
    plan.base.window_cycles = 400;
    return run_sweep(plan, 0);
}

void criterion_saturation_bracket(Check& c) {
    auto rows = uniform_sweep(
        {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5});
    double peak_accepted = 0;
    double base_latency = rows.front().mean_latency;
    double max_latency = 0;
    bool any_saturated = false;
    bool monotone = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        peak_accepted = std::max(peak_accepted, rows[i].accepted);
        max_latency = std::max(max_latency, rows[i].mean_latency);
        any_saturated = any_saturated || rows[i].saturated;
        if (i > 0 && rows[i].mean_latency < rows[i - 1].mean_latency * 0.90)
            monotone = false;
    }
    c.expect(peak_accepted >= 0.25 && peak_accepted <= 0.50,
             cat("saturation throughput ", peak_accepted,
                 " within [0.25, 0.50] packets/node/cycle"));
    c.expect(monotone, "latency curve is monotone along offered rates");
    c.expect(any_saturated, "sweep reaches saturation");
    c.expect(max_latency >= 3.0 * base_latency,
             cat("latency spikes near saturation (", base_latency, " -> ",
                 max_latency, ")"));
    c.note(cat("saturation throughput ", peak_accepted,
               " packets/node/cycle; latency ", base_latency, " -> ",
               max_latency));
}

// --- 7: pattern ordering -------------------------------------------------

double max_accepted(TrafficPattern p, std::vector<double> rates, Check& c) {
    ExperimentPlan plan;
    plan.cols = 8;
    plan.rows = 8;
    plan.pattern = p;
    plan.rates = std::move(rates);
    plan.base_seed = 47;
    plan.base.warmup_cycles = 1500;
    plan.base.measure_packets = 40000;
    plan.base.drain = false;
    plan.base.max_cycles = 40000;
    plan.base.window_cycles = 400;
    double peak = 0;
    for (const auto& row : run_sweep(plan, 0))
        peak = std::max(peak, row.accepted);
    c.note(cat(to_string(p), ": max accepted ", peak, " (",
               peak / bisection_bound(8), " of the uniform bound)"));
    return peak;
}

void criterion_pattern_ordering(Check& c) {
    double uni = max_accepted(TrafficPattern::UniformRandom,
                              {0.2, 0.25, 0.3, 0.35}, c);
    double tra = max_accepted(TrafficPattern::Transpose,
                              {0.1, 0.15, 0.2, 0.25}, c);
    double nn = max_accepted(TrafficPattern::NearestNeighbor,
                             {0.5, 0.7, 0.85, 0.95}, c);
    c.expect(nn > uni,
             cat("nearest neighbor (", nn, ") above uniform (", uni, ")"));
    c.expect(uni > tra, cat("uniform (", uni, ") above transpose (", tra, ")"));
}

// --- 8: fence and freeze ---------------------------------------------------

void criterion_fence_freeze(Check& c) {
    GoldenResult g = run_golden_roundtrip(8);
    c.expect(g.fence_passed, "fence completes with out_credits == max");

    FreezeDemoResult f = run_freeze_demo();
    c.expect(f.issued_before_freeze > 0, "master issued before the freeze");
    c.expect(f.issued_while_frozen == 0,
             cat("no issues while frozen (got ", f.issued_while_frozen, ")"));
    c.expect(f.issued_after_unfreeze > 0, "master resumed after unfreeze");
    c.expect(f.arb_reads.size() == 3, "three arbiter register reads");
    if (f.arb_reads.size() == 3) {
        c.expect(f.arb_reads[1] != f.arb_reads[0],
                 "single write toggles arb_priority");
        c.expect(f.arb_reads[2] == f.arb_reads[0],
                 "double write restores arb_priority");
    }
    c.note(cat("issued ", f.issued_before_freeze, " / frozen ",
               f.issued_while_frozen, " / resumed ", f.issued_after_unfreeze,
               "; arb reads ", f.arb_reads[0], ",", f.arb_reads[1], ",",
               f.arb_reads[2]));
}

// --- 9: streaming flow control ----------------------------------------------

void criterion_streaming(Check& c) {
    FabricConfig fc;
    fc.cols = 2;
    fc.rows = 1;
    StreamingMasterSpec s;
    s.cfg.dest = {1, 0};
    s.cfg.total = 500;
    s.cfg.peer_capacity = 4;  // the peer endpoint FIFO depth
    fc.nodes.emplace(Coordinate{0, 0}, s);
    fc.nodes.emplace(Coordinate{1, 0}, MemorySlaveSpec{});
    fc.endpoint.max_out_credits = 16;
    Fabric f(fc);
    while (!f.quiescent() && f.cycle() < 30000) f.tick();
    auto* m = f.node_at<StreamingMaster>({0, 0});
    c.expect(m->done(), "all 500 stores delivered and acknowledged");
    c.expect(m->max_outstanding_seen() <= 4,
             cat("outstanding never exceeded the peer capacity (max ",
                 m->max_outstanding_seen(), ")"));
    uint64_t bp =
        f.stats().backpressure_events(0) + f.stats().backpressure_events(1);
    c.expect(bp == 0, cat("zero router backpressure events (got ", bp, ")"));
    c.note(cat("500 stores, max outstanding ", m->max_outstanding_seen(),
               ", 0 backpressure events"));
}

// --- 10: lock correctness ---------------------------------------------------

void criterion_lock(Check& c) {
    FabricConfig fc;
    fc.cols = 3;
    fc.rows = 3;
    fc.seed = 3;
    const Coordinate lock_home{1, 1};
    fc.nodes.emplace(lock_home, MemorySlaveSpec{});
    std::vector<Coordinate> corners = {{0, 0}, {2, 0}, {0, 2}, {2, 2}};
    for (std::size_t i = 0; i < corners.size(); ++i) {
        LockContenderSpec lc;
        lc.cfg.lock_home = lock_home;
        lc.cfg.lock_addr = 64;
        lc.cfg.my_id = i + 1;
        lc.cfg.target_acquisitions = 5;
        lc.cfg.cs_cycles = 4;
        fc.nodes.emplace(corners[i], lc);
    }
    Fabric f(fc);
    std::vector<LockContender*> nodes;
    for (Coordinate cc : corners)
        nodes.push_back(f.node_at<LockContender>(cc));

    uint64_t max_in_cs = 0;
    bool all_done = false;
    while (f.cycle() < 100000) {
        f.tick();
        uint64_t in_cs = 0;
        all_done = true;
        for (auto* n : nodes) {
            in_cs += n->in_cs() ? 1 : 0;
            all_done = all_done && n->done();
        }
        max_in_cs = std::max(max_in_cs, in_cs);
        if (all_done) break;
    }
    c.expect(max_in_cs <= 1, cat("mutual exclusion held (max holders ",
                                 max_in_cs, ")"));
    c.expect(all_done, "all 4 contenders completed 5 acquisitions each");
    for (auto* n : nodes)
        c.expect(n->errors().empty(), "release always read back the owner id");
    c.note(cat("4 contenders x 5 acquisitions in ", f.cycle(),
               " cycles, max simultaneous holders ", max_in_cs));
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        std::function<void(Check&)> fn;
    };
    const std::vector<Entry> entries = {
        {1, "golden round trip (7-cycle first response, then 8, 9, ...)",
         criterion_golden},
        {2, "turn legality over 1e5+ delivered packets", criterion_turn_legality},
        {3, "deadlock freedom and conservation, 100 random scenarios",
         criterion_deadlock_freedom},
        {4, "point-to-point ordering and out-of-order demo", criterion_ordering},
        {5, "bisection crossing fraction and analytic bound", criterion_bisection},
        {6, "8x8 uniform saturation within [0.25, 0.5]",
         criterion_saturation_bracket},
        {7, "saturation ordering: neighbor > uniform > transpose",
         criterion_pattern_ordering},
        {8, "fence and freeze/arbiter config registers", criterion_fence_freeze},
        {9, "streaming flow control without backpressure", criterion_streaming},
        {10, "lock mutual exclusion via swap ops", criterion_lock},
    };

    int failures = 0;
    for (const auto& e : entries) {
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            c.ok = false;
            c.notes.push_back(cat("exception: ", ex.what()));
        }
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        std::printf("[%s] criterion %2d: %s (%lld ms)\n",
                    c.ok ? "PASS" : "FAIL", e.id, e.name,
                    (long long)ms);
        for (const auto& n : c.notes)
            std::printf("         %s\n", n.c_str());
        if (!c.ok) ++failures;
    }
    if (failures)
        std::printf("%d criterion(s) failed\n", failures);
    else
        std::printf("all %zu criteria passed\n", entries.size());
    return failures;
}
