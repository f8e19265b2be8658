// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "manycore/packet.hpp"
#include "manycore/router.hpp"
#include "manycore/sim_error.hpp"

namespace manycore {

struct PacketRecord {
    Coordinate src;
    Coordinate dest;
    uint64_t arrival_cycle = 0;
    uint64_t fire_cycle = 0;
    uint64_t delivered_cycle = 0;
    uint16_t router_hops = 0;
};

// Mutable per-run event sink shared by the fabric, routers and endpoints.
// Also enforces the point-to-point ordering rule on every delivery.
class SimStats {
public:
    SimStats(uint32_t cols, uint32_t rows) : cols_(cols), rows_(rows) {}

    // -- measurement window control --------------------------------------
    void set_measure_from(uint64_t cycle) { measure_from_ = cycle; }
    void set_measured_cap(uint64_t cap) { measured_cap_ = cap; }
    void set_measure_active(bool on) { measure_active_ = on; }
    bool measure_active() const { return measure_active_; }
    uint64_t measured_arrivals() const { return measured_arrivals_; }

    // -- traffic events ----------------------------------------------------
    // Returns true when this arrival falls in the measurement window.
    bool on_arrival(uint64_t cycle) {
        ++arrivals_;
        if (cycle >= measure_from_ && measured_arrivals_ < measured_cap_) {
            ++measured_arrivals_;
            return true;
        }
        return false;
    }

    uint32_t next_pair_seq(Coordinate src, Coordinate dest) {
        uint64_t key = pair_key(src, dest);
        return pair_inject_seq_[key]++;
    }

    void on_fire() { ++fired_; }

    void on_delivery(Coordinate src, Coordinate dest, const PacketMeta& meta,
                     uint64_t cycle) {
        ++delivered_;
        if (measure_active_) ++delivered_while_measuring_;
        uint64_t key = pair_key(src, dest);
        uint32_t expect = pair_deliver_seq_[key]++;
        if (meta.pair_seq != expect)
            fail_protocol("point-to-point ordering violated ", to_string(src),
                          " -> ", to_string(dest), ": delivered seq ",
                          meta.pair_seq, ", expected ", expect);
        if (meta.measured) {
            records_.push_back(PacketRecord{src, dest, meta.arrival_cycle,
                                            meta.fire_cycle, cycle,
                                            meta.router_hops});
        }
    }

    void on_return_delivery() { ++credits_delivered_; }
    void on_reply_injected() { ++replies_injected_; }

    // -- router events ------------------------------------------------------
    // net: 0 forward, 1 reverse.
    void on_hop(int net, std::size_t tile, Direction in, Direction out) {
        turn_count_[net][dir_index(in)][dir_index(out)]++;
        link_words_[net][tile * 5 + dir_index(out)]++;
    }
    void on_backpressure(int net) { ++backpressure_events_[net]; }

    void size_links(std::size_t tiles) {
        link_words_[0].assign(tiles * 5, 0);
        link_words_[1].assign(tiles * 5, 0);
    }
    uint64_t link_words(int net, std::size_t tile, Direction out) const {
        return link_words_[net][tile * 5 + dir_index(out)];
    }

    void add_flag(std::string s) { flags_.push_back(std::move(s)); }
    void count_credit_warning() { ++credit_warnings_; }

    // -- queries -------------------------------------------------------------
    uint64_t arrivals() const { return arrivals_; }
    uint64_t fired() const { return fired_; }
    uint64_t delivered() const { return delivered_; }
    uint64_t credits_delivered() const { return credits_delivered_; }
    uint64_t replies_injected() const { return replies_injected_; }
    uint64_t delivered_while_measuring() const { return delivered_while_measuring_; }
    uint64_t turn_count(int net, Direction in, Direction out) const {
        return turn_count_[net][dir_index(in)][dir_index(out)];
    }
    uint64_t backpressure_events(int net) const { return backpressure_events_[net]; }
    uint64_t credit_warnings() const { return credit_warnings_; }
    const std::vector<PacketRecord>& records() const { return records_; }
    const std::vector<std::string>& flags() const { return flags_; }
    uint32_t cols() const { return cols_; }
    uint32_t rows() const { return rows_; }

private:
    static uint64_t pair_key(Coordinate src, Coordinate dest) {
        auto pack = [](Coordinate c) {
            return (uint64_t(c.y) << 16) | uint64_t(c.x);
        };
        return (pack(src) << 32) | pack(dest);
    }

    uint32_t cols_, rows_;
    uint64_t arrivals_ = 0, fired_ = 0, delivered_ = 0, credits_delivered_ = 0;
    uint64_t replies_injected_ = 0;
    uint64_t delivered_while_measuring_ = 0;
    uint64_t measured_arrivals_ = 0;
    uint64_t measure_from_ = 0;
    uint64_t measured_cap_ = UINT64_MAX;
    bool measure_active_ = true;
    std::array<std::array<std::array<uint64_t, 5>, 5>, 2> turn_count_{};
    std::array<std::vector<uint64_t>, 2> link_words_;
    std::array<uint64_t, 2> backpressure_events_{};
    uint64_t credit_warnings_ = 0;
    std::unordered_map<uint64_t, uint32_t> pair_inject_seq_;
    std::unordered_map<uint64_t, uint32_t> pair_deliver_seq_;
    std::vector<PacketRecord> records_;
    std::vector<std::string> flags_;
};

struct LatencySummary {
    double mean = 0.0;
    double median = 0.0;
    double p99 = 0.0;
    uint64_t count = 0;
};

LatencySummary summarize_latencies(const std::vector<PacketRecord>& records);

// Words forwarded out of one router port over a run.
struct LinkUse {
    Coordinate router;
    Direction out;
    int net;  // 0 forward, 1 reverse
    uint64_t words;
    double utilization;  // words per cycle
};

// Credit-counter occupancy summary for one endpoint.
struct CreditUse {
    Coordinate coord;
    uint32_t max_credits;
    uint32_t min_seen;
    double mean;
};

// Aggregated results of one simulation run.
struct SimReport {
    uint32_t cols = 0, rows = 0;
    uint64_t cycles = 0;
    uint64_t arrivals = 0, fired = 0, delivered = 0;
    LatencySummary latency;
    double accepted_per_node_per_cycle = 0.0;
    bool saturated = false;
    bool drained = false;
    uint64_t bisection_crossings = 0;  // over measured records
    uint64_t backpressure_events = 0;
    uint64_t illegal_turn_hops = 0;    // N->W / N->E, both networks
    uint64_t credit_warnings = 0;
    uint32_t min_credits_seen = 0;     // minimum over all endpoints
    std::vector<LinkUse> link_use;     // active links only
    std::vector<CreditUse> credit_use;
    std::vector<PacketRecord> records;
    std::vector<std::string> flags;
};

// True when src and dest lie on opposite sides of the vertical center cut.
inline bool crosses_bisection(Coordinate src, Coordinate dest, uint32_t cols) {
    uint32_t half = cols / 2;
    return (src.x < half) != (dest.x < half);
}

uint64_t count_bisection_crossings(const std::vector<PacketRecord>& records,
                                   uint32_t cols);

}  // namespace manycore
