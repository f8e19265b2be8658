// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "manycore/fabric.hpp"
#include "manycore/report.hpp"
#include "manycore/traffic.hpp"

namespace manycore {

// Saturation limit of a k x k mesh under uniform random traffic: each
// round of k^2 packets puts k^2/4 crossings on each direction of the
// bisection's k links, so nodes can inject at most 4/k packets per cycle.
double bisection_bound(uint32_t k);

// A conservative variant that charges both crossing directions to one set
// of k links. Measured saturation falls between the two.
double bisection_bound_conservative(uint32_t k);

// Builds a cols x rows fabric where every interior coordinate runs an
// open-loop traffic generator (and services incoming traffic at line
// rate). Credits default to the bandwidth-delay product of the longest
// round trip.
FabricConfig make_traffic_fabric(uint32_t cols, uint32_t rows,
                                 const TrafficSpec& spec, uint64_t seed);

// Warmup, measure, drain; latency measured from source-queue arrival.
// Saturation is flagged when the mean source-queue depth grows strictly
// across three consecutive windows or the cycle budget runs out before the
// fabric drains.
SimReport run_experiment(Fabric& fabric, const TrafficSpec& spec);

SimReport run_experiment(uint32_t cols, uint32_t rows, const TrafficSpec& spec,
                         uint64_t seed);

// ---------------------------------------------------------------------------

struct ExperimentPlan {
    uint32_t cols = 8, rows = 8;
    TrafficPattern pattern = TrafficPattern::UniformRandom;
    std::vector<double> rates;   // sorted ascending
    uint32_t seeds_per_point = 1;
    uint64_t base_seed = 1;
    TrafficSpec base;            // rate/pattern overridden per point
    std::string output_path;

    void validate() const;
};

struct SweepRow {
    TrafficPattern pattern;
    uint32_t cols, rows;
    double rate;
    double rate_normalized;
    uint64_t seed;
    uint64_t injected;
    uint64_t delivered;
    double accepted;
    double mean_latency;
    double median_latency;
    double p99_latency;
    bool saturated;
    uint64_t bisection_crossings;
};

// Stable CSV schema; the header is part of the tool contract.
extern const char* const kSweepCsvHeader;

std::string sweep_row_csv(const SweepRow& row);

// Runs every (rate, seed) point on a small worker pool; rows come back in
// plan order regardless of scheduling.
std::vector<SweepRow> run_sweep(const ExperimentPlan& plan,
                                unsigned threads = 0);

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path);

}  // namespace manycore
