// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <vector>

#include "manycore/nodes.hpp"
#include "manycore/packet.hpp"

namespace manycore {

enum class TrafficPattern : uint8_t { UniformRandom, Transpose, NearestNeighbor };

const char* to_string(TrafficPattern p);
TrafficPattern traffic_pattern_from_string(const std::string& s);

// Synthetic destination for one packet. Uniform draws over all interior
// nodes except the source; transpose maps (x,y) to (y,x) on a square mesh
// (diagonal nodes self-send); nearest neighbor draws uniformly over the
// 2-4 mesh neighbors.
Coordinate gen_destination(TrafficPattern pattern, Coordinate src,
                           uint32_t cols, uint32_t rows, std::mt19937_64& rng);

struct TrafficSpec {
    TrafficPattern pattern = TrafficPattern::UniformRandom;
    double injection_rate = 0.1;    // packets/node/cycle, in (0, 1]
    double store_fraction = 1.0;    // remainder issued as loads
    uint64_t warmup_cycles = 1000;
    uint64_t measure_packets = 10000;
    bool drain = true;
    uint64_t max_cycles = 300000;
    uint64_t window_cycles = 1000;  // saturation detection windows

    void validate(uint32_t cols, uint32_t rows) const;
};

// Open-loop traffic source with an infinite source queue: arrivals enqueue
// at the configured rate regardless of network backpressure. Also services
// incoming requests like a memory slave so any node may be targeted.
class TrafficGenNode : public StdNode {
public:
    struct Config {
        double rate = 0.1;
        double store_fraction = 1.0;
        // Destination selection: pattern over the mesh, an explicit list to
        // draw from, or a fixed destination.
        std::optional<TrafficPattern> pattern;
        std::vector<Coordinate> dest_choices;
        std::optional<Coordinate> fixed_dest;
        uint32_t cols = 0, rows = 0;
        uint64_t seed = 1;
        uint64_t addr_range = 64;  // data-space words touched
    };

    TrafficGenNode(const Config& cfg, SimStats* stats);

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override {
        return queue_.empty() && slave_pending_.empty();
    }

    void set_arrivals_enabled(bool on) { arrivals_enabled_ = on; }
    std::size_t queue_depth() const { return queue_.size(); }
    uint64_t issued() const { return issued_; }

private:
    struct Arrival {
        Coordinate dest;
        uint64_t cycle;
        bool is_store;
        bool measured;
    };
    struct PendingReply {
        uint64_t due_cycle;
        uint64_t data;
    };

    Coordinate pick_dest(Coordinate my);

    Config cfg_;
    SimStats* stats_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    bool arrivals_enabled_ = true;
    std::deque<Arrival> queue_;
    uint64_t issued_ = 0;
    uint64_t seq_ = 0;
    WordStore mem_{32};
    std::deque<PendingReply> slave_pending_;
};

}  // namespace manycore
