// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <variant>
#include <vector>

#include "manycore/endpoint.hpp"
#include "manycore/nodes.hpp"
#include "manycore/report.hpp"
#include "manycore/router.hpp"
#include "manycore/traffic.hpp"

namespace manycore {

// Node placement descriptors. Interior coordinates (y < rows) default to a
// tieoff; south IO attachments use y == rows.
struct TieoffSpec {};
struct MemorySlaveSpec {
    uint32_t latency = 1;
    std::map<uint64_t, uint64_t> init;
};
struct SequenceMasterSpec { SequenceMaster::Config cfg; };
struct StreamingMasterSpec { StreamingMaster::Config cfg; };
struct LockContenderSpec { LockContender::Config cfg; };
struct ConfigScriptSpec { std::vector<ConfigScriptNode::Step> steps; };
struct OrderingMasterSpec { OrderingDemoMaster::Config cfg; };
struct TrafficGenSpec { TrafficGenNode::Config cfg; };
struct IoSlaveSpec {      // south edge only; span > 1 claims extra rows
    uint32_t span = 1;
    uint32_t latency = 1;
};
struct SilentSinkSpec {}; // south edge, deliberately non-compliant

using NodeSpec =
    std::variant<TieoffSpec, MemorySlaveSpec, SequenceMasterSpec,
                 StreamingMasterSpec, LockContenderSpec, ConfigScriptSpec,
                 OrderingMasterSpec, TrafficGenSpec, IoSlaveSpec,
                 SilentSinkSpec>;

struct FabricConfig {
    uint32_t cols = 1;
    uint32_t rows = 1;
    std::size_t router_fifo_depth = 4;
    EndpointConfig endpoint;
    uint64_t seed = 1;
    std::map<Coordinate, NodeSpec> nodes;

    // Per-node credit overrides (e.g. streaming masters sized to peer FIFOs).
    std::map<Coordinate, uint32_t> credit_override;
};

// The assembled mesh: two routers per tile (forward and reverse networks),
// endpoints and node models on the processor ports, south-edge IO
// attachments, stubs and tieoffs on unconnected directions. tick() runs one
// global two-phase cycle.
class Fabric {
public:
    explicit Fabric(const FabricConfig& cfg);

    Fabric(const Fabric&) = delete;
    Fabric& operator=(const Fabric&) = delete;

    void tick();
    void run(uint64_t cycles);
    uint64_t cycle() const { return cycle_; }

    const FabricConfig& config() const { return cfg_; }
    const PacketFormat& format() const { return fmt_; }
    SimStats& stats() { return *stats_; }
    const SimStats& stats() const { return *stats_; }

    // True when no packet is in flight anywhere: FIFOs empty, all credits
    // home, all nodes idle.
    bool quiescent() const;

    // Records end-of-run checker findings (missing replies and the like)
    // into the stats flags. Call once after draining.
    void finalize_checkers();

    StandardEndpoint* endpoint_at(Coordinate c);
    BarebonesEndpoint* barebones_at(Coordinate c);

    // Forward-network router configuration at a tile (reverse is identical).
    const RouterConfig& router_config(Coordinate c) const;

    template <typename T>
    T* node_at(Coordinate c) {
        for (auto& a : attachments_) {
            if (!(a.coord == c)) continue;
            if (a.std_node)
                if (auto* p = dynamic_cast<T*>(a.std_node.get())) return p;
            if (a.bare_node)
                if (auto* p = dynamic_cast<T*>(a.bare_node.get())) return p;
        }
        return nullptr;
    }

    StdNode* std_node_at(Coordinate c);
    BareNode* bare_node_at(Coordinate c);

    std::vector<TrafficGenNode*> traffic_nodes();
    std::vector<Coordinate> occupied_coords() const;

    uint32_t min_credits_seen() const;
    std::vector<CreditUse> credit_use() const;
    std::vector<LinkUse> link_use() const;  // active links, both networks

    // Zero-load router-FIFO hop count for a src->dest pair on this fabric.
    uint16_t expected_router_hops(Coordinate src, Coordinate dest) const;

    // Longest uncontended round trip in cycles (corner to corner), used to
    // size traffic-generator credits.
    static uint32_t max_round_trip_cycles(uint32_t cols, uint32_t rows);

private:
    struct Attachment {
        Coordinate coord;
        uint32_t span = 1;
        bool at_south_edge = false;            // hangs off a router S port
        std::unique_ptr<StandardEndpoint> std_ep;
        std::unique_ptr<StdNode> std_node;
        std::unique_ptr<BarebonesEndpoint> bare_ep;
        std::unique_ptr<BareNode> bare_node;
        bool tieoff() const { return !std_ep && !bare_ep; }
    };

    struct Tile {
        std::unique_ptr<Router<FwdWord>> fwd;
        std::unique_ptr<Router<RevWord>> rev;
        int p_attach = -1;  // index into attachments_
        int s_attach = -1;  // south IO, last row only
    };

    std::size_t tile_index(uint32_t x, uint32_t y) const {
        return std::size_t(y) * cfg_.cols + x;
    }
    Tile& tile(uint32_t x, uint32_t y) { return tiles_[tile_index(x, y)]; }
    const Tile& tile_c(uint32_t x, uint32_t y) const {
        return tiles_[tile_index(x, y)];
    }

    void validate_and_place(const FabricConfig& cfg);
    void build_tiles();
    void attach_nodes();
    void check_conservation();

    template <typename Word, int NET>
    void network_phase();

    Attachment* attachment_for_output(uint32_t x, uint32_t y, Direction out);
    bool forward_sink_ready(uint32_t x, uint32_t y, Direction out);
    void deliver_forward(Attachment& a, const FwdWord& w);
    void deliver_reverse(Attachment& a, const RevWord& w);

    FabricConfig cfg_;
    PacketFormat fmt_;
    std::unique_ptr<SimStats> stats_;
    std::vector<Tile> tiles_;
    std::vector<Attachment> attachments_;
    uint64_t cycle_ = 0;
};

// Convenience builder mirroring the config-validation contract.
inline Fabric build_fabric(const FabricConfig& cfg) { return Fabric(cfg); }

}  // namespace manycore
