// SPDX-License-Identifier: Apache-2.0

#include "manycore/traffic.hpp"

#include <algorithm>

namespace manycore {

const char* to_string(TrafficPattern p) {
    switch (p) {
        case TrafficPattern::UniformRandom: return "uniform";
        case TrafficPattern::Transpose: return "transpose";
        case TrafficPattern::NearestNeighbor: return "neighbor";
    }
    return "?";
}

TrafficPattern traffic_pattern_from_string(const std::string& s) {
    if (s == "uniform") return TrafficPattern::UniformRandom;
    if (s == "transpose") return TrafficPattern::Transpose;
    if (s == "neighbor" || s == "nearest-neighbor")
        return TrafficPattern::NearestNeighbor;
    fail_config("unknown traffic pattern '", s,
                "' (uniform | transpose | neighbor)");
}

Coordinate gen_destination(TrafficPattern pattern, Coordinate src,
                           uint32_t cols, uint32_t rows,
                           std::mt19937_64& rng) {
    if (cols == 0 || rows == 0) fail_config("mesh dimensions must be >= 1");
    switch (pattern) {
        case TrafficPattern::UniformRandom: {
            uint64_t n = uint64_t(cols) * rows;
            if (n < 2) fail_config("uniform traffic needs >= 2 nodes");
            std::uniform_int_distribution<uint64_t> d(0, n - 2);
            uint64_t self = uint64_t(src.y) * cols + src.x;
            uint64_t pick = d(rng);
            if (pick >= self) ++pick;  // skip the source
            return Coordinate{uint32_t(pick % cols), uint32_t(pick / cols)};
        }
        case TrafficPattern::Transpose:
            if (cols != rows)
                fail_config("transpose traffic requires a square mesh, got ",
                            cols, "x", rows);
            return Coordinate{src.y, src.x};
        case TrafficPattern::NearestNeighbor: {
            std::array<Coordinate, 4> nbrs;
            std::size_t n = 0;
            if (src.x > 0) nbrs[n++] = Coordinate{src.x - 1, src.y};
            if (src.x + 1 < cols) nbrs[n++] = Coordinate{src.x + 1, src.y};
            if (src.y > 0) nbrs[n++] = Coordinate{src.x, src.y - 1};
            if (src.y + 1 < rows) nbrs[n++] = Coordinate{src.x, src.y + 1};
            if (n == 0) fail_config("no neighbors on a 1x1 mesh");
            std::uniform_int_distribution<std::size_t> d(0, n - 1);
            return nbrs[d(rng)];
        }
    }
    fail_config("bad traffic pattern");
}

void TrafficSpec::validate(uint32_t cols, uint32_t rows) const {
    if (!(injection_rate > 0.0) || injection_rate > 1.0)
        fail_config("injection_rate must be in (0,1], got ", injection_rate);
    if (store_fraction < 0.0 || store_fraction > 1.0)
        fail_config("store_fraction must be in [0,1]");
    if (pattern == TrafficPattern::Transpose && cols != rows)
        fail_config("transpose traffic requires a square mesh, got ", cols,
                    "x", rows);
    if (window_cycles == 0) fail_config("window_cycles must be >= 1");
}

TrafficGenNode::TrafficGenNode(const Config& cfg, SimStats* stats)
    : cfg_(cfg), stats_(stats), rng_(cfg.seed), mem_(32) {
    if (!(cfg.rate > 0.0) || cfg.rate > 1.0)
        fail_config("traffic rate must be in (0,1], got ", cfg.rate);
    if (cfg.addr_range == 0) fail_config("traffic addr_range must be >= 1");
    int modes = (cfg.pattern ? 1 : 0) + (!cfg.dest_choices.empty() ? 1 : 0) +
                (cfg.fixed_dest ? 1 : 0);
    if (modes != 1)
        fail_config("traffic node needs exactly one destination mode");
}

Coordinate TrafficGenNode::pick_dest(Coordinate my) {
    if (cfg_.fixed_dest) return *cfg_.fixed_dest;
    if (!cfg_.dest_choices.empty()) {
        std::uniform_int_distribution<std::size_t> d(
            0, cfg_.dest_choices.size() - 1);
        for (int tries = 0; tries < 64; ++tries) {
            Coordinate c = cfg_.dest_choices[d(rng_)];
            if (!(c == my)) return c;
        }
        fail_config("traffic destination list contains only the source");
    }
    return gen_destination(*cfg_.pattern, my, cfg_.cols, cfg_.rows, rng_);
}

void TrafficGenNode::tick(uint64_t cycle, StandardEndpoint& ep) {
    // Slave side: service whatever arrives at line rate.
    if (!slave_pending_.empty() && slave_pending_.front().due_cycle <= cycle) {
        ep.respond(slave_pending_.front().data);
        slave_pending_.pop_front();
    }
    if (ep.in_v()) {
        const DecodedRequest& rq = ep.in_request();
        ep.in_yumi();
        switch (rq.op) {
            case OpCode::RemoteStore:
                mem_.write_masked(rq.addr, rq.data, rq.mask);
                break;
            case OpCode::RemoteLoad:
                slave_pending_.push_back({cycle + 1, mem_.read(rq.addr)});
                break;
            case OpCode::RemoteSwapAq: {
                uint64_t old = mem_.read(rq.addr);
                if (old == 0) mem_.write_full(rq.addr, rq.data);
                slave_pending_.push_back({cycle + 1, old});
                break;
            }
            case OpCode::RemoteSwapRl: {
                uint64_t old = mem_.read(rq.addr);
                mem_.write_full(rq.addr, rq.data);
                slave_pending_.push_back({cycle + 1, old});
                break;
            }
        }
    }

    // Open-loop arrival: the source queue grows even when the network
    // cannot accept.
    if (arrivals_enabled_ && unit_(rng_) < cfg_.rate) {
        Arrival a;
        a.dest = pick_dest(ep.my_coord());
        a.cycle = cycle;
        a.is_store = unit_(rng_) < cfg_.store_fraction;
        a.measured = stats_ ? stats_->on_arrival(cycle) : false;
        queue_.push_back(a);
    }

    // Issue the head of the source queue.
    if (!queue_.empty() && !ep.frozen()) {
        const Arrival& a = queue_.front();
        uint64_t addr = seq_ % cfg_.addr_range;
        uint64_t data = seq_ % 251;
        const uint64_t mask = (uint64_t(1) << (ep.config().data_width / 8)) - 1;
        Packet p = a.is_store
                       ? make_store(addr, data, mask, ep.my_coord(), a.dest)
                       : make_load(addr, ep.my_coord(), a.dest);
        if (ep.send(p, a.cycle, a.measured)) {
            queue_.pop_front();
            ++issued_;
            ++seq_;
        }
    }
}

}  // namespace manycore
