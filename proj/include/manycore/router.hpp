// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "manycore/fifo.hpp"
#include "manycore/link.hpp"
#include "manycore/packet.hpp"

namespace manycore {

// Port directions of the 5-port mesh router. Integer encoding is fixed and
// used to index signal arrays.
enum class Direction : uint8_t { P = 0, W = 1, E = 2, N = 3, S = 4 };

constexpr std::array<Direction, 5> kDirections = {
    Direction::P, Direction::W, Direction::E, Direction::N, Direction::S};

constexpr std::size_t dir_index(Direction d) { return std::size_t(d); }

const char* to_string(Direction d);

Direction opposite(Direction d);

// XY dimension-ordered route: resolve X fully, then Y, then deliver local.
inline Direction route_decision(Coordinate my, Coordinate dest) {
    if (dest.x > my.x) return Direction::E;
    if (dest.x < my.x) return Direction::W;
    if (dest.y > my.y) return Direction::S;
    if (dest.y < my.y) return Direction::N;
    return Direction::P;
}

// The crossbar omits the north-to-east/west paths; south-to-east/west is
// allowed so the south edge can host IO.
inline bool check_turn_legal(Direction in, Direction out) {
    return !(in == Direction::N && (out == Direction::W || out == Direction::E));
}

// Round-robin pointer over the 5 input directions, one per output port.
// Grants the first requesting input at or after the pointer in cyclic
// order; the pointer then moves just past the granted input.
class RoundRobinArbiter {
public:
    std::optional<Direction> grant(uint32_t request_mask) {
        if (request_mask == 0) return std::nullopt;
        for (uint32_t i = 0; i < 5; ++i) {
            uint32_t cand = (ptr_ + i) % 5;
            if (request_mask & (1u << cand)) {
                ptr_ = uint8_t((cand + 1) % 5);
                return Direction(cand);
            }
        }
        return std::nullopt;
    }

    Direction pointer() const { return Direction(ptr_); }

private:
    uint8_t ptr_ = 0;  // starts at P
};

struct RouterConfig {
    Coordinate coord;
    // Stub mask over {W,E,N,S}; a stubbed direction never sources or sinks
    // packets. The processor direction is always enabled.
    std::array<bool, 4> stub = {false, false, false, false};
    std::size_t fifo_depth = 2;

    bool stubbed(Direction d) const {
        return d != Direction::P && stub[dir_index(d) - 1];
    }
};

// Input-queued 5-port router: one FIFO per input port, round-robin
// arbitration per output port, no output buffering. The surrounding fabric
// owns the wiring and moves granted words directly into downstream FIFOs.
template <typename Word>
class Router {
public:
    explicit Router(const RouterConfig& cfg)
        : cfg_(cfg),
          in_fifos_{Fifo<Word>(cfg.fifo_depth), Fifo<Word>(cfg.fifo_depth),
                    Fifo<Word>(cfg.fifo_depth), Fifo<Word>(cfg.fifo_depth),
                    Fifo<Word>(cfg.fifo_depth)} {}

    const RouterConfig& config() const { return cfg_; }
    Coordinate coord() const { return cfg_.coord; }

    Fifo<Word>& input(Direction d) { return in_fifos_[dir_index(d)]; }
    const Fifo<Word>& input(Direction d) const { return in_fifos_[dir_index(d)]; }

    RoundRobinArbiter& arbiter(Direction out) { return arbiters_[dir_index(out)]; }

    std::size_t resident() const {
        std::size_t n = 0;
        for (const auto& f : in_fifos_) n += f.size();
        return n;
    }

    void commit() {
        for (auto& f : in_fifos_) f.commit();
    }

private:
    RouterConfig cfg_;
    std::array<Fifo<Word>, 5> in_fifos_;
    std::array<RoundRobinArbiter, 5> arbiters_;
};

}  // namespace manycore
