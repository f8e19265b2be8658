// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "manycore/endpoint.hpp"
#include "manycore/packet.hpp"

namespace manycore {

// A core wired behind a standard endpoint. tick() runs once per cycle after
// the endpoint has evaluated its handshakes; it sees pre-cycle register
// state and stages effects through the endpoint calls.
class StdNode {
public:
    virtual ~StdNode() = default;
    virtual void tick(uint64_t cycle, StandardEndpoint& ep) = 0;
    virtual bool idle() const { return true; }
};

// A core wired behind a barebones endpoint; protocol compliance is its own
// responsibility.
class BareNode {
public:
    virtual ~BareNode() = default;
    virtual void tick(uint64_t cycle, BarebonesEndpoint& ep) = 0;
    virtual bool idle() const { return true; }
};

// Word store shared by the memory-style nodes: sparse backing with
// byte-masked writes.
class WordStore {
public:
    explicit WordStore(uint32_t data_width) : data_width_(data_width) {}

    uint64_t read(uint64_t addr) const {
        auto it = mem_.find(addr);
        return it == mem_.end() ? 0 : it->second;
    }

    void write_masked(uint64_t addr, uint64_t data, uint64_t byte_mask) {
        uint64_t bitmask = 0;
        for (uint32_t b = 0; b < data_width_ / 8; ++b)
            if (byte_mask & (uint64_t(1) << b))
                bitmask |= uint64_t(0xff) << (8 * b);
        uint64_t old = read(addr);
        mem_[addr] = (old & ~bitmask) | (data & bitmask);
    }

    void write_full(uint64_t addr, uint64_t data) { mem_[addr] = data; }

private:
    uint32_t data_width_;
    std::unordered_map<uint64_t, uint64_t> mem_;
};

// General memory slave: always consumes presented requests, commits stores
// at consume time, answers loads and swaps after a fixed latency (>= 1).
// swap_aq writes the packet data only when the old word is zero; swap_rl
// exchanges unconditionally; both reply with the old word.
class MemorySlave : public StdNode {
public:
    explicit MemorySlave(uint32_t data_width, uint32_t latency = 1,
                         std::map<uint64_t, uint64_t> init = {});

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override { return pending_.empty(); }

    uint64_t peek(uint64_t addr) const { return mem_.read(addr); }

private:
    struct PendingReply {
        uint64_t due_cycle;
        uint64_t data;
    };
    WordStore mem_;
    uint32_t latency_;
    std::deque<PendingReply> pending_;
};

// Writes a sequence of words to one destination, fences, reads them back,
// and checks each returned word against its expected value in issue order.
class SequenceMaster : public StdNode {
public:
    struct Config {
        uint32_t count = 16;
        uint64_t base_addr = 0;
        Coordinate dest;
    };

    struct Response {
        uint64_t cycles_after_first_issue;
        uint64_t returned;
        uint64_t expected;
    };

    explicit SequenceMaster(const Config& cfg) : cfg_(cfg) {}

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override { return state_ == State::Done; }

    bool done() const { return state_ == State::Done; }
    bool fence_passed() const { return fence_passed_; }
    const std::vector<Response>& responses() const { return responses_; }
    const std::vector<std::string>& errors() const { return errors_; }
    uint64_t issued_reads() const { return rd_issued_; }

private:
    enum class State { Writing, Fence, Reading, Done };
    Config cfg_;
    State state_ = State::Writing;
    uint32_t wr_issued_ = 0;
    uint32_t rd_issued_ = 0;
    uint32_t responses_seen_ = 0;
    uint64_t first_read_fire_ = 0;
    bool fence_passed_ = false;
    std::vector<Response> responses_;
    std::vector<std::string> errors_;
};

// One-to-one streaming producer: stalls when the number of outstanding
// stores reaches the peer's input FIFO capacity, so nothing ever backs up
// into the network.
class StreamingMaster : public StdNode {
public:
    struct Config {
        Coordinate dest;
        uint64_t total = 256;
        uint32_t peer_capacity = 4;
        uint64_t base_addr = 0;
    };

    explicit StreamingMaster(const Config& cfg) : cfg_(cfg) {}

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override { return done_; }

    uint64_t sent() const { return sent_; }
    uint32_t max_outstanding_seen() const { return max_outstanding_; }
    bool done() const { return done_; }

private:
    Config cfg_;
    uint64_t sent_ = 0;
    uint32_t max_outstanding_ = 0;
    bool done_ = false;
};

// Spin-lock contender built on the swap ops: acquires with swap_aq
// (succeeds when the old word was zero), holds for a few cycles, releases
// with swap_rl(0). in_cs() exposes the critical section for the mutual
// exclusion check.
class LockContender : public StdNode {
public:
    struct Config {
        Coordinate lock_home;
        uint64_t lock_addr = 0;
        uint64_t my_id = 1;  // nonzero
        uint32_t target_acquisitions = 4;
        uint32_t cs_cycles = 5;
    };

    explicit LockContender(const Config& cfg) : cfg_(cfg) {}

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override { return state_ == State::Done; }

    bool in_cs() const { return in_cs_; }
    bool done() const { return state_ == State::Done; }
    uint32_t acquisitions() const { return acquisitions_; }
    const std::vector<std::string>& errors() const { return errors_; }

private:
    enum class State { TryAcquire, WaitAcquire, InCs, Release, WaitRelease, Done };
    Config cfg_;
    State state_ = State::TryAcquire;
    bool in_cs_ = false;
    uint32_t cs_left_ = 0;
    uint32_t acquisitions_ = 0;
    std::vector<std::string> errors_;
};

// Scripted config-space master used to drive freeze / arbiter-priority
// registers on a remote endpoint and read them back.
class ConfigScriptNode : public StdNode {
public:
    enum class OpKind { Delay, StoreConfig, LoadConfig, StoreData, LoadData, Fence };
    struct Step {
        OpKind kind;
        uint64_t arg = 0;     // delay cycles or store value
        uint64_t offset = 0;  // config word offset or data address
        Coordinate dest;
    };

    ConfigScriptNode(std::vector<Step> steps, uint32_t addr_width)
        : steps_(std::move(steps)), addr_width_(addr_width) {}

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override { return pc_ >= steps_.size() && !awaiting_; }

    bool done() const { return idle(); }
    const std::vector<uint64_t>& load_results() const { return load_results_; }

private:
    std::vector<Step> steps_;
    uint32_t addr_width_;
    std::size_t pc_ = 0;
    uint64_t delay_left_ = 0;
    bool awaiting_ = false;
    std::vector<uint64_t> load_results_;
};

// Issues two loads back to back, far destination first, and logs the order
// in which the responses come home.
class OrderingDemoMaster : public StdNode {
public:
    struct Config {
        Coordinate far;
        Coordinate near;
        uint64_t addr = 0;
    };

    explicit OrderingDemoMaster(const Config& cfg) : cfg_(cfg) {}

    void tick(uint64_t cycle, StandardEndpoint& ep) override;
    bool idle() const override { return returns_.size() >= 2; }

    struct Return {
        uint64_t cycle;
        uint64_t data;
    };
    const std::vector<Return>& returns() const { return returns_; }

private:
    Config cfg_;
    uint32_t issued_ = 0;
    std::vector<Return> returns_;
};

// South-edge IO device claiming a span of extra Y coordinates at one
// column, behind a barebones endpoint. Behaves like a memory slave with a
// separate backing store per claimed coordinate, and implements the reply
// protocol itself.
class IoVirtualMeshNode : public BareNode {
public:
    struct Config {
        Coordinate base;     // (x, mesh rows)
        uint32_t span = 1;
        uint32_t data_width = 32;
        uint32_t latency = 1;
    };

    explicit IoVirtualMeshNode(const Config& cfg);

    void tick(uint64_t cycle, BarebonesEndpoint& ep) override;
    bool idle() const override { return pending_.empty(); }

    uint64_t peek(uint32_t y, uint64_t addr) const;

private:
    struct PendingReply {
        uint64_t due_cycle;
        uint64_t data;
        Coordinate requester;
    };
    Config cfg_;
    std::vector<WordStore> stores_;
    std::deque<PendingReply> pending_;
};

// Deliberately non-compliant barebones core for checker tests: consumes
// requests and never replies.
class SilentSink : public BareNode {
public:
    void tick(uint64_t cycle, BarebonesEndpoint& ep) override {
        (void)cycle;
        if (ep.in_v()) ep.in_yumi();
    }
};

}  // namespace manycore
