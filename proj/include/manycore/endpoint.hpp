// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "manycore/fifo.hpp"
#include "manycore/link.hpp"
#include "manycore/packet.hpp"
#include "manycore/report.hpp"

namespace manycore {

struct EndpointConfig {
    uint32_t x_cord_width = 0;  // 0 = derived from fabric dimensions
    uint32_t y_cord_width = 0;
    uint32_t fifo_els = 4;      // endpoint input FIFO depth
    uint32_t data_width = 32;
    uint32_t addr_width = 20;   // local word-address bits
    uint32_t max_out_credits = 16;
    bool warn_out_of_credits = true;
    bool freeze_init = false;

    void validate() const;
};

// ceil(round_trip_cycles * issue_rate): advisory credit sizing so a node can
// stream at the given rate without stalling on credit return.
uint32_t credits_recommended(uint32_t round_trip_cycles, double issue_rate);

// Decoded view of the forward request presented to the core.
struct DecodedRequest {
    uint64_t addr = 0;   // word offset within the data space
    uint64_t data = 0;
    uint64_t mask = 0;   // byte mask
    bool we = false;     // write enable (store)
    OpCode op = OpCode::RemoteLoad;
    Coordinate src;
};

// Tracks the one-reply-per-request obligation of an attached core. The
// standard endpoint can never trip it (replies are synthesized or
// reservation-gated); for the barebones endpoint it reports contract
// violations by the core as report flags.
class ReplyChecker {
public:
    void on_consume(OpCode op) {
        expected_.push_back(op == OpCode::RemoteStore ? ReturnKind::Credit
                                                      : ReturnKind::Data);
        ++consumed_;
    }
    // Returns an error string, or empty when the reply matches.
    std::string on_inject(ReturnKind kind) {
        ++injected_;
        if (expected_.empty())
            return "reply injected with no pending consumed request";
        ReturnKind want = expected_.front();
        expected_.pop_front();
        if (want != kind) return "reply kind does not match consumed request";
        return {};
    }
    // Non-empty when consumed requests still lack replies.
    std::string finalize() const {
        if (!expected_.empty())
            return cat(expected_.size(), " consumed request(s) without a reply");
        return {};
    }
    uint64_t consumed() const { return consumed_; }
    uint64_t injected() const { return injected_; }

private:
    std::deque<ReturnKind> expected_;
    uint64_t consumed_ = 0;
    uint64_t injected_ = 0;
};

// Reverse-injection admission check shared by both endpoint kinds.
//
// `owed` counts consumed requests whose Data reply has not been injected
// yet. A request may be consumed only if, assuming no further drain after
// this cycle, one FIFO slot exists for every owed reply plus this one.
// The check credits a dequeue already granted this cycle, which is what
// lets a depth-2 FIFO sustain one reply per cycle.
bool reverse_injection_gate(const Fifo<RevWord>& rev, std::size_t owed,
                            bool reply_this_cycle);

// Standard endpoint: bridges a core to the two networks. Buffers and
// decodes forward arrivals, enforces the reply-reservation masking rule,
// counts credits, handles the configuration registers, and presents
// returned data through a one-cycle registered slot.
class StandardEndpoint {
public:
    StandardEndpoint(const EndpointConfig& cfg, Coordinate my,
                     const PacketFormat& fmt);

    // -- core-facing signal groups ---------------------------------------
    bool in_v() const { return in_v_; }
    const DecodedRequest& in_request() const { return cur_req_; }
    void in_yumi();                      // consume the presented request
    void respond(uint64_t data);         // in_response (>= 1 cycle after yumi)

    bool out_ready() const;
    // out_request fire; returns false (with optional warning) when blocked.
    // `arrival_cycle` backdates the latency measurement to the source-queue
    // arrival; `measured` marks the packet for the report.
    bool send(const Packet& p);
    bool send(const Packet& p, uint64_t arrival_cycle, bool measured);

    bool returned_v() const { return returned_v_r_; }
    uint64_t returned_data() const { return returned_data_r_; }

    uint32_t out_credits() const { return credits_r_; }
    bool fence_done() const { return credits_r_ == cfg_.max_out_credits; }
    bool frozen() const { return freeze_r_; }
    bool arb_priority() const { return arb_pr_r_; }
    Coordinate my_coord() const { return my_; }
    const EndpointConfig& config() const { return cfg_; }

    // -- fabric-facing ------------------------------------------------------
    Fifo<FwdWord>& in_fifo() { return in_fifo_; }
    void wire(Fifo<FwdWord>* fwd_out, Fifo<RevWord>* rev_out, SimStats* stats);
    void deliver_return(const RevWord& w);  // ValidOnly final delivery
    void begin_cycle(uint64_t cycle);       // masking + config self-consume
    void commit();                          // boundary commit + invariants

    uint32_t outstanding() const { return outstanding_r_; }
    uint32_t min_credits_seen() const { return min_credits_seen_; }
    double mean_credits() const {
        return committed_cycles_ == 0
                   ? double(credits_r_)
                   : double(credits_sum_) / double(committed_cycles_);
    }
    const ReplyChecker& checker() const { return checker_; }
    bool idle() const {
        return in_fifo_.empty() && owed_.empty() && fence_done();
    }

private:
    struct OwedReply {
        Coordinate requester;
        uint64_t consume_cycle;
    };

    void inject(ReturnPacket rp);
    void self_consume_config(const LocalAddress& la);
    uint64_t config_reg_value(ConfigReg reg) const;

    EndpointConfig cfg_;
    Coordinate my_;
    PacketFormat fmt_;
    Fifo<FwdWord> in_fifo_;
    Fifo<FwdWord>* fwd_out_ = nullptr;
    Fifo<RevWord>* rev_out_ = nullptr;
    SimStats* stats_ = nullptr;

    // Registered state, visible to the core this cycle.
    uint32_t credits_r_;
    uint32_t outstanding_r_ = 0;
    bool freeze_r_;
    bool arb_pr_r_ = false;
    bool returned_v_r_ = false;
    uint64_t returned_data_r_ = 0;

    // Staged next-state, applied at commit().
    std::optional<bool> freeze_n_;
    bool arb_toggle_ = false;
    bool returned_v_n_ = false;
    uint64_t returned_data_n_ = 0;
    uint32_t recv_count_ = 0;
    uint32_t sent_count_ = 0;

    // Per-cycle transients.
    uint64_t cycle_ = 0;
    bool in_v_ = false;
    bool yumi_ = false;
    bool responded_ = false;
    bool injected_ = false;
    bool sent_this_cycle_ = false;
    DecodedRequest cur_req_{};

    std::deque<OwedReply> owed_;
    ReplyChecker checker_;
    uint32_t min_credits_seen_;
    uint64_t credits_sum_ = 0;
    uint64_t committed_cycles_ = 0;
};

// Barebones endpoint: input FIFO plus packet decode and raw handshakes.
// No credits, no masking, no config registers; protocol compliance is the
// attached core's job and the ReplyChecker records what it actually did.
class BarebonesEndpoint {
public:
    BarebonesEndpoint(uint32_t fifo_els, Coordinate my, const PacketFormat& fmt);

    bool in_v() const { return in_v_; }
    const Packet& in_packet() const;
    const DecodedRequest& in_request() const { return cur_req_; }
    void in_yumi();

    // Raw reverse injection. reply_capacity() mirrors the standard masking
    // math so a compliant core can self-gate; inject() itself only enforces
    // the FIFO port limits.
    bool reply_capacity(std::size_t owed, bool reply_this_cycle) const;
    void inject_reply(const ReturnPacket& rp);

    // Raw forward send: no credit accounting.
    bool try_send(const Packet& p);

    // Raw reverse delivery view, valid during the cycle it arrives.
    bool returned_v() const { return returned_now_.has_value(); }
    const ReturnPacket& returned() const { return *returned_now_; }

    Coordinate my_coord() const { return my_; }

    Fifo<FwdWord>& in_fifo() { return in_fifo_; }
    void wire(Fifo<FwdWord>* fwd_out, Fifo<RevWord>* rev_out, SimStats* stats);
    void deliver_return(const RevWord& w);
    void begin_cycle(uint64_t cycle);
    void commit();

    const ReplyChecker& checker() const { return checker_; }
    ReplyChecker& checker() { return checker_; }
    bool idle() const { return in_fifo_.empty(); }

private:
    Coordinate my_;
    PacketFormat fmt_;
    Fifo<FwdWord> in_fifo_;
    Fifo<FwdWord>* fwd_out_ = nullptr;
    Fifo<RevWord>* rev_out_ = nullptr;
    SimStats* stats_ = nullptr;

    uint64_t cycle_ = 0;
    bool in_v_ = false;
    bool injected_ = false;
    DecodedRequest cur_req_{};
    std::optional<ReturnPacket> returned_now_;
    ReplyChecker checker_;
};

}  // namespace manycore
