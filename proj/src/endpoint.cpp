// SPDX-License-Identifier: Apache-2.0

#include "manycore/endpoint.hpp"

#include <cmath>
#include <cstdio>

namespace manycore {

void EndpointConfig::validate() const {
    if (fifo_els < 1) fail_config("endpoint fifo_els must be >= 1");
    if (max_out_credits < 1) fail_config("max_out_credits must be >= 1");
    if (addr_width < 2) fail_config("addr_width must be >= 2");
    if (data_width == 0 || data_width % 8 != 0 || data_width > 64)
        fail_config("data_width must be a multiple of 8 in [8,64]");
}

uint32_t credits_recommended(uint32_t round_trip_cycles, double issue_rate) {
    if (round_trip_cycles == 0) fail_config("round_trip_cycles must be > 0");
    if (!(issue_rate > 0.0)) fail_config("issue_rate must be > 0");
    return uint32_t(std::ceil(double(round_trip_cycles) * issue_rate));
}

bool reverse_injection_gate(const Fifo<RevWord>& rev, std::size_t owed,
                            bool reply_this_cycle) {
    std::size_t occ = rev.size() + (rev.enqueued_this_cycle() ? 1 : 0);
    std::size_t deq = rev.dequeued_this_cycle() ? 1 : 0;
    if (reply_this_cycle) {
        // The reply enqueues now: the FIFO port must be free and no owed
        // Data reply may race it onto the single injection port.
        return owed == 0 && rev.size() < rev.depth() &&
               !rev.enqueued_this_cycle();
    }
    return occ - deq + owed + 1 <= rev.depth();
}

namespace {

DecodedRequest decode_request(const Packet& p) {
    DecodedRequest rq;
    rq.addr = p.addr;
    rq.data = p.data;
    rq.mask = p.op_ex;
    rq.we = p.op == OpCode::RemoteStore;
    rq.op = p.op;
    rq.src = p.src;
    return rq;
}

}  // namespace

StandardEndpoint::StandardEndpoint(const EndpointConfig& cfg, Coordinate my,
                                   const PacketFormat& fmt)
    : cfg_(cfg),
      my_(my),
      fmt_(fmt),
      in_fifo_(cfg.fifo_els),
      credits_r_(cfg.max_out_credits),
      freeze_r_(cfg.freeze_init),
      min_credits_seen_(cfg.max_out_credits) {
    cfg_.validate();
    fmt_.validate();
}

void StandardEndpoint::wire(Fifo<FwdWord>* fwd_out, Fifo<RevWord>* rev_out,
                            SimStats* stats) {
    fwd_out_ = fwd_out;
    rev_out_ = rev_out;
    stats_ = stats;
}

void StandardEndpoint::begin_cycle(uint64_t cycle) {
    cycle_ = cycle;
    const FwdWord* h = in_fifo_.head();
    if (!h) return;
    LocalAddress la = decode_local_address(h->pkt.addr, cfg_.addr_width);
    if (la.is_config) {
        // Config traffic never reaches the core; the endpoint consumes it
        // itself and synthesizes the reply in the same cycle.
        if (reverse_injection_gate(*rev_out_, owed_.size(), true))
            self_consume_config(la);
        return;
    }
    bool reply_now = h->pkt.op == OpCode::RemoteStore;
    if (reverse_injection_gate(*rev_out_, owed_.size(), reply_now)) {
        in_v_ = true;
        cur_req_ = decode_request(h->pkt);
        cur_req_.addr = la.word_offset;
    }
}

void StandardEndpoint::in_yumi() {
    if (!in_v_) fail_protocol("endpoint ", to_string(my_),
                              ": yumi asserted without in_v");
    if (yumi_) fail_protocol("endpoint ", to_string(my_),
                             ": second yumi in one cycle");
    yumi_ = true;
    in_v_ = false;
    FwdWord w = in_fifo_.dequeue();
    checker_.on_consume(w.pkt.op);
    if (stats_) stats_->on_delivery(w.pkt.src, w.pkt.dest, w.meta, cycle_);
    if (w.pkt.op == OpCode::RemoteStore) {
        inject(ReturnPacket{ReturnKind::Credit, 0, w.pkt.src});
    } else {
        owed_.push_back(OwedReply{w.pkt.src, cycle_});
    }
}

void StandardEndpoint::respond(uint64_t data) {
    if (responded_) fail_protocol("endpoint ", to_string(my_),
                                  ": second in_response in one cycle");
    if (owed_.empty())
        fail_protocol("endpoint ", to_string(my_),
                      ": in_response with no outstanding consumed request");
    if (owed_.front().consume_cycle == cycle_)
        fail_protocol("endpoint ", to_string(my_),
                      ": in_response in the same cycle as its in_request");
    responded_ = true;
    ReturnPacket rp{ReturnKind::Data, data & fmt_.data_mask(),
                    owed_.front().requester};
    owed_.pop_front();
    inject(rp);
}

void StandardEndpoint::inject(ReturnPacket rp) {
    if (injected_)
        fail_protocol("endpoint ", to_string(my_),
                      ": two reverse injections in one cycle");
    std::string err = checker_.on_inject(rp.kind);
    if (!err.empty()) fail_protocol("endpoint ", to_string(my_), ": ", err);
    rev_out_->enqueue(RevWord{rp});
    injected_ = true;
    if (stats_) stats_->on_reply_injected();
}

void StandardEndpoint::self_consume_config(const LocalAddress& la) {
    FwdWord taken = in_fifo_.dequeue();
    checker_.on_consume(taken.pkt.op);
    if (stats_) stats_->on_delivery(taken.pkt.src, taken.pkt.dest, taken.meta,
                                    cycle_);
    switch (taken.pkt.op) {
        case OpCode::RemoteStore:
            if (la.reg == ConfigReg::Freeze)
                freeze_n_ = (taken.pkt.data & 1) != 0;
            else if (la.reg == ConfigReg::ArbiterPriority)
                arb_toggle_ = !arb_toggle_;  // each write toggles
            inject(ReturnPacket{ReturnKind::Credit, 0, taken.pkt.src});
            break;
        case OpCode::RemoteLoad:
            inject(ReturnPacket{ReturnKind::Data, config_reg_value(la.reg),
                                taken.pkt.src});
            break;
        default:
            fail_protocol("endpoint ", to_string(my_),
                          ": swap op targets the config space");
    }
}

uint64_t StandardEndpoint::config_reg_value(ConfigReg reg) const {
    switch (reg) {
        case ConfigReg::Freeze: return freeze_r_ ? 1 : 0;
        case ConfigReg::ArbiterPriority: return arb_pr_r_ ? 1 : 0;
        case ConfigReg::Reserved: return 0;
    }
    return 0;
}

bool StandardEndpoint::out_ready() const {
    return credits_r_ > 0 && !sent_this_cycle_ && fwd_out_ &&
           fwd_out_->can_enqueue();
}

bool StandardEndpoint::send(const Packet& p) { return send(p, cycle_, false); }

bool StandardEndpoint::send(const Packet& p, uint64_t arrival_cycle,
                            bool measured) {
    if (sent_this_cycle_)
        fail_protocol("endpoint ", to_string(my_),
                      ": second out_request in one cycle");
    if (!(p.src == my_))
        fail_protocol("endpoint ", to_string(my_),
                      ": out_request src ", to_string(p.src),
                      " is not this endpoint");
    fmt_.validate_fields(p);
    if (p.op == OpCode::RemoteLoad && (p.op_ex != 0 || p.data != 0))
        fail_protocol("remote_load must carry zero op_ex and data");
    if (p.op == OpCode::RemoteStore && p.op_ex == 0)
        fail_protocol("remote_store must carry a non-empty byte mask");
    if (credits_r_ == 0) {
        if (cfg_.warn_out_of_credits) {
            if (stats_) stats_->count_credit_warning();
            std::fprintf(stderr,
                         "warning: endpoint %s out of credits at cycle %llu\n",
                         to_string(my_).c_str(),
                         (unsigned long long)cycle_);
        }
        return false;
    }
    if (!fwd_out_->can_enqueue()) return false;

    FwdWord w;
    w.pkt = p;
    w.meta.arrival_cycle = arrival_cycle;
    w.meta.fire_cycle = cycle_;
    w.meta.measured = measured;
    w.meta.pair_seq = stats_ ? stats_->next_pair_seq(p.src, p.dest) : 0;
    fwd_out_->enqueue(w);
    ++sent_count_;
    sent_this_cycle_ = true;
    if (stats_) stats_->on_fire();
    return true;
}

void StandardEndpoint::deliver_return(const RevWord& w) {
    // ValidOnly: always absorbed. At most one reverse delivery per cycle can
    // reach an endpoint (single reverse output port).
    if (!(w.rp.dest == my_))
        fail_protocol("endpoint ", to_string(my_), ": reverse delivery for ",
                      to_string(w.rp.dest));
    ++recv_count_;
    if (recv_count_ > outstanding_r_)
        fail_protocol("endpoint ", to_string(my_),
                      ": reply received with no outstanding request");
    if (w.rp.kind == ReturnKind::Data) {
        if (returned_v_n_)
            fail_protocol("endpoint ", to_string(my_),
                          ": two data returns in one cycle");
        returned_v_n_ = true;
        returned_data_n_ = w.rp.data;
    }
    if (stats_) stats_->on_return_delivery();
}

void StandardEndpoint::commit() {
    in_fifo_.commit();

    uint64_t next = uint64_t(credits_r_) + recv_count_ - sent_count_;
    if (next > cfg_.max_out_credits)
        fail_protocol("endpoint ", to_string(my_),
                      ": credit counter above max_out_credits");
    credits_r_ = uint32_t(next);
    outstanding_r_ = outstanding_r_ + sent_count_ - recv_count_;
    if (credits_r_ + outstanding_r_ != cfg_.max_out_credits)
        fail_protocol("endpoint ", to_string(my_),
                      ": credits + outstanding != max_out_credits");
    if (credits_r_ < min_credits_seen_) min_credits_seen_ = credits_r_;
    credits_sum_ += credits_r_;
    ++committed_cycles_;

    if (freeze_n_) { freeze_r_ = *freeze_n_; freeze_n_.reset(); }
    if (arb_toggle_) { arb_pr_r_ = !arb_pr_r_; arb_toggle_ = false; }

    returned_v_r_ = returned_v_n_;
    returned_data_r_ = returned_data_n_;
    returned_v_n_ = false;
    returned_data_n_ = 0;

    recv_count_ = 0;
    sent_count_ = 0;
    in_v_ = false;
    yumi_ = false;
    responded_ = false;
    injected_ = false;
    sent_this_cycle_ = false;
}

// ---------------------------------------------------------------------------

BarebonesEndpoint::BarebonesEndpoint(uint32_t fifo_els, Coordinate my,
                                     const PacketFormat& fmt)
    : my_(my), fmt_(fmt), in_fifo_(fifo_els < 1 ? 1 : fifo_els) {
    if (fifo_els < 1) fail_config("endpoint fifo_els must be >= 1");
}

void BarebonesEndpoint::wire(Fifo<FwdWord>* fwd_out, Fifo<RevWord>* rev_out,
                             SimStats* stats) {
    fwd_out_ = fwd_out;
    rev_out_ = rev_out;
    stats_ = stats;
}

void BarebonesEndpoint::begin_cycle(uint64_t cycle) {
    cycle_ = cycle;
    const FwdWord* h = in_fifo_.head();
    if (h) {
        in_v_ = true;
        cur_req_ = decode_request(h->pkt);
    }
}

const Packet& BarebonesEndpoint::in_packet() const {
    const FwdWord* h = in_fifo_.head();
    if (!h || !in_v_) fail_protocol("barebones endpoint: in_packet without in_v");
    return h->pkt;
}

void BarebonesEndpoint::in_yumi() {
    if (!in_v_) fail_protocol("barebones endpoint ", to_string(my_),
                              ": yumi asserted without in_v");
    in_v_ = false;
    FwdWord w = in_fifo_.dequeue();
    checker_.on_consume(w.pkt.op);
    if (stats_) stats_->on_delivery(w.pkt.src, w.pkt.dest, w.meta, cycle_);
}

bool BarebonesEndpoint::reply_capacity(std::size_t owed,
                                       bool reply_this_cycle) const {
    return reverse_injection_gate(*rev_out_, owed, reply_this_cycle);
}

void BarebonesEndpoint::inject_reply(const ReturnPacket& rp) {
    if (injected_)
        fail_protocol("barebones endpoint ", to_string(my_),
                      ": two reverse injections in one cycle");
    std::string err = checker_.on_inject(rp.kind);
    if (!err.empty() && stats_)
        stats_->add_flag(cat("endpoint ", to_string(my_), ": ", err));
    rev_out_->enqueue(RevWord{rp});
    injected_ = true;
    if (stats_) stats_->on_reply_injected();
}

bool BarebonesEndpoint::try_send(const Packet& p) {
    fmt_.validate_fields(p);
    if (!fwd_out_ || !fwd_out_->can_enqueue()) return false;
    FwdWord w;
    w.pkt = p;
    w.meta.arrival_cycle = cycle_;
    w.meta.fire_cycle = cycle_;
    w.meta.pair_seq = stats_ ? stats_->next_pair_seq(p.src, p.dest) : 0;
    fwd_out_->enqueue(w);
    if (stats_) stats_->on_fire();
    return true;
}

void BarebonesEndpoint::deliver_return(const RevWord& w) {
    returned_now_ = w.rp;
    if (stats_) stats_->on_return_delivery();
}

void BarebonesEndpoint::commit() {
    in_fifo_.commit();
    in_v_ = false;
    injected_ = false;
    returned_now_.reset();
}

}  // namespace manycore
