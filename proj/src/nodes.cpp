// SPDX-License-Identifier: Apache-2.0

#include "manycore/nodes.hpp"

namespace manycore {

MemorySlave::MemorySlave(uint32_t data_width, uint32_t latency,
                         std::map<uint64_t, uint64_t> init)
    : mem_(data_width), latency_(latency) {
    if (latency < 1) fail_config("slave reply latency must be >= 1");
    for (const auto& [addr, value] : init) mem_.write_full(addr, value);
}

void MemorySlave::tick(uint64_t cycle, StandardEndpoint& ep) {
    if (!pending_.empty() && pending_.front().due_cycle <= cycle) {
        ep.respond(pending_.front().data);
        pending_.pop_front();
    }
    if (!ep.in_v()) return;
    const DecodedRequest& rq = ep.in_request();
    ep.in_yumi();  // we can always handle the request
    switch (rq.op) {
        case OpCode::RemoteStore:
            mem_.write_masked(rq.addr, rq.data, rq.mask);
            break;
        case OpCode::RemoteLoad:
            pending_.push_back({cycle + latency_, mem_.read(rq.addr)});
            break;
        case OpCode::RemoteSwapAq: {
            uint64_t old = mem_.read(rq.addr);
            if (old == 0) mem_.write_full(rq.addr, rq.data);
            pending_.push_back({cycle + latency_, old});
            break;
        }
        case OpCode::RemoteSwapRl: {
            uint64_t old = mem_.read(rq.addr);
            mem_.write_full(rq.addr, rq.data);
            pending_.push_back({cycle + latency_, old});
            break;
        }
    }
}

void SequenceMaster::tick(uint64_t cycle, StandardEndpoint& ep) {
    const uint64_t full_mask = (uint64_t(1) << (ep.config().data_width / 8)) - 1;

    if (ep.returned_v()) {
        uint64_t expected = responses_seen_;
        uint64_t returned = ep.returned_data();
        responses_.push_back(
            Response{cycle - first_read_fire_, returned, expected});
        if (returned != expected)
            errors_.push_back(cat("cycle ", cycle, ": returned=", returned,
                                  " expected=", expected));
        ++responses_seen_;
        if (state_ == State::Reading && responses_seen_ == cfg_.count)
            state_ = State::Done;
    }

    if (ep.frozen()) return;

    switch (state_) {
        case State::Writing:
            if (wr_issued_ == cfg_.count) {
                state_ = State::Fence;
                break;
            }
            if (ep.send(make_store(cfg_.base_addr + wr_issued_, wr_issued_,
                                   full_mask, ep.my_coord(), cfg_.dest)))
                ++wr_issued_;
            break;
        case State::Fence:
            // Issue nothing until every outstanding store has returned its
            // credit.
            if (ep.fence_done()) {
                fence_passed_ = true;
                state_ = cfg_.count == 0 ? State::Done : State::Reading;
            }
            break;
        case State::Reading:
            if (rd_issued_ < cfg_.count) {
                if (ep.send(make_load(cfg_.base_addr + rd_issued_,
                                      ep.my_coord(), cfg_.dest))) {
                    if (rd_issued_ == 0) first_read_fire_ = cycle;
                    ++rd_issued_;
                }
            }
            break;
        case State::Done:
            break;
    }
}

void StreamingMaster::tick(uint64_t cycle, StandardEndpoint& ep) {
    (void)cycle;
    uint32_t outstanding = ep.config().max_out_credits - ep.out_credits();
    if (outstanding > max_outstanding_) max_outstanding_ = outstanding;
    if (done_) return;
    if (sent_ == cfg_.total) {
        if (ep.fence_done()) done_ = true;
        return;
    }
    if (ep.frozen()) return;
    if (outstanding >= cfg_.peer_capacity) return;  // Option 2 stall
    const uint64_t full_mask = (uint64_t(1) << (ep.config().data_width / 8)) - 1;
    if (ep.send(make_store(cfg_.base_addr + (sent_ % 16), sent_, full_mask,
                           ep.my_coord(), cfg_.dest)))
        ++sent_;
}

void LockContender::tick(uint64_t cycle, StandardEndpoint& ep) {
    (void)cycle;
    if (ep.returned_v()) {
        uint64_t old = ep.returned_data();
        if (state_ == State::WaitAcquire) {
            if (old == 0) {
                in_cs_ = true;
                cs_left_ = cfg_.cs_cycles;
                state_ = State::InCs;
            } else {
                state_ = State::TryAcquire;  // lost, retry
            }
        } else if (state_ == State::WaitRelease) {
            if (old != cfg_.my_id)
                errors_.push_back(cat("release read back ", old, ", expected ",
                                      cfg_.my_id));
            ++acquisitions_;
            state_ = acquisitions_ == cfg_.target_acquisitions
                         ? State::Done
                         : State::TryAcquire;
        }
    }

    if (ep.frozen()) return;

    switch (state_) {
        case State::TryAcquire:
            if (ep.send(make_swap(OpCode::RemoteSwapAq, cfg_.lock_addr,
                                  cfg_.my_id, ep.my_coord(), cfg_.lock_home)))
                state_ = State::WaitAcquire;
            break;
        case State::InCs:
            if (cs_left_ > 0) --cs_left_;
            if (cs_left_ == 0) state_ = State::Release;
            break;
        case State::Release:
            if (ep.send(make_swap(OpCode::RemoteSwapRl, cfg_.lock_addr, 0,
                                  ep.my_coord(), cfg_.lock_home))) {
                in_cs_ = false;  // done touching the resource once released
                state_ = State::WaitRelease;
            }
            break;
        default:
            break;
    }
}

void ConfigScriptNode::tick(uint64_t cycle, StandardEndpoint& ep) {
    (void)cycle;
    if (ep.returned_v() && awaiting_) {
        load_results_.push_back(ep.returned_data());
        awaiting_ = false;
        ++pc_;
    }
    if (awaiting_ || pc_ >= steps_.size()) return;

    const Step& st = steps_[pc_];
    switch (st.kind) {
        case OpKind::Delay:
            if (st.arg == 0) {
                ++pc_;
                break;
            }
            if (delay_left_ == 0) delay_left_ = st.arg;
            if (--delay_left_ == 0) ++pc_;
            break;
        case OpKind::StoreConfig: {
            uint64_t addr = config_space_addr(addr_width_, st.offset);
            const uint64_t mask =
                (uint64_t(1) << (ep.config().data_width / 8)) - 1;
            if (ep.send(make_store(addr, st.arg, mask, ep.my_coord(), st.dest)))
                ++pc_;
            break;
        }
        case OpKind::LoadConfig: {
            uint64_t addr = config_space_addr(addr_width_, st.offset);
            if (ep.send(make_load(addr, ep.my_coord(), st.dest)))
                awaiting_ = true;
            break;
        }
        case OpKind::StoreData: {
            const uint64_t mask =
                (uint64_t(1) << (ep.config().data_width / 8)) - 1;
            if (ep.send(make_store(st.offset, st.arg, mask, ep.my_coord(),
                                   st.dest)))
                ++pc_;
            break;
        }
        case OpKind::LoadData:
            if (ep.send(make_load(st.offset, ep.my_coord(), st.dest)))
                awaiting_ = true;
            break;
        case OpKind::Fence:
            // Hold until every prior request has completed.
            if (ep.fence_done()) ++pc_;
            break;
    }
}

void OrderingDemoMaster::tick(uint64_t cycle, StandardEndpoint& ep) {
    if (ep.returned_v())
        returns_.push_back(Return{cycle, ep.returned_data()});
    if (ep.frozen()) return;
    if (issued_ == 0) {
        if (ep.send(make_load(cfg_.addr, ep.my_coord(), cfg_.far))) ++issued_;
    } else if (issued_ == 1) {
        if (ep.send(make_load(cfg_.addr, ep.my_coord(), cfg_.near))) ++issued_;
    }
}

IoVirtualMeshNode::IoVirtualMeshNode(const Config& cfg) : cfg_(cfg) {
    if (cfg.span < 1) fail_config("io span must be >= 1");
    if (cfg.latency < 1) fail_config("io reply latency must be >= 1");
    stores_.reserve(cfg.span);
    for (uint32_t i = 0; i < cfg.span; ++i)
        stores_.emplace_back(cfg.data_width);
}

uint64_t IoVirtualMeshNode::peek(uint32_t y, uint64_t addr) const {
    if (y < cfg_.base.y || y >= cfg_.base.y + cfg_.span)
        fail_config("io peek outside claimed span");
    return stores_[y - cfg_.base.y].read(addr);
}

void IoVirtualMeshNode::tick(uint64_t cycle, BarebonesEndpoint& ep) {
    if (!pending_.empty() && pending_.front().due_cycle <= cycle) {
        ep.inject_reply(ReturnPacket{ReturnKind::Data, pending_.front().data,
                                     pending_.front().requester});
        pending_.pop_front();
    }
    if (!ep.in_v()) return;

    const Packet& pkt = ep.in_packet();
    if (pkt.dest.x != cfg_.base.x || pkt.dest.y < cfg_.base.y ||
        pkt.dest.y >= cfg_.base.y + cfg_.span)
        fail_protocol("io node at ", to_string(cfg_.base), " span ", cfg_.span,
                      ": packet for unclaimed coordinate ",
                      to_string(pkt.dest));
    WordStore& store = stores_[pkt.dest.y - cfg_.base.y];

    // Consume only when the reply can be honored, mirroring the standard
    // endpoint's reservation rule over the raw interface.
    bool reply_now = pkt.op == OpCode::RemoteStore;
    if (!ep.reply_capacity(pending_.size(), reply_now)) return;

    Packet p = pkt;  // in_yumi invalidates the head reference
    ep.in_yumi();
    switch (p.op) {
        case OpCode::RemoteStore:
            store.write_masked(p.addr, p.data, p.op_ex);
            ep.inject_reply(ReturnPacket{ReturnKind::Credit, 0, p.src});
            break;
        case OpCode::RemoteLoad:
            pending_.push_back({cycle + cfg_.latency, store.read(p.addr), p.src});
            break;
        case OpCode::RemoteSwapAq: {
            uint64_t old = store.read(p.addr);
            if (old == 0) store.write_full(p.addr, p.data);
            pending_.push_back({cycle + cfg_.latency, old, p.src});
            break;
        }
        case OpCode::RemoteSwapRl: {
            uint64_t old = store.read(p.addr);
            store.write_full(p.addr, p.data);
            pending_.push_back({cycle + cfg_.latency, old, p.src});
            break;
        }
    }
}

}  // namespace manycore
