// SPDX-License-Identifier: Apache-2.0

#include "manycore/fabric.hpp"

#include <algorithm>
#include <bit>

namespace manycore {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint32_t width_for(uint32_t max_value) {
    uint32_t w = std::bit_width(max_value);
    return w == 0 ? 1 : w;
}

bool is_bare_spec(const NodeSpec& s) {
    return std::holds_alternative<IoSlaveSpec>(s) ||
           std::holds_alternative<SilentSinkSpec>(s);
}

}  // namespace

Fabric::Fabric(const FabricConfig& cfg) : cfg_(cfg) {
    validate_and_place(cfg);
    build_tiles();
    attach_nodes();
}

void Fabric::validate_and_place(const FabricConfig& cfg) {
    if (cfg.cols < 1 || cfg.rows < 1)
        fail_config("mesh must be at least 1x1, got ", cfg.cols, "x", cfg.rows);
    if (cfg.router_fifo_depth < 1)
        fail_config("router fifo depth must be >= 1");
    cfg_.endpoint.validate();

    uint32_t max_y = cfg.rows - 1;
    for (const auto& [coord, spec] : cfg.nodes) {
        if (coord.x >= cfg.cols)
            fail_config("node at ", to_string(coord), " is outside the ",
                        cfg.cols, "-column mesh");
        if (coord.y > cfg.rows)
            fail_config("node at ", to_string(coord),
                        " is below the IO row; attachments go on the south "
                        "boundary (y == ", cfg.rows, ") only");
        bool south = coord.y == cfg.rows;
        if (is_bare_spec(spec) && !south)
            fail_config("IO node at ", to_string(coord),
                        " must sit on the south boundary row y == ", cfg.rows);
        if (south && std::holds_alternative<TieoffSpec>(spec))
            fail_config("tieoff cannot be declared on the IO row");
        if (const auto* io = std::get_if<IoSlaveSpec>(&spec)) {
            if (io->span < 1) fail_config("io span must be >= 1");
            max_y = std::max(max_y, cfg.rows + io->span - 1);
        }
        if (south) max_y = std::max(max_y, coord.y);
    }

    fmt_.x_cord_width = cfg_.endpoint.x_cord_width
                            ? cfg_.endpoint.x_cord_width
                            : width_for(cfg.cols - 1);
    fmt_.y_cord_width = cfg_.endpoint.y_cord_width
                            ? cfg_.endpoint.y_cord_width
                            : width_for(max_y);
    fmt_.addr_width = cfg_.endpoint.addr_width;
    fmt_.data_width = cfg_.endpoint.data_width;
    fmt_.validate();
    if (width_for(cfg.cols - 1) > fmt_.x_cord_width ||
        width_for(max_y) > fmt_.y_cord_width)
        fail_config("coordinate widths too narrow for this fabric");

    stats_ = std::make_unique<SimStats>(cfg.cols, cfg.rows);
    stats_->size_links(std::size_t(cfg.cols) * cfg.rows);
}

void Fabric::build_tiles() {
    tiles_.resize(std::size_t(cfg_.cols) * cfg_.rows);
    for (uint32_t y = 0; y < cfg_.rows; ++y) {
        for (uint32_t x = 0; x < cfg_.cols; ++x) {
            bool south_attach =
                cfg_.nodes.count(Coordinate{x, cfg_.rows}) != 0 && y == cfg_.rows - 1;
            RouterConfig rc;
            rc.coord = Coordinate{x, y};
            rc.fifo_depth = cfg_.router_fifo_depth;
            rc.stub[dir_index(Direction::W) - 1] = x == 0;
            rc.stub[dir_index(Direction::E) - 1] = x == cfg_.cols - 1;
            rc.stub[dir_index(Direction::N) - 1] = y == 0;
            rc.stub[dir_index(Direction::S) - 1] =
                y == cfg_.rows - 1 && !south_attach;
            Tile& t = tile(x, y);
            t.fwd = std::make_unique<Router<FwdWord>>(rc);
            t.rev = std::make_unique<Router<RevWord>>(rc);
        }
    }
}

void Fabric::attach_nodes() {
    for (const auto& [coord, spec] : cfg_.nodes) {
        if (std::holds_alternative<TieoffSpec>(spec)) continue;

        Attachment a;
        a.coord = coord;
        a.at_south_edge = coord.y == cfg_.rows;

        EndpointConfig ec = cfg_.endpoint;
        ec.x_cord_width = fmt_.x_cord_width;
        ec.y_cord_width = fmt_.y_cord_width;
        if (auto it = cfg_.credit_override.find(coord);
            it != cfg_.credit_override.end())
            ec.max_out_credits = it->second;

        uint64_t node_seed = splitmix64(cfg_.seed ^ coord_key(coord));

        if (const auto* s = std::get_if<MemorySlaveSpec>(&spec)) {
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<MemorySlave>(fmt_.data_width,
                                                       s->latency, s->init);
        } else if (const auto* s = std::get_if<SequenceMasterSpec>(&spec)) {
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<SequenceMaster>(s->cfg);
        } else if (const auto* s = std::get_if<StreamingMasterSpec>(&spec)) {
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<StreamingMaster>(s->cfg);
        } else if (const auto* s = std::get_if<LockContenderSpec>(&spec)) {
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<LockContender>(s->cfg);
        } else if (const auto* s = std::get_if<ConfigScriptSpec>(&spec)) {
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<ConfigScriptNode>(s->steps,
                                                            ec.addr_width);
        } else if (const auto* s = std::get_if<OrderingMasterSpec>(&spec)) {
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<OrderingDemoMaster>(s->cfg);
        } else if (const auto* s = std::get_if<TrafficGenSpec>(&spec)) {
            TrafficGenNode::Config tc = s->cfg;
            if (tc.cols == 0) tc.cols = cfg_.cols;
            if (tc.rows == 0) tc.rows = cfg_.rows;
            tc.seed = node_seed;
            a.std_ep = std::make_unique<StandardEndpoint>(ec, coord, fmt_);
            a.std_node = std::make_unique<TrafficGenNode>(tc, stats_.get());
        } else if (const auto* s = std::get_if<IoSlaveSpec>(&spec)) {
            a.span = s->span;
            a.bare_ep = std::make_unique<BarebonesEndpoint>(ec.fifo_els, coord,
                                                            fmt_);
            IoVirtualMeshNode::Config ic;
            ic.base = coord;
            ic.span = s->span;
            ic.data_width = fmt_.data_width;
            ic.latency = s->latency;
            a.bare_node = std::make_unique<IoVirtualMeshNode>(ic);
        } else if (std::holds_alternative<SilentSinkSpec>(spec)) {
            a.bare_ep = std::make_unique<BarebonesEndpoint>(ec.fifo_els, coord,
                                                            fmt_);
            a.bare_node = std::make_unique<SilentSink>();
        }

        attachments_.push_back(std::move(a));
    }

    // Wire endpoints to their tile's router FIFOs.
    for (std::size_t i = 0; i < attachments_.size(); ++i) {
        Attachment& a = attachments_[i];
        uint32_t ry = a.at_south_edge ? cfg_.rows - 1 : a.coord.y;
        Tile& t = tile(a.coord.x, ry);
        Direction port = a.at_south_edge ? Direction::S : Direction::P;
        if (a.at_south_edge)
            t.s_attach = int(i);
        else
            t.p_attach = int(i);
        Fifo<FwdWord>* fwd_in = &t.fwd->input(port);
        Fifo<RevWord>* rev_in = &t.rev->input(port);
        if (a.std_ep) a.std_ep->wire(fwd_in, rev_in, stats_.get());
        if (a.bare_ep) a.bare_ep->wire(fwd_in, rev_in, stats_.get());
    }
}

Fabric::Attachment* Fabric::attachment_for_output(uint32_t x, uint32_t y,
                                                  Direction out) {
    Tile& t = tile(x, y);
    if (out == Direction::P)
        return t.p_attach >= 0 ? &attachments_[t.p_attach] : nullptr;
    if (out == Direction::S && y == cfg_.rows - 1)
        return t.s_attach >= 0 ? &attachments_[t.s_attach] : nullptr;
    return nullptr;
}

void Fabric::deliver_forward(Attachment& a, const FwdWord& w) {
    if (w.pkt.dest.y >= a.coord.y + a.span || w.pkt.dest.x != a.coord.x ||
        (w.pkt.dest.y < a.coord.y))
        fail_protocol("packet for ", to_string(w.pkt.dest),
                      " delivered to node at ", to_string(a.coord), " span ",
                      a.span);
    if (a.std_ep)
        a.std_ep->in_fifo().enqueue(w);
    else
        a.bare_ep->in_fifo().enqueue(w);
}

void Fabric::deliver_reverse(Attachment& a, const RevWord& w) {
    if (a.std_ep)
        a.std_ep->deliver_return(w);
    else
        a.bare_ep->deliver_return(w);
}

// One arbitration/forwarding pass over one network. NET is 0 for the
// forward network, 1 for the reverse.
template <typename Word, int NET>
void Fabric::network_phase() {
    for (uint32_t y = 0; y < cfg_.rows; ++y) {
        for (uint32_t x = 0; x < cfg_.cols; ++x) {
            Tile& t = tile(x, y);
            Router<Word>* router;
            if constexpr (NET == 0)
                router = t.fwd.get();
            else
                router = t.rev.get();

            // Route each input head once.
            std::array<std::optional<Direction>, 5> want;
            for (Direction in : kDirections) {
                const Word* head = router->input(in).head();
                if (!head) continue;
                Direction out =
                    route_decision(router->coord(), routing_dest(*head));
                if (!check_turn_legal(in, out))
                    fail_protocol("illegal turn ", to_string(in), " -> ",
                                  to_string(out), " at router ",
                                  to_string(router->coord()),
                                  NET == 0 ? " (fwd)" : " (rev)");
                if (router->config().stubbed(out))
                    fail_protocol("packet for ",
                                  to_string(routing_dest(*head)),
                                  " routed toward stubbed direction ",
                                  to_string(out), " at router ",
                                  to_string(router->coord()));
                want[dir_index(in)] = out;
            }

            for (Direction out : kDirections) {
                uint32_t mask = 0;
                for (Direction in : kDirections)
                    if (want[dir_index(in)] == out)
                        mask |= 1u << dir_index(in);
                if (mask == 0) continue;

                // Resolve the downstream sink and its readiness.
                Attachment* attach = attachment_for_output(x, y, out);
                Fifo<Word>* neighbor = nullptr;
                bool ready = false;
                if (out == Direction::P ||
                    (out == Direction::S && y == cfg_.rows - 1)) {
                    if (!attach)
                        fail_protocol("packet routed to tied-off ",
                                      to_string(out), " port at router ",
                                      to_string(router->coord()));
                    if constexpr (NET == 0) {
                        Fifo<FwdWord>& f = attach->std_ep
                                               ? attach->std_ep->in_fifo()
                                               : attach->bare_ep->in_fifo();
                        ready = f.can_enqueue();
                    } else {
                        ready = true;  // ValidOnly final delivery
                    }
                } else {
                    uint32_t nx = x, ny = y;
                    switch (out) {
                        case Direction::W: nx = x - 1; break;
                        case Direction::E: nx = x + 1; break;
                        case Direction::N: ny = y - 1; break;
                        case Direction::S: ny = y + 1; break;
                        default: break;
                    }
                    Tile& nt = tile(nx, ny);
                    if constexpr (NET == 0)
                        neighbor = &nt.fwd->input(opposite(out));
                    else
                        neighbor = &nt.rev->input(opposite(out));
                    ready = neighbor->can_enqueue();
                }

                if (!ready) {
                    stats_->on_backpressure(NET);
                    continue;
                }

                auto granted = router->arbiter(out).grant(mask);
                if (!granted) continue;
                Word w = router->input(*granted).dequeue();
                stats_->on_hop(NET, tile_index(x, y), *granted, out);
                if constexpr (NET == 0) w.meta.router_hops++;

                if (neighbor) {
                    neighbor->enqueue(w);
                } else if constexpr (NET == 0) {
                    deliver_forward(*attach, w);
                } else {
                    deliver_reverse(*attach, w);
                }
            }
        }
    }
}

void Fabric::tick() {
    try {
        network_phase<FwdWord, 0>();
        network_phase<RevWord, 1>();

        for (auto& a : attachments_) {
            if (a.std_ep) a.std_ep->begin_cycle(cycle_);
            if (a.bare_ep) a.bare_ep->begin_cycle(cycle_);
        }
        for (auto& a : attachments_) {
            if (a.std_node) a.std_node->tick(cycle_, *a.std_ep);
            if (a.bare_node) a.bare_node->tick(cycle_, *a.bare_ep);
        }

        for (auto& t : tiles_) {
            t.fwd->commit();
            t.rev->commit();
        }
        for (auto& a : attachments_) {
            if (a.std_ep) a.std_ep->commit();
            if (a.bare_ep) a.bare_ep->commit();
        }

        check_conservation();
        ++cycle_;
    } catch (ProtocolViolation& e) {
        e.set_cycle(cycle_);
        throw;
    }
}

void Fabric::check_conservation() {
    uint64_t fwd_resident = 0, rev_resident = 0;
    for (const auto& t : tiles_) {
        fwd_resident += t.fwd->resident();
        rev_resident += t.rev->resident();
    }
    for (auto& a : attachments_) {
        if (a.std_ep) fwd_resident += a.std_ep->in_fifo().size();
        if (a.bare_ep) fwd_resident += a.bare_ep->in_fifo().size();
    }
    if (stats_->fired() != stats_->delivered() + fwd_resident)
        fail_protocol("forward conservation broken: fired ", stats_->fired(),
                      ", delivered ", stats_->delivered(), ", resident ",
                      fwd_resident);
    if (stats_->replies_injected() != stats_->credits_delivered() + rev_resident)
        fail_protocol("reverse conservation broken: injected ",
                      stats_->replies_injected(), ", delivered ",
                      stats_->credits_delivered(), ", resident ", rev_resident);
}

void Fabric::run(uint64_t cycles) {
    for (uint64_t i = 0; i < cycles; ++i) tick();
}

bool Fabric::quiescent() const {
    for (const auto& t : tiles_) {
        if (t.fwd->resident() != 0 || t.rev->resident() != 0) return false;
    }
    for (const auto& a : attachments_) {
        if (a.std_ep && !a.std_ep->idle()) return false;
        if (a.bare_ep && !a.bare_ep->idle()) return false;
        if (a.std_node && !a.std_node->idle()) return false;
        if (a.bare_node && !a.bare_node->idle()) return false;
    }
    return true;
}

void Fabric::finalize_checkers() {
    for (const auto& a : attachments_) {
        const ReplyChecker* ck = nullptr;
        if (a.std_ep) ck = &a.std_ep->checker();
        if (a.bare_ep) ck = &a.bare_ep->checker();
        if (!ck) continue;
        std::string err = ck->finalize();
        if (!err.empty())
            stats_->add_flag(cat("endpoint ", to_string(a.coord), ": ", err));
    }
}

const RouterConfig& Fabric::router_config(Coordinate c) const {
    if (c.x >= cfg_.cols || c.y >= cfg_.rows)
        fail_config("no router at ", to_string(c));
    return tile_c(c.x, c.y).fwd->config();
}

StandardEndpoint* Fabric::endpoint_at(Coordinate c) {
    for (auto& a : attachments_)
        if (a.coord == c && a.std_ep) return a.std_ep.get();
    return nullptr;
}

BarebonesEndpoint* Fabric::barebones_at(Coordinate c) {
    for (auto& a : attachments_)
        if (a.coord == c && a.bare_ep) return a.bare_ep.get();
    return nullptr;
}

StdNode* Fabric::std_node_at(Coordinate c) {
    for (auto& a : attachments_)
        if (a.coord == c && a.std_node) return a.std_node.get();
    return nullptr;
}

BareNode* Fabric::bare_node_at(Coordinate c) {
    for (auto& a : attachments_)
        if (a.coord == c && a.bare_node) return a.bare_node.get();
    return nullptr;
}

std::vector<TrafficGenNode*> Fabric::traffic_nodes() {
    std::vector<TrafficGenNode*> out;
    for (auto& a : attachments_)
        if (auto* n = dynamic_cast<TrafficGenNode*>(a.std_node.get()))
            out.push_back(n);
    return out;
}

std::vector<Coordinate> Fabric::occupied_coords() const {
    std::vector<Coordinate> out;
    for (const auto& a : attachments_) out.push_back(a.coord);
    return out;
}

uint32_t Fabric::min_credits_seen() const {
    uint32_t m = UINT32_MAX;
    for (const auto& a : attachments_)
        if (a.std_ep) m = std::min(m, a.std_ep->min_credits_seen());
    return m == UINT32_MAX ? 0 : m;
}

std::vector<CreditUse> Fabric::credit_use() const {
    std::vector<CreditUse> out;
    for (const auto& a : attachments_)
        if (a.std_ep)
            out.push_back(CreditUse{a.coord,
                                    a.std_ep->config().max_out_credits,
                                    a.std_ep->min_credits_seen(),
                                    a.std_ep->mean_credits()});
    return out;
}

std::vector<LinkUse> Fabric::link_use() const {
    std::vector<LinkUse> out;
    double cyc = cycle_ > 0 ? double(cycle_) : 1.0;
    for (uint32_t y = 0; y < cfg_.rows; ++y)
        for (uint32_t x = 0; x < cfg_.cols; ++x)
            for (int net = 0; net < 2; ++net)
                for (Direction d : kDirections) {
                    uint64_t words =
                        stats_->link_words(net, tile_index(x, y), d);
                    if (words == 0) continue;
                    out.push_back(LinkUse{Coordinate{x, y}, d, net, words,
                                          double(words) / cyc});
                }
    return out;
}

uint16_t Fabric::expected_router_hops(Coordinate src, Coordinate dest) const {
    uint32_t r0 = std::min(src.y, cfg_.rows - 1);
    uint32_t rd = std::min(dest.y, cfg_.rows - 1);
    uint32_t dx = src.x > dest.x ? src.x - dest.x : dest.x - src.x;
    uint32_t dy = r0 > rd ? r0 - rd : rd - r0;
    return uint16_t(dx + dy + 1);
}

uint32_t Fabric::max_round_trip_cycles(uint32_t cols, uint32_t rows) {
    if (cols < 1 || rows < 1) fail_config("mesh must be at least 1x1");
    uint32_t routers = (cols - 1) + (rows - 1) + 1;
    // forward: router FIFOs + endpoint FIFO; one cycle for the reply
    // register at the slave; reverse: router FIFOs; one cycle for the
    // returned-data register at the master.
    return 2 * routers + 3;
}

}  // namespace manycore
