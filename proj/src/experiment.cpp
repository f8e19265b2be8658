// SPDX-License-Identifier: Apache-2.0

#include "manycore/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

namespace manycore {

double bisection_bound(uint32_t k) {
    if (k < 2) fail_config("bisection bound needs k >= 2");
    return 4.0 / double(k);
}

double bisection_bound_conservative(uint32_t k) {
    if (k < 2) fail_config("bisection bound needs k >= 2");
    return 2.0 / double(k);
}

FabricConfig make_traffic_fabric(uint32_t cols, uint32_t rows,
                                 const TrafficSpec& spec, uint64_t seed) {
    spec.validate(cols, rows);
    FabricConfig fc;
    fc.cols = cols;
    fc.rows = rows;
    fc.seed = seed;
    fc.endpoint.max_out_credits =
        credits_recommended(Fabric::max_round_trip_cycles(cols, rows), 1.0);
    for (uint32_t y = 0; y < rows; ++y) {
        for (uint32_t x = 0; x < cols; ++x) {
            TrafficGenSpec ts;
            ts.cfg.rate = spec.injection_rate;
            ts.cfg.store_fraction = spec.store_fraction;
            ts.cfg.pattern = spec.pattern;
            fc.nodes.emplace(Coordinate{x, y}, ts);
        }
    }
    return fc;
}

SimReport run_experiment(Fabric& fabric, const TrafficSpec& spec) {
    spec.validate(fabric.config().cols, fabric.config().rows);
    SimStats& stats = fabric.stats();
    stats.set_measure_from(spec.warmup_cycles);
    stats.set_measured_cap(spec.measure_packets);
    stats.set_measure_active(false);

    auto nodes = fabric.traffic_nodes();
    if (nodes.empty()) fail_config("experiment fabric has no traffic nodes");

    const uint64_t measure_start = spec.warmup_cycles;
    bool saturated = false;
    bool budget_hit = false;

    // Source-queue depth per window, for the saturation test. A window
    // triple only counts once the queues hold real backlog, so idle-load
    // noise cannot trip the detector.
    std::vector<double> window_depths;
    double depth_acc = 0;
    uint64_t depth_samples = 0;
    auto close_window = [&]() {
        if (depth_samples == 0) return;
        window_depths.push_back(depth_acc / double(depth_samples));
        depth_acc = 0;
        depth_samples = 0;
        std::size_t n = window_depths.size();
        if (n >= 3 && window_depths[n - 1] > window_depths[n - 2] &&
            window_depths[n - 2] > window_depths[n - 3] &&
            window_depths[n - 1] >= 1.0)
            saturated = true;
    };

    // Warmup + measurement: run until the measured arrival quota fills and
    // at least three detection windows have closed.
    uint64_t measure_end = 0;
    while (stats.measured_arrivals() < spec.measure_packets ||
           window_depths.size() < 3) {
        if (fabric.cycle() >= spec.max_cycles) {
            budget_hit = true;
            break;
        }
        if (fabric.cycle() == measure_start) stats.set_measure_active(true);
        fabric.tick();
        if (fabric.cycle() > measure_start) {
            uint64_t q = 0;
            for (auto* n : nodes) q += n->queue_depth();
            depth_acc += double(q) / double(nodes.size());
            ++depth_samples;
            if (depth_samples == spec.window_cycles) close_window();
        }
    }
    measure_end = fabric.cycle();
    stats.set_measure_active(false);

    // Drain: stop arrivals and let everything land.
    bool drained = false;
    if (spec.drain && !budget_hit) {
        for (auto* n : nodes) n->set_arrivals_enabled(false);
        while (!fabric.quiescent()) {
            if (fabric.cycle() >= spec.max_cycles) {
                budget_hit = true;
                break;
            }
            fabric.tick();
        }
        drained = fabric.quiescent();
    }
    if (budget_hit) saturated = true;

    fabric.finalize_checkers();

    SimReport rep;
    rep.cols = fabric.config().cols;
    rep.rows = fabric.config().rows;
    rep.cycles = fabric.cycle();
    rep.arrivals = stats.arrivals();
    rep.fired = stats.fired();
    rep.delivered = stats.delivered();
    rep.records = stats.records();
    rep.latency = summarize_latencies(rep.records);
    uint64_t window = measure_end > measure_start ? measure_end - measure_start : 1;
    rep.accepted_per_node_per_cycle =
        double(stats.delivered_while_measuring()) /
        (double(nodes.size()) * double(window));
    rep.saturated = saturated;
    rep.drained = drained;
    rep.bisection_crossings =
        rep.cols >= 2 ? count_bisection_crossings(rep.records, rep.cols) : 0;
    rep.backpressure_events =
        stats.backpressure_events(0) + stats.backpressure_events(1);
    rep.illegal_turn_hops = 0;
    for (int net = 0; net < 2; ++net) {
        rep.illegal_turn_hops +=
            stats.turn_count(net, Direction::N, Direction::W);
        rep.illegal_turn_hops +=
            stats.turn_count(net, Direction::N, Direction::E);
    }
    rep.credit_warnings = stats.credit_warnings();
    rep.min_credits_seen = fabric.min_credits_seen();
    rep.link_use = fabric.link_use();
    rep.credit_use = fabric.credit_use();
    rep.flags = stats.flags();
    return rep;
}

SimReport run_experiment(uint32_t cols, uint32_t rows, const TrafficSpec& spec,
                         uint64_t seed) {
    FabricConfig fc = make_traffic_fabric(cols, rows, spec, seed);
    Fabric fabric(fc);
    return run_experiment(fabric, spec);
}

void ExperimentPlan::validate() const {
    if (rates.empty()) fail_config("sweep needs at least one injection rate");
    if (!std::is_sorted(rates.begin(), rates.end()))
        fail_config("sweep rates must be sorted ascending");
    for (double r : rates)
        if (!(r > 0.0) || r > 1.0)
            fail_config("sweep rate ", r, " outside (0,1]");
    if (seeds_per_point < 1) fail_config("seeds_per_point must be >= 1");
    base.validate(cols, rows);
}

const char* const kSweepCsvHeader =
    "pattern,cols,rows,rate,rate_norm,seed,injected,delivered,accepted,"
    "mean_latency,median_latency,p99_latency,saturated,bisection_crossings";

std::string sweep_row_csv(const SweepRow& r) {
    std::ostringstream os;
    os << to_string(r.pattern) << ',' << r.cols << ',' << r.rows << ','
       << r.rate << ',' << r.rate_normalized << ',' << r.seed << ','
       << r.injected << ',' << r.delivered << ',' << r.accepted << ','
       << r.mean_latency << ',' << r.median_latency << ',' << r.p99_latency
       << ',' << (r.saturated ? 1 : 0) << ',' << r.bisection_crossings;
    return os.str();
}

std::vector<SweepRow> run_sweep(const ExperimentPlan& plan, unsigned threads) {
    plan.validate();
    struct Point {
        double rate;
        uint64_t seed;
    };
    std::vector<Point> points;
    for (double rate : plan.rates)
        for (uint32_t s = 0; s < plan.seeds_per_point; ++s)
            points.push_back(Point{rate, plan.base_seed + s});

    std::vector<SweepRow> rows(points.size());
    std::vector<std::string> errors(points.size());
    std::atomic<std::size_t> next{0};

    double norm = plan.cols == plan.rows && plan.cols >= 2
                      ? bisection_bound(plan.cols)
                      : 1.0;

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            try {
                TrafficSpec spec = plan.base;
                spec.pattern = plan.pattern;
                spec.injection_rate = points[i].rate;
                SimReport rep = run_experiment(plan.cols, plan.rows, spec,
                                               points[i].seed);
                SweepRow row;
                row.pattern = plan.pattern;
                row.cols = plan.cols;
                row.rows = plan.rows;
                row.rate = points[i].rate;
                row.rate_normalized = points[i].rate / norm;
                row.seed = points[i].seed;
                row.injected = rep.fired;
                row.delivered = rep.delivered;
                row.accepted = rep.accepted_per_node_per_cycle;
                row.mean_latency = rep.latency.mean;
                row.median_latency = rep.latency.median;
                row.p99_latency = rep.latency.p99;
                row.saturated = rep.saturated;
                row.bisection_crossings = rep.bisection_crossings;
                rows[i] = row;
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };

    unsigned n = threads ? threads : std::thread::hardware_concurrency();
    n = std::max(1u, std::min<unsigned>(n, points.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < points.size(); ++i)
        if (!errors[i].empty())
            fail_config("sweep point rate=", points[i].rate, " seed=",
                        points[i].seed, " failed: ", errors[i]);
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path) {
    std::ofstream out(path);
    if (!out) fail_config("cannot open output path '", path, "'");
    out << kSweepCsvHeader << '\n';
    for (const auto& r : rows) out << sweep_row_csv(r) << '\n';
    if (!out) fail_config("write to '", path, "' failed");
}

}  // namespace manycore
