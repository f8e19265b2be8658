// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "manycore/experiment.hpp"
#include "manycore/scenarios.hpp"

using namespace manycore;

namespace {

std::string report_fingerprint(const SimReport& r) {
    std::ostringstream os;
    os << r.cycles << '|' << r.arrivals << '|' << r.fired << '|'
       << r.delivered << '|' << r.latency.mean << '|' << r.latency.p99 << '|'
       << r.bisection_crossings << '|' << r.backpressure_events;
    for (const auto& rec : r.records)
        os << ';' << rec.src.x << ',' << rec.src.y << "->" << rec.dest.x
           << ',' << rec.dest.y << '@' << rec.arrival_cycle << ':'
           << rec.delivered_cycle;
    return os.str();
}

// Upper-tail chi-square critical value via the Wilson-Hilferty cube
// approximation.
double chi2_critical(double df, double z) {
    double a = 2.0 / (9.0 * df);
    double c = 1.0 - a + z * std::sqrt(a);
    return df * c * c * c;
}

}  // namespace

TEST_CASE("empty fabric ticks as a no-op") {
    FabricConfig fc;
    fc.cols = 2;
    fc.rows = 2;
    Fabric f(fc);
    f.run(10);
    CHECK(f.cycle() == 10);
    CHECK(f.quiescent());
    CHECK(f.stats().fired() == 0);
}

TEST_CASE("fabric validation rejects malformed configs") {
    FabricConfig fc;
    fc.cols = 0;
    CHECK_THROWS_AS(Fabric{fc}, ConfigError);

    FabricConfig oob;
    oob.cols = 2;
    oob.rows = 2;
    oob.nodes.emplace(Coordinate{2, 0}, MemorySlaveSpec{});
    CHECK_THROWS_AS(Fabric{oob}, ConfigError);

    FabricConfig deep;
    deep.cols = 2;
    deep.rows = 2;
    deep.nodes.emplace(Coordinate{0, 3}, IoSlaveSpec{});  // below the IO row
    CHECK_THROWS_AS(Fabric{deep}, ConfigError);

    FabricConfig narrow;
    narrow.cols = 8;
    narrow.rows = 8;
    narrow.endpoint.x_cord_width = 2;  // cannot address 8 columns
    CHECK_THROWS_AS(Fabric{narrow}, ConfigError);
}

TEST_CASE("identical seeds produce identical reports") {
    TrafficSpec spec;
    spec.pattern = TrafficPattern::UniformRandom;
    spec.injection_rate = 0.2;
    spec.warmup_cycles = 100;
    spec.measure_packets = 1500;

    SimReport a = run_experiment(4, 4, spec, 77);
    SimReport b = run_experiment(4, 4, spec, 77);
    SimReport c = run_experiment(4, 4, spec, 78);
    CHECK(report_fingerprint(a) == report_fingerprint(b));
    CHECK(report_fingerprint(a) != report_fingerprint(c));
    CHECK(a.drained);
    CHECK(a.arrivals == a.delivered);
}

TEST_CASE("transpose destinations mirror across the diagonal") {
    std::mt19937_64 rng(5);
    CHECK(gen_destination(TrafficPattern::Transpose, {1, 3}, 4, 4, rng) ==
          Coordinate{3, 1});
    // diagonal nodes self-send
    CHECK(gen_destination(TrafficPattern::Transpose, {2, 2}, 4, 4, rng) ==
          Coordinate{2, 2});
    CHECK_THROWS_AS(gen_destination(TrafficPattern::Transpose, {0, 0}, 4, 2,
                                    rng),
                    ConfigError);
}

TEST_CASE("nearest neighbor stays within the mesh") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 500; ++i) {
        Coordinate src{uint32_t(rng() % 4), uint32_t(rng() % 4)};
        Coordinate d =
            gen_destination(TrafficPattern::NearestNeighbor, src, 4, 4, rng);
        uint32_t dist = (d.x > src.x ? d.x - src.x : src.x - d.x) +
                        (d.y > src.y ? d.y - src.y : src.y - d.y);
        CHECK(dist == 1);
        CHECK(d.x < 4);
        CHECK(d.y < 4);
    }
}

TEST_CASE("uniform destinations pass a chi-square test at alpha 0.01") {
    std::mt19937_64 rng(2024);
    const int kDraws = 100000;
    const uint32_t k = 8;
    std::array<int, 64> counts{};
    Coordinate src{3, 4};
    for (int i = 0; i < kDraws; ++i) {
        Coordinate d =
            gen_destination(TrafficPattern::UniformRandom, src, k, k, rng);
        CHECK(!(d == src));
        ++counts[d.y * k + d.x];
    }
    double expected = double(kDraws) / 63.0;
    double chi2 = 0;
    for (uint32_t i = 0; i < 64; ++i) {
        if (i == src.y * k + src.x) {
            CHECK(counts[i] == 0);
            continue;
        }
        double diff = counts[i] - expected;
        chi2 += diff * diff / expected;
    }
    CHECK(chi2 < chi2_critical(62.0, 2.3263));  // alpha = 0.01
}

TEST_CASE("bisection bound formula") {
    CHECK(bisection_bound(16) == doctest::Approx(0.25));  // 1 per 4 cycles
    CHECK(bisection_bound(8) == doctest::Approx(0.5));
    CHECK(bisection_bound(2) == doctest::Approx(2.0));
    CHECK_THROWS_AS(bisection_bound(1), ConfigError);
    CHECK(bisection_bound_conservative(8) == doctest::Approx(0.25));
}

TEST_CASE("2x2 crossing fraction matches the hand count") {
    // 4 nodes, 12 ordered pairs; 2 left x 2 right both ways cross: 8 of 12.
    uint32_t crossing = 0, total = 0;
    for (uint32_t sy = 0; sy < 2; ++sy)
        for (uint32_t sx = 0; sx < 2; ++sx)
            for (uint32_t dy = 0; dy < 2; ++dy)
                for (uint32_t dx = 0; dx < 2; ++dx) {
                    if (sx == dx && sy == dy) continue;
                    ++total;
                    if (crosses_bisection({sx, sy}, {dx, dy}, 2)) ++crossing;
                }
    CHECK(total == 12);
    CHECK(crossing == 8);

    std::vector<PacketRecord> recs;
    for (uint32_t sy = 0; sy < 2; ++sy)
        for (uint32_t sx = 0; sx < 2; ++sx)
            for (uint32_t dy = 0; dy < 2; ++dy)
                for (uint32_t dx = 0; dx < 2; ++dx) {
                    if (sx == dx && sy == dy) continue;
                    recs.push_back(PacketRecord{{sx, sy}, {dx, dy}, 0, 0, 0, 0});
                }
    CHECK(count_bisection_crossings(recs, 2) == 8);
}

TEST_CASE("measured crossing fraction matches the exact expectation") {
    // Exact expectation by enumeration over ordered pairs, self excluded.
    const uint32_t k = 8;
    uint64_t crossing = 0, total = 0;
    for (uint32_t sy = 0; sy < k; ++sy)
        for (uint32_t sx = 0; sx < k; ++sx)
            for (uint32_t dy = 0; dy < k; ++dy)
                for (uint32_t dx = 0; dx < k; ++dx) {
                    if (sx == dx && sy == dy) continue;
                    ++total;
                    if (crosses_bisection({sx, sy}, {dx, dy}, k)) ++crossing;
                }
    double exact = double(crossing) / double(total);

    TrafficSpec spec;
    spec.injection_rate = 0.15;
    spec.warmup_cycles = 300;
    spec.measure_packets = 12000;
    FabricConfig fc = make_traffic_fabric(k, k, spec, 11);
    Fabric f(fc);
    SimReport rep = run_experiment(f, spec);
    REQUIRE(rep.records.size() >= 10000);
    double measured =
        double(rep.bisection_crossings) / double(rep.records.size());
    CHECK(measured == doctest::Approx(exact).epsilon(0.05));

    // Routes stay minimal even under contention.
    for (const auto& rec : rep.records)
        CHECK(rec.router_hops == f.expected_router_hops(rec.src, rec.dest));
}

TEST_CASE("source queues fill at the offered rate even when saturated") {
    // Open-loop arrivals: a saturated network cannot slow them down.
    TrafficSpec spec;
    spec.injection_rate = 0.6;  // far beyond saturation
    spec.warmup_cycles = 200;
    spec.measure_packets = 30000;
    spec.drain = false;
    spec.max_cycles = 20000;
    FabricConfig fc = make_traffic_fabric(8, 8, spec, 23);
    fc.endpoint.warn_out_of_credits = false;
    Fabric f(fc);
    SimReport rep = run_experiment(f, spec);
    double arrival_rate =
        double(rep.arrivals) / (double(rep.cycles) * 64.0);
    CHECK(arrival_rate == doctest::Approx(0.6).epsilon(0.03));
    CHECK(rep.saturated);
    CHECK(rep.delivered < rep.arrivals);  // backlog left in the queues
}

TEST_CASE("near-zero load latency matches the closed-form hop count") {
    const uint32_t k = 8;
    // Zero-load latency per pair: router FIFOs (dx+dy+1) + endpoint FIFO.
    double sum = 0;
    uint64_t n = 0;
    for (uint32_t sy = 0; sy < k; ++sy)
        for (uint32_t sx = 0; sx < k; ++sx)
            for (uint32_t dy = 0; dy < k; ++dy)
                for (uint32_t dx = 0; dx < k; ++dx) {
                    if (sx == dx && sy == dy) continue;
                    uint32_t hops = (dx > sx ? dx - sx : sx - dx) +
                                    (dy > sy ? dy - sy : sy - dy) + 1;
                    sum += hops + 1;
                    ++n;
                }
    double oracle = sum / double(n);

    TrafficSpec spec;
    spec.injection_rate = 0.005;
    spec.warmup_cycles = 200;
    spec.measure_packets = 2500;
    SimReport rep = run_experiment(k, k, spec, 3);
    CHECK(rep.latency.mean == doctest::Approx(oracle).epsilon(0.10));
}

TEST_CASE("latency decomposes exactly in an uncontended run") {
    FabricConfig fc;
    fc.cols = 4;
    fc.rows = 4;
    fc.seed = 9;
    fc.endpoint.max_out_credits = 32;
    TrafficGenSpec ts;
    ts.cfg.rate = 0.02;  // sparse: one packet in flight at a time
    ts.cfg.pattern = TrafficPattern::UniformRandom;
    fc.nodes.emplace(Coordinate{0, 0}, ts);
    for (uint32_t y = 0; y < 4; ++y)
        for (uint32_t x = 0; x < 4; ++x)
            if (!(x == 0 && y == 0))
                fc.nodes.emplace(Coordinate{x, y}, MemorySlaveSpec{});

    Fabric f(fc);
    f.stats().set_measure_from(0);
    while (f.stats().delivered() < 300) f.tick();

    REQUIRE(!f.stats().records().empty());
    for (const auto& rec : f.stats().records()) {
        // no source queueing at this rate
        CHECK(rec.fire_cycle == rec.arrival_cycle);
        // network time is exactly one cycle per FIFO crossed
        CHECK(rec.router_hops == f.expected_router_hops(rec.src, rec.dest));
        CHECK(rec.delivered_cycle - rec.fire_cycle == rec.router_hops + 1u);
    }
}

TEST_CASE("responses from a near slave overtake an earlier far load") {
    OrderingDemoResult r = run_ordering_demo();
    REQUIRE(r.returns.size() == 2);
    CHECK(r.returns[0].data == r.near_value);  // issued second, lands first
    CHECK(r.returns[1].data == r.far_value);
    CHECK(r.returns[0].cycle < r.returns[1].cycle);
}

TEST_CASE("mirror traffic on a 16-wide mesh sustains at most 32 crossings per cycle") {
    const uint32_t k = 16;
    FabricConfig fc;
    fc.cols = k;
    fc.rows = k;
    fc.seed = 21;
    fc.endpoint.max_out_credits =
        credits_recommended(Fabric::max_round_trip_cycles(k, k), 1.0);
    fc.endpoint.warn_out_of_credits = false;
    for (uint32_t y = 0; y < k; ++y)
        for (uint32_t x = 0; x < k; ++x) {
            TrafficGenSpec ts;
            ts.cfg.rate = 0.3;  // offered well above the crossing bound
            ts.cfg.fixed_dest = Coordinate{k - 1 - x, y};
            fc.nodes.emplace(Coordinate{x, y}, ts);
        }
    Fabric f(fc);

    const uint64_t warmup = 1200, window = 1200;
    f.stats().set_measure_from(UINT64_MAX);  // no per-packet records
    f.run(warmup);
    uint64_t delivered0 = f.stats().delivered();
    f.run(window);
    uint64_t delivered = f.stats().delivered() - delivered0;

    double crossings_per_cycle = double(delivered) / double(window);
    double per_node = crossings_per_cycle / double(k * k);
    CHECK(crossings_per_cycle <= 32.0 * 1.02);
    CHECK(per_node <= 0.125 * 1.02);
    CHECK(per_node >= 0.06);  // the network actually moves traffic
}

TEST_CASE("sweep rows keep the documented csv schema") {
    ExperimentPlan plan;
    plan.cols = 4;
    plan.rows = 4;
    plan.pattern = TrafficPattern::UniformRandom;
    plan.rates = {0.05, 0.1};
    plan.base.warmup_cycles = 100;
    plan.base.measure_packets = 400;
    auto rows = run_sweep(plan, 2);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rate == 0.05);
    CHECK(rows[1].rate == 0.1);
    CHECK(std::string(kSweepCsvHeader) ==
          "pattern,cols,rows,rate,rate_norm,seed,injected,delivered,"
          "accepted,mean_latency,median_latency,p99_latency,saturated,"
          "bisection_crossings");
    std::string line = sweep_row_csv(rows[0]);
    CHECK(std::count(line.begin(), line.end(), ',') == 13);

    ExperimentPlan bad = plan;
    bad.rates = {};
    CHECK_THROWS_AS(run_sweep(bad, 1), ConfigError);
    bad = plan;
    bad.rates = {0.2, 0.1};
    CHECK_THROWS_AS(run_sweep(bad, 1), ConfigError);
}
