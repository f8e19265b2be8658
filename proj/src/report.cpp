// SPDX-License-Identifier: Apache-2.0

#include "manycore/report.hpp"

#include <algorithm>
#include <cmath>

namespace manycore {

LatencySummary summarize_latencies(const std::vector<PacketRecord>& records) {
    LatencySummary s;
    s.count = records.size();
    if (records.empty()) return s;
    std::vector<uint64_t> lat;
    lat.reserve(records.size());
    double sum = 0;
    for (const auto& r : records) {
        uint64_t l = r.delivered_cycle - r.arrival_cycle;
        lat.push_back(l);
        sum += double(l);
    }
    std::sort(lat.begin(), lat.end());
    s.mean = sum / double(lat.size());
    s.median = double(lat[lat.size() / 2]);
    std::size_t p99_idx =
        std::size_t(std::ceil(0.99 * double(lat.size()))) - 1;
    s.p99 = double(lat[std::min(p99_idx, lat.size() - 1)]);
    return s;
}

uint64_t count_bisection_crossings(const std::vector<PacketRecord>& records,
                                   uint32_t cols) {
    if (cols < 2) fail_config("bisection counting needs k >= 2");
    uint64_t n = 0;
    for (const auto& r : records)
        if (crosses_bisection(r.src, r.dest, cols)) ++n;
    return n;
}

}  // namespace manycore
