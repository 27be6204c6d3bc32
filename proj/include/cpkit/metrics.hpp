#ifndef CPKIT_METRICS_HPP
#define CPKIT_METRICS_HPP

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <vector>

#include "cpkit/errors.hpp"
#include "cpkit/placement.hpp"

namespace cpkit {

// 1 - method/baseline; 1 means all latency removed, 0 means no gain.
inline double latency_reduction(double method_cost, double baseline_cost) {
    if (baseline_cost <= 0.0) throw ConfigError("latency_reduction: baseline cost must be > 0");
    return 1.0 - method_cost / baseline_cost;
}

// Fraction of users whose assigned access latency is at most gamma (ms).
inline double satisfaction_ratio(const Assignment& a, const LatencyMatrix& l, double gamma) {
    std::int64_t total = 0, ok = 0;
    for (int i = 0; i < a.m; ++i)
        for (int j = 0; j < a.m; ++j) {
            total += a.at(i, j);
            if (l.at(i, j) <= gamma) ok += a.at(i, j);
        }
    if (total == 0) return 1.0;
    return static_cast<double>(ok) / static_cast<double>(total);
}

// Fraction of all users served from each region; sums to 1.
inline std::vector<double> server_load_ratio(const Assignment& a) {
    std::vector<double> load(static_cast<std::size_t>(a.m), 0.0);
    std::int64_t total = 0;
    for (int i = 0; i < a.m; ++i)
        for (int j = 0; j < a.m; ++j) {
            load[static_cast<std::size_t>(j)] += static_cast<double>(a.at(i, j));
            total += a.at(i, j);
        }
    if (total > 0)
        for (double& x : load) x /= static_cast<double>(total);
    return load;
}

struct TimingStats {
    double median_us = 0.0;
    double min_us = 0.0;
    double max_us = 0.0;
    int repetitions = 0;
};

// Wall-clock medians over repetitions with one discarded warm-up pass.
// Single-threaded by construction: the callable runs on this thread.
inline TimingStats bench_decision_time(const std::function<void()>& decide, int repetitions,
                                       int warmup = 1) {
    if (repetitions < 1) throw ConfigError("bench_decision_time: repetitions must be >= 1");
    for (int i = 0; i < warmup; ++i) decide();
    std::vector<double> samples;
    samples.reserve(static_cast<std::size_t>(repetitions));
    for (int i = 0; i < repetitions; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        decide();
        const auto t1 = std::chrono::steady_clock::now();
        samples.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
    }
    std::sort(samples.begin(), samples.end());
    TimingStats st;
    st.repetitions = repetitions;
    st.min_us = samples.front();
    st.max_us = samples.back();
    const std::size_t mid = samples.size() / 2;
    st.median_us = samples.size() % 2 == 1 ? samples[mid]
                                           : 0.5 * (samples[mid - 1] + samples[mid]);
    return st;
}

} // namespace cpkit

#endif
