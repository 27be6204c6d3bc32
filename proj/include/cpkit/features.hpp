#ifndef CPKIT_FEATURES_HPP
#define CPKIT_FEATURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <vector>

#include "cpkit/cascade.hpp"
#include "cpkit/errors.hpp"
#include "cpkit/matrix.hpp"

namespace cpkit {

struct WindowSpec {
    std::int64_t window_length = 3600; // T, seconds
    int n_slots = 12;                  // N
    int max_windows = 5;               // Q

    void validate() const {
        if (n_slots < 1 || max_windows < 1) throw ConfigError("window spec: N and Q must be >= 1");
        if (window_length < 1 || window_length % n_slots != 0)
            throw ConfigError("window spec: T must be a positive multiple of N");
    }
};

// The eleven macro-view features for one observation window. Level statistics
// over an empty window are 0 by convention so the vector stays fixed-width.
struct MacroFeatures {
    double view_count = 0, reshare_count = 0;
    double min_rlevel = 0, max_rlevel = 0, avg_rlevel = 0, var_rlevel = 0;
    double min_vlevel = 0, max_vlevel = 0, avg_vlevel = 0, var_vlevel = 0;
    std::array<double, 3> ctype_onehot = {0, 0, 0};

    static constexpr int kDim = 13; // 10 statistics + 3-way content type

    Vec to_vec() const {
        Vec x(kDim, 1);
        x[0] = view_count;
        x[1] = reshare_count;
        x[2] = min_rlevel;
        x[3] = max_rlevel;
        x[4] = avg_rlevel;
        x[5] = var_rlevel;
        x[6] = min_vlevel;
        x[7] = max_vlevel;
        x[8] = avg_vlevel;
        x[9] = var_vlevel;
        x[10] = ctype_onehot[0];
        x[11] = ctype_onehot[1];
        x[12] = ctype_onehot[2];
        return x;
    }
};

// Per-slot attributes (view count, reshare count, average level) over the N
// slots of one window.
struct MicroSequence {
    Mat a; // N x 3

    static constexpr int kDim = 3;
};

struct WindowObservation {
    int k = 0; // 1-based window index
    MacroFeatures macro;
    MicroSequence micro;
    std::vector<std::int64_t> region_hist; // cumulative infected per region over (0, kT]
};

struct GeoDistribution {
    std::vector<double> x;

    void validate() const {
        double sum = 0.0;
        for (double p : x) {
            if (p < 0.0) throw ValidationError("geo distribution entry < 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("geo distribution must sum to 1");
    }
};

struct BurstLabel {
    bool explosive = false;
    std::int64_t final_size = 0;
    GeoDistribution final_geo;
};

namespace detail {

struct LevelStats {
    double mn = 0, mx = 0, avg = 0, var = 0;
};

// Population statistics; all zeros for an empty sample.
inline LevelStats level_stats(const std::vector<int>& levels) {
    LevelStats s;
    if (levels.empty()) return s;
    s.mn = *std::min_element(levels.begin(), levels.end());
    s.mx = *std::max_element(levels.begin(), levels.end());
    double sum = 0;
    for (int l : levels) sum += l;
    s.avg = sum / static_cast<double>(levels.size());
    double sq = 0;
    for (int l : levels) sq += (l - s.avg) * (l - s.avg);
    s.var = sq / static_cast<double>(levels.size());
    return s;
}

} // namespace detail

// Macro features over ((k-1)T, kT], micro slots of width T/N inside the
// window, and the cumulative per-region histogram over (0, kT]. The root event
// at t=0 counts into window 1 (its slot 1).
inline WindowObservation extract_window(const Cascade& c, const WindowSpec& spec, int k,
                                        int n_regions) {
    spec.validate();
    if (k < 1 || k > spec.max_windows) throw ConfigError("window index out of range");
    if (c.horizon < static_cast<std::int64_t>(k) * spec.window_length)
        throw ConfigError("cascade horizon shorter than requested window");

    const std::int64_t t0 = static_cast<std::int64_t>(k - 1) * spec.window_length;
    const std::int64_t t1 = static_cast<std::int64_t>(k) * spec.window_length;
    const std::int64_t slot_len = spec.window_length / spec.n_slots;

    WindowObservation obs;
    obs.k = k;
    obs.micro.a = Mat(spec.n_slots, MicroSequence::kDim);
    obs.region_hist.assign(static_cast<std::size_t>(n_regions), 0);

    std::vector<int> rlevels, vlevels;
    std::vector<std::vector<int>> slot_levels(static_cast<std::size_t>(spec.n_slots));

    for (const CascadeEvent& ev : c.events) {
        const bool in_window =
            (ev.t > t0 && ev.t <= t1) || (k == 1 && ev.t == 0); // root inclusion
        if (ev.t <= t1) {
            if (ev.region < 0 || ev.region >= n_regions)
                throw ValidationError("event region out of range");
            ++obs.region_hist[static_cast<std::size_t>(ev.region)];
        }
        if (!in_window) continue;
        if (ev.kind == EventKind::Reshare)
            rlevels.push_back(ev.level);
        else
            vlevels.push_back(ev.level);
        std::int64_t slot = (ev.t - t0 - 1) / slot_len; // half-open on the left
        if (k == 1 && ev.t == 0) slot = 0;
        slot = std::clamp<std::int64_t>(slot, 0, spec.n_slots - 1);
        auto& row = slot_levels[static_cast<std::size_t>(slot)];
        row.push_back(ev.level);
        if (ev.kind == EventKind::View)
            obs.micro.a(static_cast<int>(slot), 0) += 1.0;
        else
            obs.micro.a(static_cast<int>(slot), 1) += 1.0;
    }

    for (int s = 0; s < spec.n_slots; ++s) {
        const auto& lv = slot_levels[static_cast<std::size_t>(s)];
        if (!lv.empty()) {
            double sum = 0;
            for (int l : lv) sum += l;
            obs.micro.a(s, 2) = sum / static_cast<double>(lv.size());
        }
    }

    const auto rs = detail::level_stats(rlevels);
    const auto vs = detail::level_stats(vlevels);
    MacroFeatures& m = obs.macro;
    m.view_count = static_cast<double>(vlevels.size());
    m.reshare_count = static_cast<double>(rlevels.size());
    m.min_rlevel = rs.mn;
    m.max_rlevel = rs.mx;
    m.avg_rlevel = rs.avg;
    m.var_rlevel = rs.var;
    m.min_vlevel = vs.mn;
    m.max_vlevel = vs.mx;
    m.avg_vlevel = vs.avg;
    m.var_vlevel = vs.var;
    m.ctype_onehot[static_cast<std::size_t>(c.ctype)] = 1.0;
    return obs;
}

inline BurstLabel label(const Cascade& c, std::int64_t burst_threshold, int n_regions) {
    BurstLabel lb;
    lb.final_size = c.size();
    lb.explosive = lb.final_size >= burst_threshold;
    std::vector<double> counts(static_cast<std::size_t>(n_regions), 0.0);
    for (const CascadeEvent& ev : c.events) {
        if (ev.region < 0 || ev.region >= n_regions)
            throw ValidationError("event region out of range");
        counts[static_cast<std::size_t>(ev.region)] += 1.0;
    }
    for (double& x : counts) x /= static_cast<double>(lb.final_size);
    lb.final_geo.x = std::move(counts);
    return lb;
}

// Row t: cumulative per-region infected counts up to the end of slot t of
// window k, normalized to proportions (an all-zero prefix row stays zero).
inline Mat geo_micro_sequence(const Cascade& c, const WindowSpec& spec, int k, int n_regions) {
    spec.validate();
    if (k < 1 || k > spec.max_windows) throw ConfigError("window index out of range");
    const std::int64_t t0 = static_cast<std::int64_t>(k - 1) * spec.window_length;
    const std::int64_t slot_len = spec.window_length / spec.n_slots;

    Mat seq(spec.n_slots, n_regions);
    std::vector<double> cum(static_cast<std::size_t>(n_regions), 0.0);
    std::size_t next = 0;
    for (int s = 0; s < spec.n_slots; ++s) {
        const std::int64_t slot_end = t0 + static_cast<std::int64_t>(s + 1) * slot_len;
        while (next < c.events.size() && c.events[next].t <= slot_end) {
            const CascadeEvent& ev = c.events[next++];
            if (ev.region < 0 || ev.region >= n_regions)
                throw ValidationError("event region out of range");
            cum[static_cast<std::size_t>(ev.region)] += 1.0;
        }
        double total = 0.0;
        for (double x : cum) total += x;
        if (total > 0.0)
            for (int r = 0; r < n_regions; ++r) seq(s, r) = cum[static_cast<std::size_t>(r)] / total;
    }
    return seq;
}

// Feature dump: 10 macro statistics + 3 ctype + N*3 micro + M region counts
// + (explosive, final_size) label columns, one row per (cascade, window).
inline void write_feature_header(std::ostream& out, const WindowSpec& spec, int n_regions) {
    out << "content_id,window,view_count,reshare_count,min_rlevel,max_rlevel,avg_rlevel,"
           "var_rlevel,min_vlevel,max_vlevel,avg_vlevel,var_vlevel,ct_political,ct_advertising,"
           "ct_other";
    for (int s = 1; s <= spec.n_slots; ++s)
        out << ",slot" << s << "_views,slot" << s << "_reshares,slot" << s << "_avg_level";
    for (int r = 0; r < n_regions; ++r) out << ",region" << r;
    out << ",explosive,final_size\n";
}

inline void write_feature_row(std::ostream& out, const Cascade& c, const WindowObservation& obs,
                              const BurstLabel& lb) {
    out << c.content_id << ',' << obs.k;
    const Vec m = obs.macro.to_vec();
    for (int i = 0; i < MacroFeatures::kDim; ++i) out << ',' << m[i];
    for (int s = 0; s < obs.micro.a.rows; ++s)
        for (int j = 0; j < MicroSequence::kDim; ++j) out << ',' << obs.micro.a(s, j);
    for (std::int64_t h : obs.region_hist) out << ',' << h;
    out << ',' << (lb.explosive ? 1 : 0) << ',' << lb.final_size << '\n';
}

} // namespace cpkit

#endif
