#ifndef CPKIT_PLACEMENT_HPP
#define CPKIT_PLACEMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "cpkit/cascade.hpp"
#include "cpkit/errors.hpp"
#include "cpkit/features.hpp"

namespace cpkit {

// Latency is carried as integer microseconds inside the flow solver so
// optimality is exact; kCostScale converts from the millisecond matrix.
constexpr std::int64_t kCostScale = 1000;

struct PlacementInstance {
    int m = 0;
    std::vector<std::int64_t> demand;   // S_i, infected users per region
    std::vector<std::int64_t> capacity; // U_j, users servable per replica
    LatencyMatrix latency;              // milliseconds
    int max_replicas = 1;               // C

    std::int64_t total_demand() const {
        return std::accumulate(demand.begin(), demand.end(), std::int64_t{0});
    }

    std::int64_t cost_us(int i, int j) const {
        return static_cast<std::int64_t>(std::llround(latency.at(i, j) * kCostScale));
    }

    void validate() const {
        if (m < 1 || static_cast<int>(demand.size()) != m ||
            static_cast<int>(capacity.size()) != m || latency.m != m)
            throw ConfigError("placement instance: inconsistent dimensions");
        if (max_replicas < 1 || max_replicas > m)
            throw ConfigError("placement instance: C must be in [1, M]");
        for (std::int64_t s : demand)
            if (s < 0) throw ConfigError("placement instance: negative demand");
        for (std::int64_t u : capacity)
            if (u < 0) throw ConfigError("placement instance: negative capacity");
    }
};

struct PlacementDecision {
    std::vector<int> open; // I_j in {0,1}

    int replica_count() const { return std::accumulate(open.begin(), open.end(), 0); }
};

struct Assignment {
    int m = 0;
    std::vector<std::int64_t> flow; // row-major m x m; v_ij users of region i served from j
    std::int64_t total_cost_us = 0;

    std::int64_t at(int i, int j) const { return flow[static_cast<std::size_t>(i) * m + j]; }
    std::int64_t& at(int i, int j) { return flow[static_cast<std::size_t>(i) * m + j]; }
    double total_latency_ms() const { return static_cast<double>(total_cost_us) / kCostScale; }
};

namespace detail {

// Successive shortest paths with Johnson potentials; all arc costs are
// nonnegative so plain Dijkstra works from the start.
struct MinCostFlow {
    struct Edge {
        int to;
        std::int64_t cap;
        std::int64_t cost;
        int rev;
    };

    int n;
    std::vector<std::vector<Edge>> g;

    explicit MinCostFlow(int n_) : n(n_), g(static_cast<std::size_t>(n_)) {}

    void add_edge(int from, int to, std::int64_t cap, std::int64_t cost) {
        g[static_cast<std::size_t>(from)].push_back(
            {to, cap, cost, static_cast<int>(g[static_cast<std::size_t>(to)].size())});
        g[static_cast<std::size_t>(to)].push_back(
            {from, 0, -cost, static_cast<int>(g[static_cast<std::size_t>(from)].size()) - 1});
    }

    // Returns (flow shipped, total cost). Ships as much as possible up to want.
    std::pair<std::int64_t, std::int64_t> run(int s, int t, std::int64_t want) {
        const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
        std::vector<std::int64_t> potential(static_cast<std::size_t>(n), 0);
        std::int64_t shipped = 0, total_cost = 0;
        while (shipped < want) {
            std::vector<std::int64_t> dist(static_cast<std::size_t>(n), inf);
            std::vector<int> pv(static_cast<std::size_t>(n), -1), pe(static_cast<std::size_t>(n), -1);
            using Item = std::pair<std::int64_t, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
            dist[static_cast<std::size_t>(s)] = 0;
            pq.emplace(0, s);
            while (!pq.empty()) {
                auto [d, u] = pq.top();
                pq.pop();
                if (d > dist[static_cast<std::size_t>(u)]) continue;
                for (std::size_t ei = 0; ei < g[static_cast<std::size_t>(u)].size(); ++ei) {
                    const Edge& e = g[static_cast<std::size_t>(u)][ei];
                    if (e.cap <= 0) continue;
                    const std::int64_t nd = d + e.cost + potential[static_cast<std::size_t>(u)] -
                                            potential[static_cast<std::size_t>(e.to)];
                    if (nd < dist[static_cast<std::size_t>(e.to)]) {
                        dist[static_cast<std::size_t>(e.to)] = nd;
                        pv[static_cast<std::size_t>(e.to)] = u;
                        pe[static_cast<std::size_t>(e.to)] = static_cast<int>(ei);
                        pq.emplace(nd, e.to);
                    }
                }
            }
            if (dist[static_cast<std::size_t>(t)] >= inf) break; // no augmenting path
            for (int u = 0; u < n; ++u)
                if (dist[static_cast<std::size_t>(u)] < inf)
                    potential[static_cast<std::size_t>(u)] += dist[static_cast<std::size_t>(u)];
            std::int64_t push = want - shipped;
            for (int u = t; u != s; u = pv[static_cast<std::size_t>(u)])
                push = std::min(push, g[static_cast<std::size_t>(pv[static_cast<std::size_t>(u)])]
                                          [static_cast<std::size_t>(pe[static_cast<std::size_t>(u)])]
                                              .cap);
            for (int u = t; u != s; u = pv[static_cast<std::size_t>(u)]) {
                Edge& e = g[static_cast<std::size_t>(pv[static_cast<std::size_t>(u)])]
                           [static_cast<std::size_t>(pe[static_cast<std::size_t>(u)])];
                e.cap -= push;
                g[static_cast<std::size_t>(u)][static_cast<std::size_t>(e.rev)].cap += push;
                total_cost += push * e.cost;
            }
            shipped += push;
        }
        return {shipped, total_cost};
    }
};

inline std::int64_t open_capacity(const PlacementInstance& inst, const std::vector<int>& open) {
    std::int64_t cap = 0;
    for (int j = 0; j < inst.m; ++j)
        if (open[static_cast<std::size_t>(j)]) cap += inst.capacity[static_cast<std::size_t>(j)];
    return cap;
}

// Min transport cost only (no flow matrix), for bounding.
inline std::int64_t transport_cost(const PlacementInstance& inst, const std::vector<int>& open) {
    const std::int64_t total = inst.total_demand();
    MinCostFlow mcf(2 * inst.m + 2);
    const int src = 2 * inst.m, snk = 2 * inst.m + 1;
    for (int i = 0; i < inst.m; ++i)
        if (inst.demand[static_cast<std::size_t>(i)] > 0)
            mcf.add_edge(src, i, inst.demand[static_cast<std::size_t>(i)], 0);
    for (int j = 0; j < inst.m; ++j)
        if (open[static_cast<std::size_t>(j)] && inst.capacity[static_cast<std::size_t>(j)] > 0)
            mcf.add_edge(inst.m + j, snk, inst.capacity[static_cast<std::size_t>(j)], 0);
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.m; ++j)
            if (open[static_cast<std::size_t>(j)])
                mcf.add_edge(i, inst.m + j, total, inst.cost_us(i, j));
    auto [shipped, cost] = mcf.run(src, snk, total);
    if (shipped < total) return -1; // infeasible
    return cost;
}

} // namespace detail

// Optimal routing of all demand to a fixed open replica set.
inline Assignment transport_solve(const PlacementInstance& inst, const PlacementDecision& dec) {
    inst.validate();
    if (static_cast<int>(dec.open.size()) != inst.m)
        throw ConfigError("transport_solve: decision dimension mismatch");
    const std::int64_t total = inst.total_demand();
    const std::int64_t cap = detail::open_capacity(inst, dec.open);
    if (cap < total)
        throw InfeasibleError("open capacity " + std::to_string(cap) +
                              " cannot serve demand " + std::to_string(total) +
                              " (shortfall " + std::to_string(total - cap) + ")");

    detail::MinCostFlow mcf(2 * inst.m + 2);
    const int src = 2 * inst.m, snk = 2 * inst.m + 1;
    for (int i = 0; i < inst.m; ++i)
        if (inst.demand[static_cast<std::size_t>(i)] > 0)
            mcf.add_edge(src, i, inst.demand[static_cast<std::size_t>(i)], 0);
    for (int j = 0; j < inst.m; ++j)
        if (dec.open[static_cast<std::size_t>(j)] && inst.capacity[static_cast<std::size_t>(j)] > 0)
            mcf.add_edge(inst.m + j, snk, inst.capacity[static_cast<std::size_t>(j)], 0);
    // remember transport arc positions to read flows back
    std::vector<std::pair<int, int>> arc_pos(
        static_cast<std::size_t>(inst.m) * static_cast<std::size_t>(inst.m), {-1, -1});
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.m; ++j)
            if (dec.open[static_cast<std::size_t>(j)]) {
                arc_pos[static_cast<std::size_t>(i) * inst.m + j] = {
                    i, static_cast<int>(mcf.g[static_cast<std::size_t>(i)].size())};
                mcf.add_edge(i, inst.m + j, total, inst.cost_us(i, j));
            }
    auto [shipped, cost] = mcf.run(src, snk, total);
    if (shipped < total) throw InfeasibleError("transport_solve: could not route all demand");

    Assignment a;
    a.m = inst.m;
    a.flow.assign(static_cast<std::size_t>(inst.m) * inst.m, 0);
    a.total_cost_us = cost;
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.m; ++j) {
            auto [node, ei] = arc_pos[static_cast<std::size_t>(i) * inst.m + j];
            if (node < 0) continue;
            const auto& e = mcf.g[static_cast<std::size_t>(node)][static_cast<std::size_t>(ei)];
            a.at(i, j) = total - e.cap; // shipped amount
        }
    return a;
}

// Globally optimal replica subset of size <= C via depth-first branch and
// bound over regions in index order. The bound at a node is the transport
// cost with every still-undecided region opened (a relaxation of the replica
// cap). Opening branches are explored first, so among equal-cost optima the
// first one found, and hence the one kept, prefers low region indices.
inline std::pair<PlacementDecision, Assignment> exact_solve(const PlacementInstance& inst) {
    inst.validate();
    const std::int64_t total = inst.total_demand();

    std::vector<int> relaxed(static_cast<std::size_t>(inst.m), 1);
    if (detail::open_capacity(inst, relaxed) < total)
        throw InfeasibleError("instance infeasible: total capacity below total demand");

    std::vector<int> open(static_cast<std::size_t>(inst.m), 0);
    std::vector<int> best_open;
    std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();

    // capacity of regions with index >= j
    std::vector<std::int64_t> tail_cap(static_cast<std::size_t>(inst.m) + 1, 0);
    for (int j = inst.m - 1; j >= 0; --j)
        tail_cap[static_cast<std::size_t>(j)] =
            tail_cap[static_cast<std::size_t>(j) + 1] + inst.capacity[static_cast<std::size_t>(j)];

    auto evaluate_leaf = [&](const std::vector<int>& o) {
        if (detail::open_capacity(inst, o) < total) return;
        const std::int64_t cost = detail::transport_cost(inst, o);
        if (cost >= 0 && cost < best_cost) {
            best_cost = cost;
            best_open = o;
        }
    };

    auto dfs = [&](auto&& self, int j, int n_open, std::int64_t open_cap) -> void {
        if (open_cap + tail_cap[static_cast<std::size_t>(j)] < total) return; // can't feed demand
        if (n_open == inst.max_replicas || j == inst.m) {
            evaluate_leaf(open);
            return;
        }
        if (best_cost != std::numeric_limits<std::int64_t>::max()) {
            // lower bound: open everything undecided
            std::vector<int> relax = open;
            for (int k = j; k < inst.m; ++k) relax[static_cast<std::size_t>(k)] = 1;
            const std::int64_t lb = detail::transport_cost(inst, relax);
            if (lb < 0 || lb >= best_cost) return;
        }
        open[static_cast<std::size_t>(j)] = 1;
        self(self, j + 1, n_open + 1, open_cap + inst.capacity[static_cast<std::size_t>(j)]);
        open[static_cast<std::size_t>(j)] = 0;
        self(self, j + 1, n_open, open_cap);
    };
    dfs(dfs, 0, 0, 0);

    if (best_open.empty() && best_cost == std::numeric_limits<std::int64_t>::max())
        throw InfeasibleError("no feasible replica subset of size <= C");
    PlacementDecision dec{best_open};
    return {dec, transport_solve(inst, dec)};
}

// Sequentially open the region whose addition reduces routing cost the most
// (ties to the lowest id). While no single addition yet reaches feasibility,
// the largest-capacity closed region is opened instead.
inline std::pair<PlacementDecision, Assignment> greedy_place(const PlacementInstance& inst) {
    inst.validate();
    const std::int64_t total = inst.total_demand();
    std::vector<int> all(static_cast<std::size_t>(inst.m), 1);
    if (detail::open_capacity(inst, all) < total)
        throw InfeasibleError("instance infeasible: total capacity below total demand");

    std::vector<int> open(static_cast<std::size_t>(inst.m), 0);
    std::int64_t cur_cost = std::numeric_limits<std::int64_t>::max();
    for (int step = 0; step < inst.max_replicas; ++step) {
        int best_j = -1;
        std::int64_t best_cost = cur_cost;
        for (int j = 0; j < inst.m; ++j) {
            if (open[static_cast<std::size_t>(j)]) continue;
            open[static_cast<std::size_t>(j)] = 1;
            const std::int64_t cost = detail::transport_cost(inst, open);
            open[static_cast<std::size_t>(j)] = 0;
            if (cost >= 0 && cost < best_cost) {
                best_cost = cost;
                best_j = j;
            }
        }
        if (best_j < 0) {
            if (cur_cost < std::numeric_limits<std::int64_t>::max()) break; // no improvement left
            // not yet feasible with any single addition: grab capacity
            std::int64_t best_cap = -1;
            for (int j = 0; j < inst.m; ++j)
                if (!open[static_cast<std::size_t>(j)] &&
                    inst.capacity[static_cast<std::size_t>(j)] > best_cap) {
                    best_cap = inst.capacity[static_cast<std::size_t>(j)];
                    best_j = j;
                }
        }
        open[static_cast<std::size_t>(best_j)] = 1;
        const std::int64_t cost = detail::transport_cost(inst, open);
        if (cost >= 0) cur_cost = cost;
    }
    if (cur_cost == std::numeric_limits<std::int64_t>::max())
        throw InfeasibleError("greedy could not reach a feasible replica set");
    PlacementDecision dec{open};
    return {dec, transport_solve(inst, dec)};
}

// total split into integer quotas proportional to weights, exactly preserving
// the total (largest-remainder rounding, ties to the lowest index).
inline std::vector<std::int64_t> largest_remainder(std::int64_t total,
                                                   const std::vector<double>& weights) {
    const int n = static_cast<int>(weights.size());
    double wsum = 0.0;
    for (double w : weights) wsum += w;
    std::vector<std::int64_t> quota(static_cast<std::size_t>(n), 0);
    if (wsum <= 0.0) { // degenerate: spread evenly
        for (int i = 0; i < n; ++i) quota[static_cast<std::size_t>(i)] = total / n;
        for (int i = 0; i < static_cast<int>(total % n); ++i) ++quota[static_cast<std::size_t>(i)];
        return quota;
    }
    std::vector<std::pair<double, int>> rem;
    std::int64_t assigned = 0;
    for (int i = 0; i < n; ++i) {
        const double exact = static_cast<double>(total) * weights[static_cast<std::size_t>(i)] / wsum;
        quota[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(std::floor(exact));
        assigned += quota[static_cast<std::size_t>(i)];
        rem.emplace_back(exact - std::floor(exact), i);
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    for (std::int64_t k = 0; k < total - assigned; ++k)
        ++quota[static_cast<std::size_t>(rem[static_cast<std::size_t>(k)].second)];
    return quota;
}

// Placement assuming equal popularity everywhere (total demand preserved).
inline PlacementDecision distance_aware_place(const PlacementInstance& inst) {
    inst.validate();
    PlacementInstance uniform = inst;
    uniform.demand = largest_remainder(inst.total_demand(),
                                       std::vector<double>(static_cast<std::size_t>(inst.m), 1.0));
    return exact_solve(uniform).first;
}

// Placement from the historical mean geo-distribution.
inline PlacementDecision statistics_place(const std::vector<GeoDistribution>& history,
                                          const PlacementInstance& inst) {
    inst.validate();
    if (history.empty()) throw ConfigError("statistics_place: empty history");
    std::vector<double> mean(static_cast<std::size_t>(inst.m), 0.0);
    for (const GeoDistribution& g : history) {
        if (static_cast<int>(g.x.size()) != inst.m)
            throw ConfigError("statistics_place: history dimension mismatch");
        for (int i = 0; i < inst.m; ++i) mean[static_cast<std::size_t>(i)] += g.x[static_cast<std::size_t>(i)];
    }
    for (double& x : mean) x /= static_cast<double>(history.size());
    PlacementInstance stat = inst;
    stat.demand = largest_remainder(inst.total_demand(), mean);
    return exact_solve(stat).first;
}

// Replicas at the C regions with the largest predicted demand; users are
// served locally while capacity lasts, and overflow from each region is split
// evenly across replicas with remaining capacity (lowest ids absorb rounding).
inline std::pair<PlacementDecision, Assignment> heuristic_place(const PlacementInstance& inst,
                                                                const GeoDistribution& predicted) {
    inst.validate();
    if (static_cast<int>(predicted.x.size()) != inst.m)
        throw ConfigError("heuristic_place: prediction dimension mismatch");

    std::vector<int> order(static_cast<std::size_t>(inst.m));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return predicted.x[static_cast<std::size_t>(a)] > predicted.x[static_cast<std::size_t>(b)];
    });
    std::vector<int> open(static_cast<std::size_t>(inst.m), 0);
    for (int k = 0; k < inst.max_replicas; ++k) open[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = 1;

    const std::int64_t total = inst.total_demand();
    if (detail::open_capacity(inst, open) < total)
        throw InfeasibleError("heuristic top-C replica set cannot serve total demand");

    Assignment a;
    a.m = inst.m;
    a.flow.assign(static_cast<std::size_t>(inst.m) * inst.m, 0);
    std::vector<std::int64_t> cap_left = inst.capacity;
    std::vector<std::int64_t> pending = inst.demand;

    for (int i = 0; i < inst.m; ++i) {
        if (!open[static_cast<std::size_t>(i)]) continue;
        const std::int64_t local = std::min(pending[static_cast<std::size_t>(i)],
                                            cap_left[static_cast<std::size_t>(i)]);
        a.at(i, i) += local;
        pending[static_cast<std::size_t>(i)] -= local;
        cap_left[static_cast<std::size_t>(i)] -= local;
    }
    for (int i = 0; i < inst.m; ++i) {
        while (pending[static_cast<std::size_t>(i)] > 0) {
            std::vector<int> active;
            for (int j = 0; j < inst.m; ++j)
                if (open[static_cast<std::size_t>(j)] && cap_left[static_cast<std::size_t>(j)] > 0)
                    active.push_back(j);
            const auto n_active = static_cast<std::int64_t>(active.size());
            const std::int64_t base = pending[static_cast<std::size_t>(i)] / n_active;
            const std::int64_t rem = pending[static_cast<std::size_t>(i)] % n_active;
            bool progressed = false;
            for (std::int64_t k = 0; k < n_active; ++k) {
                const int j = active[static_cast<std::size_t>(k)];
                const std::int64_t want = base + (k < rem ? 1 : 0);
                const std::int64_t give = std::min(want, cap_left[static_cast<std::size_t>(j)]);
                if (give > 0) {
                    a.at(i, j) += give;
                    cap_left[static_cast<std::size_t>(j)] -= give;
                    pending[static_cast<std::size_t>(i)] -= give;
                    progressed = true;
                }
            }
            if (!progressed) break; // cannot happen: capacity checked above
        }
    }
    a.total_cost_us = 0;
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.m; ++j) a.total_cost_us += a.at(i, j) * inst.cost_us(i, j);
    return {PlacementDecision{open}, a};
}

// Everyone fetches from the single origin server; capacity is ignored.
inline Assignment no_replication_assignment(const PlacementInstance& inst, int origin) {
    inst.validate();
    if (origin < 0 || origin >= inst.m) throw ConfigError("no_replication: bad origin");
    Assignment a;
    a.m = inst.m;
    a.flow.assign(static_cast<std::size_t>(inst.m) * inst.m, 0);
    for (int i = 0; i < inst.m; ++i) {
        a.at(i, origin) = inst.demand[static_cast<std::size_t>(i)];
        a.total_cost_us += inst.demand[static_cast<std::size_t>(i)] * inst.cost_us(i, origin);
    }
    return a;
}

inline double no_replication_cost(const PlacementInstance& inst, int origin) {
    return no_replication_assignment(inst, origin).total_latency_ms();
}

// True iff some replica set of size <= C can serve all demand, i.e. the C
// largest capacities cover the demand total.
inline bool coverage_feasible(const PlacementInstance& inst) {
    inst.validate();
    std::vector<std::int64_t> caps = inst.capacity;
    std::sort(caps.begin(), caps.end(), std::greater<>());
    std::int64_t total = 0, covered = 0;
    for (std::int64_t s : inst.demand) total += s;
    for (int j = 0; j < inst.max_replicas && j < inst.m; ++j)
        covered += caps[static_cast<std::size_t>(j)];
    return covered >= total;
}

// Full constraint check for a decision/assignment pair: binary replicas,
// replica budget, exact demand, nonnegative flow, per-region capacity.
inline bool satisfies_constraints(const PlacementInstance& inst, const PlacementDecision& dec,
                                  const Assignment& a, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (static_cast<int>(dec.open.size()) != inst.m || a.m != inst.m)
        return fail("dimension mismatch");
    for (int v : dec.open)
        if (v != 0 && v != 1) return fail("I_j not binary");
    if (dec.replica_count() > inst.max_replicas) return fail("replica cap exceeded");
    for (int i = 0; i < inst.m; ++i) {
        std::int64_t row = 0;
        for (int j = 0; j < inst.m; ++j) {
            if (a.at(i, j) < 0) return fail("negative flow");
            row += a.at(i, j);
        }
        if (row != inst.demand[static_cast<std::size_t>(i)]) return fail("demand not met exactly");
    }
    for (int j = 0; j < inst.m; ++j) {
        std::int64_t col = 0;
        for (int i = 0; i < inst.m; ++i) col += a.at(i, j);
        const std::int64_t cap = dec.open[static_cast<std::size_t>(j)]
                                     ? inst.capacity[static_cast<std::size_t>(j)]
                                     : 0;
        if (col > cap) return fail("capacity exceeded at region " + std::to_string(j));
    }
    return true;
}

// ---- instance file format ------------------------------------------------
// Header line `M C`, a demand line, a capacity line, then M latency rows.

inline void write_instance(std::ostream& out, const PlacementInstance& inst) {
    out << inst.m << ' ' << inst.max_replicas << '\n';
    for (int i = 0; i < inst.m; ++i)
        out << inst.demand[static_cast<std::size_t>(i)] << (i + 1 == inst.m ? '\n' : ' ');
    for (int i = 0; i < inst.m; ++i)
        out << inst.capacity[static_cast<std::size_t>(i)] << (i + 1 == inst.m ? '\n' : ' ');
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.m; ++j)
            out << inst.latency.at(i, j) << (j + 1 == inst.m ? '\n' : ' ');
}

inline PlacementInstance read_instance(std::istream& in) {
    PlacementInstance inst;
    if (!(in >> inst.m >> inst.max_replicas)) throw ParseError("instance: bad header");
    inst.demand.resize(static_cast<std::size_t>(inst.m));
    inst.capacity.resize(static_cast<std::size_t>(inst.m));
    inst.latency = LatencyMatrix(inst.m);
    for (auto& s : inst.demand)
        if (!(in >> s)) throw ParseError("instance: truncated demand line");
    for (auto& u : inst.capacity)
        if (!(in >> u)) throw ParseError("instance: truncated capacity line");
    for (int i = 0; i < inst.m; ++i)
        for (int j = 0; j < inst.m; ++j)
            if (!(in >> inst.latency.at(i, j))) throw ParseError("instance: truncated latency row");
    inst.validate();
    return inst;
}

} // namespace cpkit

#endif
