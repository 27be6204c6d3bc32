#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cpkit/placement.hpp"
#include "cpkit/rng.hpp"

using namespace cpkit;

namespace {

PlacementInstance two_region(std::int64_t s0, std::int64_t s1, std::int64_t u0, std::int64_t u1,
                             double l01, int c) {
    PlacementInstance inst;
    inst.m = 2;
    inst.demand = {s0, s1};
    inst.capacity = {u0, u1};
    inst.latency = LatencyMatrix(2);
    inst.latency.at(0, 1) = inst.latency.at(1, 0) = l01;
    inst.max_replicas = c;
    return inst;
}

// Random instance with integer millisecond latencies (so fixed-point costs are
// exact under scaling) and capacities rich enough to usually be feasible.
PlacementInstance random_instance(Rng& rng, int m, int c, std::int64_t max_demand = 50) {
    PlacementInstance inst;
    inst.m = m;
    inst.max_replicas = c;
    inst.demand.resize(static_cast<std::size_t>(m));
    inst.capacity.resize(static_cast<std::size_t>(m));
    for (auto& s : inst.demand) s = uniform_int(rng, 0, static_cast<int>(max_demand));
    const std::int64_t total = inst.total_demand();
    for (auto& u : inst.capacity)
        u = uniform_int(rng, 0, static_cast<int>(2 * total / std::max(1, c) + 5));
    inst.latency = LatencyMatrix(m);
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            inst.latency.at(i, j) = inst.latency.at(j, i) = uniform_int(rng, 1, 20);
    return inst;
}

// Brute-force minimum transport cost by enumerating all integral flow
// matrices (tiny instances only).
std::int64_t brute_transport(const PlacementInstance& inst, const std::vector<int>& open,
                             int i = 0, std::vector<std::int64_t> used = {}) {
    if (used.empty()) used.assign(static_cast<std::size_t>(inst.m), 0);
    if (i == inst.m) return 0;
    const std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    // enumerate compositions of demand[i] over open regions
    std::int64_t best = inf;
    std::vector<std::int64_t> row(static_cast<std::size_t>(inst.m), 0);
    auto rec = [&](auto&& self, int j, std::int64_t left, std::int64_t cost) -> void {
        if (j == inst.m) {
            if (left != 0) return;
            for (int k = 0; k < inst.m; ++k) used[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k)];
            const std::int64_t rest = brute_transport(inst, open, i + 1, used);
            for (int k = 0; k < inst.m; ++k) used[static_cast<std::size_t>(k)] -= row[static_cast<std::size_t>(k)];
            if (rest < inf) best = std::min(best, cost + rest);
            return;
        }
        const std::int64_t cap =
            open[static_cast<std::size_t>(j)]
                ? inst.capacity[static_cast<std::size_t>(j)] - used[static_cast<std::size_t>(j)]
                : 0;
        for (std::int64_t f = 0; f <= std::min(left, cap); ++f) {
            row[static_cast<std::size_t>(j)] = f;
            self(self, j + 1, left - f, cost + f * inst.cost_us(i, j));
        }
        row[static_cast<std::size_t>(j)] = 0;
    };
    rec(rec, 0, inst.demand[static_cast<std::size_t>(i)], 0);
    return best;
}

// Exhaustive exact solver: every subset with <= C replicas.
std::int64_t exhaustive_best_cost(const PlacementInstance& inst) {
    std::int64_t best = std::numeric_limits<std::int64_t>::max() / 4;
    for (int mask = 0; mask < (1 << inst.m); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) > inst.max_replicas) continue;
        PlacementDecision dec;
        dec.open.assign(static_cast<std::size_t>(inst.m), 0);
        for (int j = 0; j < inst.m; ++j)
            if (mask & (1 << j)) dec.open[static_cast<std::size_t>(j)] = 1;
        try {
            best = std::min(best, transport_solve(inst, dec).total_cost_us);
        } catch (const InfeasibleError&) {
        }
    }
    return best;
}

} // namespace

TEST_CASE("transport_solve worked examples") {
    SUBCASE("serve locally") {
        auto inst = two_region(10, 5, 100, 100, 1.0, 2);
        const Assignment a = transport_solve(inst, PlacementDecision{{1, 1}});
        CHECK(a.at(0, 0) == 10);
        CHECK(a.at(1, 1) == 5);
        CHECK(a.total_latency_ms() == 0.0);
    }
    SUBCASE("single source") {
        auto inst = two_region(10, 5, 100, 100, 1.0, 2);
        const Assignment a = transport_solve(inst, PlacementDecision{{1, 0}});
        CHECK(a.at(0, 0) == 10);
        CHECK(a.at(1, 0) == 5);
        CHECK(a.total_latency_ms() == doctest::Approx(5.0));
    }
    SUBCASE("capacity-forced split") {
        auto inst = two_region(10, 0, 6, 100, 2.0, 2);
        const Assignment a = transport_solve(inst, PlacementDecision{{1, 1}});
        CHECK(a.at(0, 0) == 6);
        CHECK(a.at(0, 1) == 4);
        CHECK(a.total_latency_ms() == doctest::Approx(8.0));
    }
}

TEST_CASE("transport_solve names the capacity shortfall when infeasible") {
    auto inst = two_region(10, 5, 6, 100, 1.0, 2);
    try {
        transport_solve(inst, PlacementDecision{{1, 0}});
        FAIL("expected InfeasibleError");
    } catch (const InfeasibleError& e) {
        CHECK(std::string(e.what()).find("shortfall 9") != std::string::npos);
    }
}

TEST_CASE("transport_solve matches brute-force flow enumeration on tiny instances") {
    Rng rng(12);
    int done = 0;
    while (done < 20) {
        PlacementInstance inst = random_instance(rng, 3, 3, 6);
        std::vector<int> open = {uniform_int(rng, 0, 1), uniform_int(rng, 0, 1), 1};
        const std::int64_t want = brute_transport(inst, open);
        PlacementDecision dec{open};
        if (detail::open_capacity(inst, open) < inst.total_demand()) {
            CHECK_THROWS_AS(transport_solve(inst, dec), InfeasibleError);
        } else {
            const Assignment a = transport_solve(inst, dec);
            CHECK(a.total_cost_us == want);
            CHECK(satisfies_constraints(inst, dec, a));
        }
        ++done;
    }
}

TEST_CASE("exact_solve worked examples") {
    SUBCASE("local service is free when C = M") {
        Rng rng(1);
        PlacementInstance inst = random_instance(rng, 4, 4);
        for (int i = 0; i < 4; ++i)
            inst.capacity[static_cast<std::size_t>(i)] =
                std::max(inst.capacity[static_cast<std::size_t>(i)], inst.demand[static_cast<std::size_t>(i)]);
        const auto [dec, a] = exact_solve(inst);
        CHECK(a.total_cost_us == 0);
    }
    SUBCASE("C=1 picks the demand-heavy region") {
        auto inst = two_region(3, 7, 10, 10, 1.0, 1);
        const auto [dec, a] = exact_solve(inst);
        CHECK(dec.open == std::vector<int>{0, 1});
        CHECK(a.total_latency_ms() == doctest::Approx(3.0));
    }
}

TEST_CASE("exact_solve equals exhaustive subset enumeration on 100 random instances") {
    Rng rng(99);
    for (int it = 0; it < 100; ++it) {
        const int m = uniform_int(rng, 2, 6);
        PlacementInstance inst = random_instance(rng, m, uniform_int(rng, 1, m));
        const std::int64_t want = exhaustive_best_cost(inst);
        if (want >= std::numeric_limits<std::int64_t>::max() / 4) {
            CHECK_THROWS_AS(exact_solve(inst), InfeasibleError);
        } else {
            const auto [dec, a] = exact_solve(inst);
            CHECK(a.total_cost_us == want);
            CHECK(satisfies_constraints(inst, dec, a));
            CHECK(dec.replica_count() <= inst.max_replicas);
        }
    }
}

TEST_CASE("exact_solve breaks cost ties toward low region ids") {
    // two identical far-apart pairs; any single region of the heavy pair is
    // optimal, and region 0 has the lowest id
    PlacementInstance inst;
    inst.m = 4;
    inst.demand = {5, 5, 5, 5};
    inst.capacity = {20, 20, 20, 20};
    inst.latency = LatencyMatrix(4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (i != j) inst.latency.at(i, j) = 2.0;
    inst.max_replicas = 1;
    const auto [dec, a] = exact_solve(inst);
    CHECK(dec.open == std::vector<int>{1, 0, 0, 0});
}

TEST_CASE("exact_solve cost scales linearly with latency, decision unchanged") {
    Rng rng(17);
    for (int it = 0; it < 10; ++it) {
        PlacementInstance inst = random_instance(rng, 5, 2);
        PlacementInstance scaled = inst;
        for (double& l : scaled.latency.l) l *= 2.0;
        try {
            const auto [dec, a] = exact_solve(inst);
            const auto [dec2, a2] = exact_solve(scaled);
            CHECK(dec.open == dec2.open);
            CHECK(a2.total_cost_us == 2 * a.total_cost_us);
        } catch (const InfeasibleError&) {
            CHECK_THROWS_AS(exact_solve(scaled), InfeasibleError);
        }
    }
}

TEST_CASE("greedy worked example and dominance") {
    auto inst = two_region(3, 7, 10, 10, 1.0, 1);
    const auto [dec, a] = greedy_place(inst);
    CHECK(dec.open == std::vector<int>{0, 1});
    CHECK(a.total_latency_ms() == doctest::Approx(3.0));
}

TEST_CASE("greedy matches an independent step-by-step reference on 200 instances") {
    Rng rng(23);
    for (int it = 0; it < 200; ++it) {
        PlacementInstance inst = random_instance(rng, 15, uniform_int(rng, 1, 6));

        // reference: repeatedly open the feasible region with the best routing
        // cost (ties lowest id); grab max capacity while nothing is feasible
        auto ref_cost = [&](const std::vector<int>& open) -> std::int64_t {
            PlacementDecision d{open};
            try {
                return transport_solve(inst, d).total_cost_us;
            } catch (const InfeasibleError&) {
                return -1;
            }
        };
        std::vector<int> open(15, 0);
        std::int64_t cur = -1;
        for (int step = 0; step < inst.max_replicas; ++step) {
            int pick = -1;
            std::int64_t pick_cost = cur < 0 ? std::numeric_limits<std::int64_t>::max() : cur;
            for (int j = 0; j < 15; ++j) {
                if (open[static_cast<std::size_t>(j)]) continue;
                open[static_cast<std::size_t>(j)] = 1;
                const std::int64_t c = ref_cost(open);
                open[static_cast<std::size_t>(j)] = 0;
                if (c >= 0 && c < pick_cost) {
                    pick_cost = c;
                    pick = j;
                }
            }
            if (pick < 0) {
                if (cur >= 0) break;
                std::int64_t best_cap = -1;
                for (int j = 0; j < 15; ++j)
                    if (!open[static_cast<std::size_t>(j)] &&
                        inst.capacity[static_cast<std::size_t>(j)] > best_cap) {
                        best_cap = inst.capacity[static_cast<std::size_t>(j)];
                        pick = j;
                    }
            }
            open[static_cast<std::size_t>(pick)] = 1;
            const std::int64_t c = ref_cost(open);
            if (c >= 0) cur = c;
        }

        try {
            const auto [gdec, ga] = greedy_place(inst);
            CHECK(gdec.open == open);
            CHECK(ga.total_cost_us == cur);

            const auto [edec, ea] = exact_solve(inst);
            CHECK(ea.total_cost_us <= ga.total_cost_us);
            CHECK(satisfies_constraints(inst, gdec, ga));
        } catch (const InfeasibleError&) {
            CHECK(cur < 0); // reference must agree the instance was hopeless
        }
    }
}

TEST_CASE("largest_remainder preserves totals and exact proportions") {
    const auto q = largest_remainder(10, {1.0, 1.0, 1.0});
    CHECK(q == std::vector<std::int64_t>{4, 3, 3});
    const auto p = largest_remainder(12, {0.5, 0.25, 0.25});
    CHECK(p == std::vector<std::int64_t>{6, 3, 3});
    Rng rng(4);
    for (int it = 0; it < 50; ++it) {
        std::vector<double> w(7);
        for (double& x : w) x = uniform(rng, 0.0, 1.0);
        std::int64_t sum = 0;
        for (std::int64_t x : largest_remainder(1234, w)) {
            CHECK(x >= 0);
            sum += x;
        }
        CHECK(sum == 1234);
    }
}

TEST_CASE("distance_aware_place") {
    SUBCASE("square symmetry ties to the lowest id") {
        PlacementInstance inst;
        inst.m = 4;
        inst.demand = {8, 8, 8, 8};
        inst.capacity = {40, 40, 40, 40};
        RegionSet rs(4);
        rs[0] = {0, 0, 0, 0};
        rs[1] = {1, 0, 1, 0};
        rs[2] = {2, 1, 0, 0};
        rs[3] = {3, 1, 1, 0};
        inst.latency = latency_from_coords(rs, 1.0);
        inst.max_replicas = 1;
        const PlacementDecision dec = distance_aware_place(inst);
        CHECK(dec.open == std::vector<int>{1, 0, 0, 0});
    }
    SUBCASE("uniform demand coincides with exact_solve") {
        Rng rng(31);
        PlacementInstance inst = random_instance(rng, 6, 2);
        inst.demand = {7, 7, 7, 7, 7, 7};
        for (auto& u : inst.capacity) u += 42; // keep it feasible
        CHECK(distance_aware_place(inst).open == exact_solve(inst).first.open);
    }
    SUBCASE("decision is invariant to permuting the demand vector") {
        Rng rng(37);
        for (int it = 0; it < 10; ++it) {
            PlacementInstance inst = random_instance(rng, 6, 2);
            for (auto& u : inst.capacity) u += inst.total_demand();
            PlacementInstance perm = inst;
            std::rotate(perm.demand.begin(), perm.demand.begin() + 2, perm.demand.end());
            // keep totals identical (rotation preserves the sum)
            CHECK(distance_aware_place(inst).open == distance_aware_place(perm).open);
        }
    }
}

TEST_CASE("statistics_place") {
    Rng rng(41);
    SUBCASE("singleton history equal to the true distribution reproduces exact_solve") {
        PlacementInstance inst = random_instance(rng, 5, 2);
        for (auto& u : inst.capacity) u += inst.total_demand();
        GeoDistribution g;
        const double total = static_cast<double>(inst.total_demand());
        for (std::int64_t s : inst.demand) g.x.push_back(static_cast<double>(s) / total);
        CHECK(statistics_place({g}, inst).open == exact_solve(inst).first.open);
    }
    SUBCASE("point-mass history clusters replicas around that region") {
        PlacementInstance inst = random_instance(rng, 5, 1);
        for (auto& u : inst.capacity) u += inst.total_demand();
        GeoDistribution g;
        g.x = {0, 0, 0, 1, 0};
        const PlacementDecision dec = statistics_place({g, g, g}, inst);
        CHECK(dec.open == std::vector<int>{0, 0, 0, 1, 0});
    }
    SUBCASE("empty history is a configuration error") {
        PlacementInstance inst = random_instance(rng, 5, 2);
        CHECK_THROWS_AS(statistics_place({}, inst), ConfigError);
    }
}

TEST_CASE("heuristic_place") {
    SUBCASE("demand concentrated in C ample regions costs nothing") {
        PlacementInstance inst;
        inst.m = 4;
        inst.demand = {50, 60, 0, 0};
        inst.capacity = {100, 100, 100, 100};
        inst.latency = LatencyMatrix(4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (i != j) inst.latency.at(i, j) = 3.0;
        inst.max_replicas = 2;
        GeoDistribution g;
        g.x = {50.0 / 110, 60.0 / 110, 0, 0};
        const auto [dec, a] = heuristic_place(inst, g);
        CHECK(dec.open == std::vector<int>{1, 1, 0, 0});
        CHECK(a.total_cost_us == 0);
    }
    SUBCASE("dominated by exact and satisfies the constraints") {
        Rng rng(43);
        for (int it = 0; it < 50; ++it) {
            PlacementInstance inst = random_instance(rng, 8, 3);
            // make every top-C set feasible so the heuristic cannot bail out
            for (auto& u : inst.capacity) u += inst.total_demand();
            GeoDistribution g;
            g.x.assign(8, 0.0);
            double sum = 0.0;
            for (double& x : g.x) {
                x = uniform(rng, 0.0, 1.0);
                sum += x;
            }
            for (double& x : g.x) x /= sum;
            const auto [dec, a] = heuristic_place(inst, g);
            CHECK(satisfies_constraints(inst, dec, a));
            CHECK(dec.replica_count() == 3);
            CHECK(exact_solve(inst).second.total_cost_us <= a.total_cost_us);
        }
    }
    SUBCASE("overflow is split evenly across replicas with remaining capacity") {
        PlacementInstance inst;
        inst.m = 3;
        inst.demand = {10, 0, 0};
        inst.capacity = {0, 5, 100};
        inst.latency = LatencyMatrix(3);
        inst.latency.at(0, 1) = inst.latency.at(1, 0) = 1.0;
        inst.latency.at(0, 2) = inst.latency.at(2, 0) = 1.0;
        inst.latency.at(1, 2) = inst.latency.at(2, 1) = 1.0;
        inst.max_replicas = 2;
        GeoDistribution g;
        g.x = {0.0, 0.6, 0.4};
        const auto [dec, a] = heuristic_place(inst, g);
        CHECK(dec.open == std::vector<int>{0, 1, 1});
        CHECK(a.at(0, 1) == 5); // even split, then region 1 caps at 5
        CHECK(a.at(0, 2) == 5);
    }
}

TEST_CASE("coverage_feasible matches the top-C capacity test") {
    PlacementInstance inst;
    inst.m = 4;
    inst.demand = {10, 10, 10, 10};
    inst.capacity = {25, 14, 1, 1};
    inst.latency = LatencyMatrix(4);
    inst.max_replicas = 2;
    CHECK(!coverage_feasible(inst)); // 25 + 14 = 39 < 40
    inst.capacity[1] = 15;
    CHECK(coverage_feasible(inst)); // 25 + 15 = 40
    CHECK_NOTHROW(exact_solve(inst));
    inst.capacity[1] = 14;
    CHECK_THROWS_AS(exact_solve(inst), InfeasibleError);
}

TEST_CASE("no_replication matches the transport equivalence") {
    auto inst = two_region(10, 5, 100, 100, 1.0, 2);
    CHECK(no_replication_cost(inst, 0) == doctest::Approx(5.0));

    PlacementInstance origin_only = inst;
    origin_only.capacity = {15, 0};
    const Assignment a = transport_solve(origin_only, PlacementDecision{{1, 0}});
    CHECK(a.total_latency_ms() == doctest::Approx(no_replication_cost(inst, 0)));

    PlacementInstance local = inst;
    local.demand = {15, 0};
    CHECK(no_replication_cost(local, 0) == 0.0);

    CHECK_THROWS_AS(no_replication_cost(inst, 7), ConfigError);
}

TEST_CASE("instance file round-trip") {
    Rng rng(53);
    const PlacementInstance inst = random_instance(rng, 5, 2);
    std::stringstream ss;
    write_instance(ss, inst);
    const PlacementInstance back = read_instance(ss);
    CHECK(back.m == inst.m);
    CHECK(back.max_replicas == inst.max_replicas);
    CHECK(back.demand == inst.demand);
    CHECK(back.capacity == inst.capacity);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) CHECK(back.latency.at(i, j) == doctest::Approx(inst.latency.at(i, j)));
}

TEST_CASE("instance validation") {
    PlacementInstance inst = two_region(1, 1, 1, 1, 1.0, 3);
    CHECK_THROWS_AS(inst.validate(), ConfigError); // C > M
    inst = two_region(-1, 1, 1, 1, 1.0, 1);
    CHECK_THROWS_AS(inst.validate(), ConfigError);
}
