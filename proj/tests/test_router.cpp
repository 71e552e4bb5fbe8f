#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "dpqa/rng.hpp"
#include "dpqa/router.hpp"
#include "oracles.hpp"

using namespace dpqa;

namespace {

Move mk(int qubit, int sx, int sy, int dx, int dy) {
    return Move{qubit, Site{sx, sy}, Site{dx, dy}};
}

/// Random gather instance: 2g qubits placed injectively, g gates pairing
/// consecutive qubits.
struct Instance {
    std::vector<Gate> gates;
    std::vector<Site> site_of;
};

Instance random_instance(int n_gates, std::mt19937_64& rng) {
    Instance inst;
    const int n_qubits = 2 * n_gates;
    const int bound = static_cast<int>(std::floor(std::sqrt(static_cast<double>(n_qubits)))) + 4;
    std::set<std::pair<int, int>> used;
    inst.site_of.resize(n_qubits);
    for (int q = 0; q < n_qubits; ++q) {
        for (;;) {
            const Site s{static_cast<int>(uniform_below(rng, bound + 1)),
                         static_cast<int>(uniform_below(rng, bound + 1))};
            if (used.insert({s.x, s.y}).second) {
                inst.site_of[q] = s;
                break;
            }
        }
    }
    for (int i = 0; i < n_gates; ++i) inst.gates.push_back({2 * i, 2 * i + 1});
    return inst;
}

/// Validates a plan against the instance: conflict-free sets per the
/// independent predicate, exactly one executed move per gate, never both
/// duals, and monotone progress.
void check_plan(const RoutingInput& input, const RoutingPlan& plan, int n_gates) {
    const auto sets = plan.materialize(input);
    REQUIRE(oracles::plan_sets_conflict_free(sets));

    std::vector<int> executed_count(n_gates, 0);
    std::set<int> seen_indices;
    for (const auto& set : plan.sets) {
        REQUIRE(!set.empty());  // monotone progress
        for (const int idx : set) {
            REQUIRE(seen_indices.insert(idx).second);
            const int gate = input.gate_of[idx];
            if (gate >= 0) ++executed_count[gate];
            const int dual = input.dual_of[idx];
            if (dual >= 0) REQUIRE(!seen_indices.count(dual));
        }
    }
    for (const int c : executed_count) REQUIRE(c == 1);
}

}  // namespace

TEST_CASE("pairwise conflict rules", "[router]") {
    // same source row, targets split into different rows
    CHECK(moves_conflict(mk(0, 0, 0, 0, 1), mk(1, 1, 0, 1, 2)));
    // order preserved on both axes
    CHECK_FALSE(moves_conflict(mk(0, 0, 0, 2, 0), mk(1, 1, 1, 3, 1)));
    // column order reversal
    CHECK(moves_conflict(mk(0, 0, 0, 1, 1), mk(1, 1, 0, 0, 1)));
    // same target row from different source rows
    CHECK(moves_conflict(mk(0, 0, 0, 0, 2), mk(1, 1, 1, 1, 2)));
    // same source column, targets split into different columns
    CHECK(moves_conflict(mk(0, 3, 0, 2, 0), mk(1, 3, 1, 4, 1)));
    // same target column from different source columns
    CHECK(moves_conflict(mk(0, 2, 0, 3, 0), mk(1, 4, 1, 3, 1)));
}

TEST_CASE("conflict rules agree with the sign-preservation formulation", "[router]") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5000; ++trial) {
        const Move a = mk(0, static_cast<int>(uniform_below(rng, 5)), static_cast<int>(uniform_below(rng, 5)),
                          static_cast<int>(uniform_below(rng, 5)), static_cast<int>(uniform_below(rng, 5)));
        const Move b = mk(1, static_cast<int>(uniform_below(rng, 5)), static_cast<int>(uniform_below(rng, 5)),
                          static_cast<int>(uniform_below(rng, 5)), static_cast<int>(uniform_below(rng, 5)));
        CHECK(moves_conflict(a, b) == oracles::moves_conflict_sign_form(a, b));
        CHECK(moves_conflict(a, b) == moves_conflict(b, a));
    }
}

TEST_CASE("dual moves always conflict", "[router]") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const Site s{static_cast<int>(uniform_below(rng, 8)), static_cast<int>(uniform_below(rng, 8))};
        Site t{static_cast<int>(uniform_below(rng, 8)), static_cast<int>(uniform_below(rng, 8))};
        if (s == t) t.x = (t.x + 1) % 8;
        CHECK(moves_conflict(Move{0, s, t}, Move{1, t, s}));
    }
}

TEST_CASE("conflict graph construction", "[router]") {
    SECTION("one gate yields two vertices and one edge") {
        const auto input = make_gate_move_pairs({{0, 1}}, {{0, 0}, {1, 1}});
        const auto adj = build_conflict_graph(input);
        REQUIRE(adj.size() == 2);
        CHECK(adj[0] == std::vector<int>{1});
        CHECK(adj[1] == std::vector<int>{0});
    }
    SECTION("pairwise consistent moves leave only dual edges") {
        // vertical lifts in distinct columns
        std::vector<Site> sites;
        std::vector<Gate> gates;
        for (int i = 0; i < 4; ++i) {
            sites.push_back({i, 0});
            sites.push_back({i, 1});
            gates.push_back({2 * i, 2 * i + 1});
        }
        const auto input = make_gate_move_pairs(gates, sites);
        const auto adj = build_conflict_graph(input);
        int n_edges = 0;
        for (const auto& nb : adj) n_edges += static_cast<int>(nb.size());
        n_edges /= 2;
        CHECK(n_edges == 4 + 12);  // 4 dual edges; "up" of one gate conflicts "down" of every other
        for (int i = 0; i < 8; i += 2) {
            CHECK(std::find(adj[i].begin(), adj[i].end(), i + 1) != adj[i].end());
        }
    }
}

TEST_CASE("sortIS on a single gate executes the lower-id endpoint", "[router]") {
    const auto input = make_gate_move_pairs({{3, 1}}, {{}, {5, 5}, {}, {0, 0}});
    const auto plan = route_sort_is(input, 15.0);
    REQUIRE(plan.sets.size() == 1);
    REQUIRE(plan.sets[0].size() == 1);
    CHECK(input.moves[plan.sets[0][0]].qubit == 1);  // distance tie broken by qubit id
}

TEST_CASE("pairwise compatible gates route in one set", "[router]") {
    std::vector<Site> sites;
    std::vector<Gate> gates;
    for (int i = 0; i < 6; ++i) {
        sites.push_back({i, 0});
        sites.push_back({i, 1});
        gates.push_back({2 * i, 2 * i + 1});
    }
    const auto input = make_gate_move_pairs(gates, sites);
    const auto plan = route_sort_is(input, 15.0);
    REQUIRE(plan.sets.size() == 1);
    CHECK(plan.sets[0].size() == 6);
    check_plan(input, plan, 6);
}

TEST_CASE("four-gate instance splits into exactly two sets", "[router]") {
    // two crossing diagonal pairs plus two parallel companions
    std::vector<Site> sites(8);
    sites[0] = {0, 0};
    sites[1] = {1, 1};  // gate A
    sites[2] = {1, 0};
    sites[3] = {0, 1};  // gate C crosses A under every dual choice
    sites[4] = {5, 0};
    sites[5] = {6, 1};  // gate B parallel to A
    sites[6] = {6, 5};
    sites[7] = {5, 6};  // gate D parallel to C
    const std::vector<Gate> gates{{0, 1}, {2, 3}, {4, 5}, {6, 7}};
    const int optimum = oracles::optimal_set_count_bruteforce(gates, sites);
    REQUIRE(optimum == 2);

    const auto input = make_gate_move_pairs(gates, sites);
    const auto plan = route_sort_is(input, 15.0);
    CHECK(plan.sets.size() == 2);
    check_plan(input, plan, 4);
}

TEST_CASE("sortIS soundness on random instances", "[router]") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 60; ++trial) {
        const int g = 1 + static_cast<int>(uniform_below(rng, 40));
        const Instance inst = random_instance(g, rng);
        const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
        const auto plan = route_sort_is(input, 15.0);
        check_plan(input, plan, g);

        // the longest remaining move heads each round's set
        std::vector<char> alive(input.moves.size(), 1);
        for (const auto& set : plan.sets) {
            double longest = -1.0;
            for (std::size_t i = 0; i < input.moves.size(); ++i) {
                if (!alive[i]) continue;
                longest = std::max(longest,
                                   site_distance_um(input.moves[i].src, input.moves[i].dst, 15.0));
            }
            REQUIRE(site_distance_um(input.moves[set[0]].src, input.moves[set[0]].dst, 15.0) ==
                    longest);
            for (const int idx : set) {
                alive[idx] = 0;
                if (input.dual_of[idx] >= 0) alive[input.dual_of[idx]] = 0;
            }
        }
    }
}

TEST_CASE("plain relocations route soundly", "[router]") {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + static_cast<int>(uniform_below(rng, 30));
        std::vector<Move> moves;
        std::set<std::pair<int, int>> src_used, dst_used;
        for (int q = 0; q < n; ++q) {
            for (;;) {
                const Site s{static_cast<int>(uniform_below(rng, 9)),
                             static_cast<int>(uniform_below(rng, 9))};
                const Site d{static_cast<int>(uniform_below(rng, 9)),
                             static_cast<int>(uniform_below(rng, 9))};
                if (s == d) continue;
                if (!src_used.insert({s.x, s.y}).second) continue;
                if (!dst_used.insert({d.x, d.y}).second) {
                    src_used.erase({s.x, s.y});
                    continue;
                }
                moves.push_back({q, s, d});
                break;
            }
        }
        const auto input = make_plain_moves(moves);
        const auto plan = route_sort_is(input, 15.0);
        REQUIRE(oracles::plan_sets_conflict_free(plan.materialize(input)));
        std::size_t total = 0;
        for (const auto& set : plan.sets) total += set.size();
        REQUIRE(total == moves.size());  // every relocation executed exactly once
    }
}

TEST_CASE("windowIS equals sortIS when the window covers the instance", "[router]") {
    std::mt19937_64 rng(43);
    const Instance inst = random_instance(50, rng);
    const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
    const auto full = route_sort_is(input, 15.0);
    const auto windowed = route_window_is(input, 15.0, 1000);
    CHECK(full.sets == windowed.sets);
    CHECK_THROWS_AS(route_window_is(input, 15.0, 0), std::invalid_argument);
}

TEST_CASE("windowIS with K=1 emits one move per set, longest first", "[router]") {
    std::mt19937_64 rng(47);
    const Instance inst = random_instance(12, rng);
    const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
    const auto plan = route_window_is(input, 15.0, 1);
    for (const auto& set : plan.sets) CHECK(set.size() == 1);
    check_plan(input, plan, 12);
    double prev = 1e18;
    for (const auto& set : plan.sets) {
        const double d = site_distance_um(input.moves[set[0]].src, input.moves[set[0]].dst, 15.0);
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("exact MIS mode", "[router]") {
    std::mt19937_64 rng(53);
    SECTION("first set is at least as large as sortIS's") {
        for (int trial = 0; trial < 40; ++trial) {
            const Instance inst = random_instance(1 + static_cast<int>(uniform_below(rng, 10)), rng);
            const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
            const auto greedy = route_sort_is(input, 15.0);
            const auto exact = route_exact_mis(input, 15.0);
            REQUIRE(exact.sets[0].size() >= greedy.sets[0].size());
            check_plan(input, exact, static_cast<int>(inst.gates.size()));
        }
    }
    SECTION("pairwise compatible instance collapses to one set") {
        std::vector<Site> sites;
        std::vector<Gate> gates;
        for (int i = 0; i < 5; ++i) {
            sites.push_back({i, 0});
            sites.push_back({i, 1});
            gates.push_back({2 * i, 2 * i + 1});
        }
        const auto input = make_gate_move_pairs(gates, sites);
        const auto plan = route_exact_mis(input, 15.0);
        REQUIRE(plan.sets.size() == 1);
        CHECK(plan.sets[0].size() == 5);
    }
    SECTION("guard refuses oversized instances") {
        const Instance inst = random_instance(40, rng);
        const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
        CHECK_THROWS_WITH(route_exact_mis(input, 15.0),
                          Catch::Matchers::ContainsSubstring("sortis"));
    }
    SECTION("never more sets than sortIS on small instances") {
        for (int trial = 0; trial < 30; ++trial) {
            const Instance inst = random_instance(1 + static_cast<int>(uniform_below(rng, 10)), rng);
            const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
            CHECK(route_exact_mis(input, 15.0).sets.size() <= route_sort_is(input, 15.0).sets.size());
        }
    }
}

TEST_CASE("routing is deterministic", "[router]") {
    std::mt19937_64 rng(59);
    const Instance inst = random_instance(30, rng);
    const auto input = make_gate_move_pairs(inst.gates, inst.site_of);
    CHECK(route_sort_is(input, 15.0).sets == route_sort_is(input, 15.0).sets);
    CHECK(route_window_is(input, 15.0, 16).sets == route_window_is(input, 15.0, 16).sets);
}
