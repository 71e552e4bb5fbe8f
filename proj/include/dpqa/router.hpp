#pragma once

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "dpqa/circuit.hpp"
#include "dpqa/geometry.hpp"
#include "dpqa/mis.hpp"

namespace dpqa {

/// One atom relocation between interaction sites.
struct Move {
    int qubit = 0;
    Site src;
    Site dst;

    friend bool operator==(const Move&, const Move&) = default;
};

/// Moves to decompose into compatible sets. dual_of links the two alternative
/// moves of one gate (either endpoint may travel); plain relocations carry -1.
struct RoutingInput {
    std::vector<Move> moves;
    std::vector<int> dual_of;  // index of the dual move, or -1
    std::vector<int> gate_of;  // originating gate index, or -1
};

/// Both candidate moves per gate: either endpoint may be brought to the
/// other's site. Exactly one of the two will be executed.
inline RoutingInput make_gate_move_pairs(const std::vector<Gate>& gates,
                                         const std::vector<Site>& site_of) {
    RoutingInput in;
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const Gate& g = gates[i];
        const int base = static_cast<int>(in.moves.size());
        in.moves.push_back({g.q0, site_of[g.q0], site_of[g.q1]});
        in.moves.push_back({g.q1, site_of[g.q1], site_of[g.q0]});
        in.dual_of.push_back(base + 1);
        in.dual_of.push_back(base);
        in.gate_of.push_back(static_cast<int>(i));
        in.gate_of.push_back(static_cast<int>(i));
    }
    return in;
}

/// Fixed relocations with no alternative endpoint (scatter and return legs).
inline RoutingInput make_plain_moves(const std::vector<Move>& moves) {
    RoutingInput in;
    in.moves = moves;
    in.dual_of.assign(moves.size(), -1);
    in.gate_of.assign(moves.size(), -1);
    return in;
}

/// Two moves cannot ride the same AOD motion iff any of the six order rules
/// trips: per axis, equal source coordinates with unequal targets, equal
/// targets with unequal sources, or a strict order reversal.
inline bool moves_conflict(const Move& a, const Move& b) {
    if (a.src.y == b.src.y && a.dst.y != b.dst.y) return true;
    if (a.dst.y == b.dst.y && a.src.y != b.src.y) return true;
    if (a.src.y != b.src.y && a.dst.y != b.dst.y && (a.src.y < b.src.y) != (a.dst.y < b.dst.y)) {
        return true;
    }
    if (a.src.x == b.src.x && a.dst.x != b.dst.x) return true;
    if (a.dst.x == b.dst.x && a.src.x != b.src.x) return true;
    if (a.src.x != b.src.x && a.dst.x != b.dst.x && (a.src.x < b.src.x) != (a.dst.x < b.dst.x)) {
        return true;
    }
    return false;
}

/// Pairwise conflict adjacency over all moves. Duals of one gate are always
/// adjacent (only one of them is executed); geometrically they conflict
/// anyway because swapping source and destination reverses an order.
inline std::vector<std::vector<int>> build_conflict_graph(const RoutingInput& input) {
    const int n = static_cast<int>(input.moves.size());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (input.dual_of[i] == j || moves_conflict(input.moves[i], input.moves[j])) {
                adj[i].push_back(j);
                adj[j].push_back(i);
            }
        }
    }
    return adj;
}

/// Ordered compatible move sets; each stores indices into the input moves.
struct RoutingPlan {
    std::vector<std::vector<int>> sets;
    std::vector<int> executed_for_gate;  // per gate index: executed move, or -1

    std::vector<std::vector<Move>> materialize(const RoutingInput& input) const {
        std::vector<std::vector<Move>> out;
        out.reserve(sets.size());
        for (const auto& set : sets) {
            std::vector<Move>& moves = out.emplace_back();
            moves.reserve(set.size());
            for (const int idx : set) moves.push_back(input.moves[idx]);
        }
        return out;
    }
};

namespace detail {

inline std::vector<int> sorted_by_distance(const RoutingInput& input, const std::vector<char>& alive,
                                           const std::vector<double>& dist) {
    std::vector<int> order;
    order.reserve(input.moves.size());
    for (int i = 0; i < static_cast<int>(input.moves.size()); ++i) {
        if (alive[i]) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist[a] != dist[b]) return dist[a] > dist[b];
        const Move& ma = input.moves[a];
        const Move& mb = input.moves[b];
        if (ma.qubit != mb.qubit) return ma.qubit < mb.qubit;
        return std::tie(ma.src, ma.dst) < std::tie(mb.src, mb.dst);
    });
    return order;
}

inline RoutingPlan route_greedy(const RoutingInput& input, double pitch_um, int window) {
    RoutingPlan plan;
    int max_gate = -1;
    for (const int g : input.gate_of) max_gate = std::max(max_gate, g);
    plan.executed_for_gate.assign(max_gate + 1, -1);

    const int n = static_cast<int>(input.moves.size());
    std::vector<double> dist(n);
    for (int i = 0; i < n; ++i) {
        dist[i] = site_distance_um(input.moves[i].src, input.moves[i].dst, pitch_um);
    }
    std::vector<char> alive(n, 1);
    int n_alive = n;

    while (n_alive > 0) {
        const std::vector<int> order = sorted_by_distance(input, alive, dist);
        const int scan_limit =
            window > 0 ? std::min<int>(window, static_cast<int>(order.size())) : static_cast<int>(order.size());

        std::vector<int> chosen;
        for (int oi = 0; oi < scan_limit; ++oi) {
            const int cand = order[oi];
            bool ok = true;
            for (const int sel : chosen) {
                if (input.dual_of[sel] == cand || moves_conflict(input.moves[sel], input.moves[cand])) {
                    ok = false;
                    break;
                }
            }
            if (ok) chosen.push_back(cand);
        }

        for (const int idx : chosen) {
            alive[idx] = 0;
            --n_alive;
            const int dual = input.dual_of[idx];
            if (dual != -1 && alive[dual]) {
                alive[dual] = 0;
                --n_alive;
            }
            if (input.gate_of[idx] != -1) plan.executed_for_gate[input.gate_of[idx]] = idx;
        }
        plan.sets.push_back(std::move(chosen));
    }
    return plan;
}

}  // namespace detail

/// Greedy maximal-IS routing: each round sorts the remaining moves by
/// distance (longest first), scans the whole list building a maximal
/// compatible set, emits it, and deletes its members together with their
/// duals.
inline RoutingPlan route_sort_is(const RoutingInput& input, double pitch_um) {
    return detail::route_greedy(input, pitch_um, 0);
}

/// sortIS restricted to the window of the K longest remaining moves per
/// round; identical to sortIS whenever the move count stays within K.
inline RoutingPlan route_window_is(const RoutingInput& input, double pitch_um, int window) {
    if (window < 1) throw std::invalid_argument("route_window_is: window must be >= 1");
    return detail::route_greedy(input, pitch_um, window);
}

namespace detail {

/// Rounds a pure greedy continuation would need from the given residue.
inline int greedy_rounds_from(const RoutingInput& input, std::vector<char> alive, int n_alive,
                              const std::vector<double>& dist) {
    int rounds = 0;
    while (n_alive > 0) {
        const std::vector<int> order = sorted_by_distance(input, alive, dist);
        std::vector<int> chosen;
        for (const int cand : order) {
            bool ok = true;
            for (const int sel : chosen) {
                if (input.dual_of[sel] == cand || moves_conflict(input.moves[sel], input.moves[cand])) {
                    ok = false;
                    break;
                }
            }
            if (ok) chosen.push_back(cand);
        }
        for (const int idx : chosen) {
            alive[idx] = 0;
            --n_alive;
            const int dual = input.dual_of[idx];
            if (dual != -1 && alive[dual]) {
                alive[dual] = 0;
                --n_alive;
            }
        }
        ++rounds;
    }
    return rounds;
}

}  // namespace detail

/// Exact variant: each round solves for a maximum (not merely maximal)
/// compatible set by branch and bound and commits to it when a greedy
/// rollout confirms the larger set does not cost extra rounds downstream;
/// otherwise the round keeps the greedy set. A maximum first pick can
/// fragment the residue, so the rollout guard is what keeps the total set
/// count at or below the greedy router's on every instance. Guarded by
/// instance size; intended as a quality oracle for the greedy router.
inline RoutingPlan route_exact_mis(const RoutingInput& input, double pitch_um, int guard = 64) {
    RoutingPlan plan;
    int max_gate = -1;
    for (const int g : input.gate_of) max_gate = std::max(max_gate, g);
    plan.executed_for_gate.assign(max_gate + 1, -1);

    const int n = static_cast<int>(input.moves.size());
    std::vector<double> dist(n);
    for (int i = 0; i < n; ++i) {
        dist[i] = site_distance_um(input.moves[i].src, input.moves[i].dst, pitch_um);
    }
    std::vector<char> alive(n, 1);
    int n_alive = n;

    while (n_alive > 0) {
        if (n_alive > guard) {
            throw std::invalid_argument(
                "route_exact_mis: instance exceeds the exact-search guard; use sortis/windowis");
        }
        std::vector<int> order = detail::sorted_by_distance(input, alive, dist);
        std::vector<std::uint64_t> adjacency(order.size(), 0);
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                if (input.dual_of[order[i]] == order[j] ||
                    moves_conflict(input.moves[order[i]], input.moves[order[j]])) {
                    adjacency[i] |= std::uint64_t{1} << j;
                    adjacency[j] |= std::uint64_t{1} << i;
                }
            }
        }
        // warm start from the greedy longest-first maximal set: ties keep the
        // greedy pick, so the exact solver diverges only to pack strictly more
        std::uint64_t greedy_mask = 0;
        int greedy_size = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if ((adjacency[i] & greedy_mask) == 0) {
                greedy_mask |= std::uint64_t{1} << i;
                ++greedy_size;
            }
        }
        std::uint64_t mask = max_independent_set_mask(adjacency, greedy_mask, greedy_size);

        if (mask != greedy_mask) {
            auto residue_rounds = [&](std::uint64_t set_mask) {
                std::vector<char> next_alive = alive;
                int next_n = n_alive;
                for (std::size_t i = 0; i < order.size(); ++i) {
                    if (!(set_mask & (std::uint64_t{1} << i))) continue;
                    const int idx = order[i];
                    next_alive[idx] = 0;
                    --next_n;
                    const int dual = input.dual_of[idx];
                    if (dual != -1 && next_alive[dual]) {
                        next_alive[dual] = 0;
                        --next_n;
                    }
                }
                return detail::greedy_rounds_from(input, std::move(next_alive), next_n, dist);
            };
            if (residue_rounds(mask) > residue_rounds(greedy_mask)) mask = greedy_mask;
        }

        std::vector<int> chosen;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (mask & (std::uint64_t{1} << i)) chosen.push_back(order[i]);
        }
        for (const int idx : chosen) {
            alive[idx] = 0;
            --n_alive;
            const int dual = input.dual_of[idx];
            if (dual != -1 && alive[dual]) {
                alive[dual] = 0;
                --n_alive;
            }
            if (input.gate_of[idx] != -1) plan.executed_for_gate[input.gate_of[idx]] = idx;
        }
        plan.sets.push_back(std::move(chosen));
    }
    return plan;
}

}  // namespace dpqa
