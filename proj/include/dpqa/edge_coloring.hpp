#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dpqa/circuit.hpp"

namespace dpqa {

struct EdgeColoring {
    std::vector<int> color;  // per input edge, values in {0, ..., max_degree}
    int n_colors = 0;        // distinct colors actually used
    int max_degree = 0;
};

namespace detail {

inline void require_simple_graph(int n_vertices, const std::vector<Gate>& edges) {
    std::vector<std::pair<int, int>> keys;
    keys.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.q0 == e.q1) throw std::invalid_argument("edge coloring: self-loop");
        if (e.q0 < 0 || e.q1 < 0 || e.q0 >= n_vertices || e.q1 >= n_vertices) {
            throw std::invalid_argument("edge coloring: vertex out of range");
        }
        keys.push_back(e.normalized());
    }
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end()) {
        throw std::invalid_argument("edge coloring: parallel edges");
    }
}

}  // namespace detail

/// Proper edge coloring with at most max_degree + 1 colors via maximal fans,
/// cd-path inversion, and fan rotation. Runs in O(|V| * |E|) up to the fan
/// scans. Deterministic: edges are processed in lexicographic (min, max)
/// order and every internal choice takes the lowest admissible index.
inline EdgeColoring color_edges_misra_gries(int n_vertices, const std::vector<Gate>& edges) {
    detail::require_simple_graph(n_vertices, edges);

    EdgeColoring out;
    out.color.assign(edges.size(), -1);
    if (edges.empty()) return out;

    std::vector<int> degree(n_vertices, 0);
    for (const auto& e : edges) {
        ++degree[e.q0];
        ++degree[e.q1];
    }
    const int delta = *std::max_element(degree.begin(), degree.end());
    out.max_degree = delta;
    const int palette = delta + 1;

    // at[v * palette + c] = edge index colored c at v, or -1.
    std::vector<int> at(static_cast<std::size_t>(n_vertices) * palette, -1);
    std::vector<int>& color = out.color;

    auto other = [&](int e, int v) { return edges[e].q0 == v ? edges[e].q1 : edges[e].q0; };
    auto slot = [&](int v, int c) -> int& { return at[static_cast<std::size_t>(v) * palette + c]; };
    auto is_free = [&](int v, int c) { return slot(v, c) == -1; };
    auto free_color = [&](int v) {
        for (int c = 0; c < palette; ++c) {
            if (is_free(v, c)) return c;
        }
        throw std::logic_error("edge coloring: no free color in palette");
    };
    auto set_color = [&](int e, int c) {
        slot(edges[e].q0, c) = e;
        slot(edges[e].q1, c) = e;
        color[e] = c;
    };
    auto unset_color = [&](int e) {
        const int c = color[e];
        slot(edges[e].q0, c) = -1;
        slot(edges[e].q1, c) = -1;
        color[e] = -1;
    };

    std::vector<int> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return edges[a].normalized() < edges[b].normalized(); });

    std::vector<char> in_fan(n_vertices, 0);
    std::vector<int> fan_vertex, fan_edge;

    for (const int e : order) {
        const auto [u, v] = edges[e].normalized();

        // Maximal fan of u starting at v. fan_edge[i] is the edge (u, fan_vertex[i]);
        // fan_edge[0] is the yet-uncolored edge e.
        fan_vertex.assign(1, v);
        fan_edge.assign(1, e);
        in_fan[v] = 1;
        for (;;) {
            const int tail = fan_vertex.back();
            int next_edge = -1;
            for (int c = 0; c < palette; ++c) {
                const int cand = slot(u, c);
                if (cand != -1 && is_free(tail, c) && !in_fan[other(cand, u)]) {
                    next_edge = cand;
                    break;
                }
            }
            if (next_edge == -1) break;
            const int w = other(next_edge, u);
            fan_vertex.push_back(w);
            fan_edge.push_back(next_edge);
            in_fan[w] = 1;
        }

        const int c = free_color(u);
        const int d = free_color(fan_vertex.back());

        if (c != d) {
            // Invert the cd-path starting at u (u has no c-edge, so the path
            // begins with its d-edge, if any, and is a simple chain).
            std::vector<std::pair<int, int>> path;  // (edge, old color)
            int cur = u;
            int col = d;
            for (;;) {
                const int pe = slot(cur, col);
                if (pe == -1) break;
                path.emplace_back(pe, col);
                cur = other(pe, cur);
                col = (col == d) ? c : d;
            }
            for (const auto& [pe, oldc] : path) unset_color(pe);
            for (const auto& [pe, oldc] : path) set_color(pe, oldc == c ? d : c);
        }

        // First fan prefix that is still a fan after the inversion and whose
        // tip has d free; rotate it and finish with d.
        int w = -1;
        bool prefix_ok = true;
        for (std::size_t j = 0; j < fan_vertex.size(); ++j) {
            if (j > 0) {
                prefix_ok = prefix_ok && is_free(fan_vertex[j - 1], color[fan_edge[j]]);
                if (!prefix_ok) break;
            }
            if (is_free(fan_vertex[j], d)) {
                w = static_cast<int>(j);
                break;
            }
        }
        if (w < 0) throw std::logic_error("edge coloring: no rotatable fan prefix");

        std::vector<int> shifted(w);
        for (int i = 0; i < w; ++i) shifted[i] = color[fan_edge[i + 1]];
        for (int i = 1; i <= w; ++i) unset_color(fan_edge[i]);
        for (int i = 0; i < w; ++i) set_color(fan_edge[i], shifted[i]);
        set_color(fan_edge[w], d);

        for (const int fv : fan_vertex) in_fan[fv] = 0;
    }

    std::vector<char> used(palette, 0);
    for (const int c : color) used[c] = 1;
    out.n_colors = static_cast<int>(std::count(used.begin(), used.end(), 1));
    return out;
}

/// Exhaustive chromatic-index computation by backtracking over edge colors
/// with fewest-candidates-first ordering and canonical color introduction.
/// Intended as an audit oracle for small graphs; guarded by max_edges.
inline int exact_chromatic_index(int n_vertices, const std::vector<Gate>& edges, int max_edges = 48) {
    detail::require_simple_graph(n_vertices, edges);
    if (static_cast<int>(edges.size()) > max_edges) {
        throw std::invalid_argument("exact_chromatic_index: instance above audit guard");
    }
    if (edges.empty()) return 0;

    std::vector<int> degree(n_vertices, 0);
    for (const auto& e : edges) {
        ++degree[e.q0];
        ++degree[e.q1];
    }
    const int delta = *std::max_element(degree.begin(), degree.end());

    const int m = static_cast<int>(edges.size());
    for (int k = delta; k <= m && k <= 63; ++k) {
        std::vector<std::uint64_t> used(n_vertices, 0);
        std::vector<int> assigned(m, -1);
        const std::uint64_t full = (std::uint64_t{1} << k) - 1;

        auto candidates = [&](int e) { return full & ~(used[edges[e].q0] | used[edges[e].q1]); };

        // fewest-candidates-first backtracking
        std::function<bool(int, int)> solve = [&](int placed, int max_color_used) -> bool {
            if (placed == m) return true;
            int best = -1;
            int best_count = 65;
            for (int e = 0; e < m; ++e) {
                if (assigned[e] != -1) continue;
                const int cnt = std::popcount(candidates(e));
                if (cnt == 0) return false;
                if (cnt < best_count) {
                    best_count = cnt;
                    best = e;
                }
            }
            const std::uint64_t cand = candidates(best);
            // colors above max_color_used + 1 are interchangeable; try one
            const int cap = std::min(k - 1, max_color_used + 1);
            for (int col = 0; col <= cap; ++col) {
                if (!(cand & (std::uint64_t{1} << col))) continue;
                used[edges[best].q0] |= (std::uint64_t{1} << col);
                used[edges[best].q1] |= (std::uint64_t{1} << col);
                assigned[best] = col;
                if (solve(placed + 1, std::max(max_color_used, col))) return true;
                assigned[best] = -1;
                used[edges[best].q0] &= ~(std::uint64_t{1} << col);
                used[edges[best].q1] &= ~(std::uint64_t{1} << col);
            }
            return false;
        };
        if (solve(0, -1)) return k;
    }
    return m;  // every simple graph admits the one-color-per-edge coloring
}

}  // namespace dpqa
