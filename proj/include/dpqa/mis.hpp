#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace dpqa {

/// Exact maximum independent set by branch and bound over bitset graphs of
/// at most 64 vertices. Branches on the highest-degree candidate vertex and
/// prunes with the trivial |IS| + |candidates| bound. Deterministic. An
/// incumbent set may be supplied as a warm start; it is returned unchanged
/// unless a strictly larger set exists.
inline std::uint64_t max_independent_set_mask(const std::vector<std::uint64_t>& adjacency,
                                              std::uint64_t incumbent_mask = 0,
                                              int incumbent_size = 0) {
    const int n = static_cast<int>(adjacency.size());
    if (n > 64) throw std::invalid_argument("max_independent_set_mask: more than 64 vertices");
    if (n == 0) return 0;

    std::uint64_t best_mask = incumbent_mask;
    int best_size = incumbent_size;

    std::function<void(std::uint64_t, std::uint64_t, int)> explore =
        [&](std::uint64_t candidates, std::uint64_t chosen, int size) {
            if (candidates == 0) {
                if (size > best_size) {
                    best_size = size;
                    best_mask = chosen;
                }
                return;
            }
            if (size + std::popcount(candidates) <= best_size) return;

            int pivot = -1;
            int pivot_degree = -1;
            for (std::uint64_t rest = candidates; rest != 0; rest &= rest - 1) {
                const int v = std::countr_zero(rest);
                const int deg = std::popcount(adjacency[v] & candidates);
                if (deg > pivot_degree) {
                    pivot_degree = deg;
                    pivot = v;
                }
            }
            const std::uint64_t bit = std::uint64_t{1} << pivot;
            explore(candidates & ~(adjacency[pivot] | bit), chosen | bit, size + 1);
            explore(candidates & ~bit, chosen, size);
        };

    explore(n == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1), 0, 0);
    return best_mask;
}

}  // namespace dpqa
