#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpqa/circuit.hpp"
#include "dpqa/rng.hpp"

namespace dpqa {

/// Uniform random simple d-regular graph on n vertices via the configuration
/// model with whole-sample rejection of self-loops and repeated pairs. The
/// edge set becomes a single commutation group. Reproducible per seed.
inline SlicedCircuit generate_qaoa_benchmark(int n_qubits, int degree, std::uint64_t seed) {
    if (degree < 1) throw std::invalid_argument("gen-qaoa: degree must be >= 1");
    if (n_qubits <= degree) throw std::invalid_argument("gen-qaoa: need more qubits than the degree");
    if ((static_cast<long long>(n_qubits) * degree) % 2 != 0) {
        throw std::invalid_argument("gen-qaoa: n_qubits * degree must be even");
    }

    std::mt19937_64 rng(derive_seed(seed, 0x71616f61ULL));
    std::vector<int> stubs(static_cast<std::size_t>(n_qubits) * degree);
    std::vector<Gate> edges;
    for (;;) {
        for (int q = 0; q < n_qubits; ++q) {
            for (int d = 0; d < degree; ++d) stubs[static_cast<std::size_t>(q) * degree + d] = q;
        }
        for (std::size_t i = stubs.size() - 1; i > 0; --i) {
            const std::size_t j = uniform_below(rng, i + 1);
            std::swap(stubs[i], stubs[j]);
        }
        edges.clear();
        bool ok = true;
        std::vector<std::pair<int, int>> keys;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            const int a = std::min(stubs[i], stubs[i + 1]);
            const int b = std::max(stubs[i], stubs[i + 1]);
            if (a == b) {
                ok = false;
                break;
            }
            keys.emplace_back(a, b);
            edges.push_back(Gate{a, b});
        }
        if (ok) {
            std::sort(keys.begin(), keys.end());
            ok = std::adjacent_find(keys.begin(), keys.end()) == keys.end();
        }
        if (ok) break;
    }
    std::sort(edges.begin(), edges.end(),
              [](const Gate& a, const Gate& b) { return a.normalized() < b.normalized(); });

    SlicedCircuit circuit;
    circuit.n_qubits = n_qubits;
    circuit.name = "qaoa-n" + std::to_string(n_qubits) + "-d" + std::to_string(degree) + "-s" +
                   std::to_string(seed);
    circuit.seed = seed;
    circuit.slices.push_back({SliceType::Commute, std::move(edges)});
    circuit.validate();
    return circuit;
}

}  // namespace dpqa
