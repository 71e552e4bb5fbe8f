#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dpqa/circuit.hpp"
#include "dpqa/edge_coloring.hpp"

namespace dpqa {

/// Stage assignment for the gates of one slice; stages are 0-based and local
/// to the slice.
struct SliceSchedule {
    std::vector<int> stage_of;  // per gate position inside the slice
    int n_stages = 0;
};

struct SliceDiagnostics {
    int slice_index = 0;
    SliceType type = SliceType::Commute;
    int n_gates = 0;
    int max_degree = 0;  // commutation groups only
    int n_stages = 0;
    std::optional<int> exact_chromatic_index;  // filled on audit request
};

struct Schedule {
    /// stage_by_slice[slice][position] = global stage index.
    std::vector<std::vector<int>> stage_by_slice;
    int n_stages = 0;

    struct SliceBounds {
        int slice = 0;
        int first_stage = 0;
        int last_stage = -1;  // inclusive; first > last for an empty slice
    };
    std::vector<SliceBounds> slice_bounds;

    /// Execution view: the gates of each global stage (a matching).
    std::vector<std::vector<Gate>> gates_by_stage;

    std::vector<SliceDiagnostics> diagnostics;
};

struct ScheduleOptions {
    /// Also compute the exact chromatic index per commutation group
    /// (exhaustive; refuses slices above the edge guard).
    bool exact_chromatic_audit = false;
    int exact_audit_max_edges = 48;
};

/// Stages for a commutation group: the edge coloring of the interaction
/// graph, compacted to consecutive stage indices in ascending color order.
/// color_order, when given, permutes the compacted stages (an explicit hook
/// for placement-driven stage reordering).
inline SliceSchedule schedule_commutation_group(int n_qubits, const std::vector<Gate>& gates,
                                                const std::vector<int>* color_order = nullptr) {
    if (gates.empty()) throw std::invalid_argument("schedule_commutation_group: empty group");
    const EdgeColoring coloring = color_edges_misra_gries(n_qubits, gates);

    std::vector<char> used(coloring.max_degree + 1, 0);
    for (const int c : coloring.color) used[c] = 1;
    std::vector<int> compact(coloring.max_degree + 1, -1);
    int next = 0;
    for (int c = 0; c <= coloring.max_degree; ++c) {
        if (used[c]) compact[c] = next++;
    }

    SliceSchedule out;
    out.n_stages = coloring.n_colors;
    out.stage_of.reserve(gates.size());
    for (const int c : coloring.color) out.stage_of.push_back(compact[c]);

    if (color_order != nullptr) {
        if (static_cast<int>(color_order->size()) != out.n_stages) {
            throw std::invalid_argument("schedule_commutation_group: permutation size mismatch");
        }
        std::vector<char> seen(out.n_stages, 0);
        for (const int p : *color_order) {
            if (p < 0 || p >= out.n_stages || seen[p]) {
                throw std::invalid_argument("schedule_commutation_group: invalid permutation");
            }
            seen[p] = 1;
        }
        for (int& s : out.stage_of) s = (*color_order)[s];
    }
    return out;
}

/// ASAP levelization of an ordered gate list: a gate lands one stage after
/// the latest earlier gate sharing a qubit. The stage count equals the
/// longest dependency chain.
inline SliceSchedule schedule_dependency(const std::vector<Gate>& gates) {
    SliceSchedule out;
    out.stage_of.reserve(gates.size());
    int last_max = -1;
    std::vector<int> last_touch;
    for (const auto& g : gates) {
        const int needed = std::max(g.q0, g.q1) + 1;
        if (static_cast<int>(last_touch.size()) < needed) last_touch.resize(needed, -1);
        const int s = std::max(last_touch[g.q0], last_touch[g.q1]) + 1;
        out.stage_of.push_back(s);
        last_touch[g.q0] = s;
        last_touch[g.q1] = s;
        last_max = std::max(last_max, s);
    }
    out.n_stages = last_max + 1;
    return out;
}

/// Schedules every slice independently and concatenates the fragments with
/// global stage offsets.
inline Schedule schedule_circuit(const SlicedCircuit& circuit, const ScheduleOptions& options = {}) {
    circuit.validate();
    Schedule out;
    int offset = 0;
    for (std::size_t si = 0; si < circuit.slices.size(); ++si) {
        const Slice& slice = circuit.slices[si];
        SliceSchedule frag;
        SliceDiagnostics diag;
        diag.slice_index = static_cast<int>(si);
        diag.type = slice.type;
        diag.n_gates = static_cast<int>(slice.gates.size());
        if (slice.gates.empty()) {
            frag.n_stages = 0;
        } else if (slice.type == SliceType::Commute) {
            frag = schedule_commutation_group(circuit.n_qubits, slice.gates);
            std::vector<int> degree(circuit.n_qubits, 0);
            for (const auto& g : slice.gates) {
                ++degree[g.q0];
                ++degree[g.q1];
            }
            diag.max_degree = *std::max_element(degree.begin(), degree.end());
            if (options.exact_chromatic_audit) {
                diag.exact_chromatic_index =
                    exact_chromatic_index(circuit.n_qubits, slice.gates, options.exact_audit_max_edges);
            }
        } else {
            frag = schedule_dependency(slice.gates);
        }
        diag.n_stages = frag.n_stages;

        std::vector<int>& global = out.stage_by_slice.emplace_back();
        global.reserve(frag.stage_of.size());
        for (const int s : frag.stage_of) global.push_back(offset + s);
        out.slice_bounds.push_back({static_cast<int>(si), offset, offset + frag.n_stages - 1});
        out.diagnostics.push_back(diag);
        offset += frag.n_stages;
    }
    out.n_stages = offset;

    out.gates_by_stage.assign(out.n_stages, {});
    for (std::size_t si = 0; si < circuit.slices.size(); ++si) {
        for (std::size_t gi = 0; gi < circuit.slices[si].gates.size(); ++gi) {
            out.gates_by_stage[out.stage_by_slice[si][gi]].push_back(circuit.slices[si].gates[gi]);
        }
    }
    return out;
}

}  // namespace dpqa
