#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dpqa/arch.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/geometry.hpp"
#include "dpqa/placer.hpp"
#include "dpqa/program.hpp"
#include "dpqa/router.hpp"
#include "dpqa/scheduler.hpp"

namespace dpqa {

struct CodegenOptions {
    /// Charge movement time for the column-alignment shifts between row
    /// pickups. Off by default: the shifts are emitted as zero-duration
    /// logical moves (atoms already aboard ride along sub-pitch distances).
    bool charge_alignment_shifts = false;
};

/// Instructions for one compatible move set on one AOD, with start times
/// relative to the beginning of the set: atoms are picked up row by row in
/// ascending source row, columns realigning between rows as needed, then one
/// parallel motion covers the longest displacement, then atoms drop off row
/// by row in ascending destination row.
inline std::vector<Instruction> lower_move_set(const std::vector<Move>& set, int aod,
                                               const ArchConfig& arch, const CodegenOptions& opts = {}) {
    std::vector<Instruction> out;
    if (set.empty()) return out;

    std::map<int, std::vector<const Move*>> by_src_row;
    for (const Move& m : set) by_src_row[m.src.y].push_back(&m);

    double cursor = 0.0;
    std::vector<double> active_columns;  // current column positions, um
    for (auto& [row, moves] : by_src_row) {
        std::sort(moves.begin(), moves.end(),
                  [](const Move* a, const Move* b) { return a->src.x < b->src.x; });
        std::vector<double> needed;
        needed.reserve(moves.size());
        for (const Move* m : moves) {
            assert(needed.empty() || needed.back() < m->src.x * arch.site_pitch_um);
            needed.push_back(m->src.x * arch.site_pitch_um);
        }
        if (!active_columns.empty() && needed != active_columns) {
            MoveInst shift;
            shift.aod = aod;
            shift.t_start_us = cursor;
            shift.duration_us = 0.0;
            if (opts.charge_alignment_shifts) {
                double max_shift = 0.0;
                const std::size_t matched = std::min(active_columns.size(), needed.size());
                for (std::size_t i = 0; i < matched; ++i) {
                    max_shift = std::max(max_shift, std::abs(needed[i] - active_columns[i]));
                }
                shift.duration_us = movement_time_us(max_shift, arch.accel_m_per_s2);
            }
            cursor += shift.duration_us;
            out.emplace_back(std::move(shift));
        }
        active_columns = std::move(needed);

        TransferInst pickup;
        pickup.pickup = true;
        pickup.aod = aod;
        for (const Move* m : moves) pickup.qubits.push_back(m->qubit);
        pickup.t_start_us = cursor;
        pickup.duration_us = arch.t_transfer_us;
        cursor += pickup.duration_us;
        out.emplace_back(std::move(pickup));
    }

    MoveInst motion;
    motion.aod = aod;
    double max_disp = 0.0;
    for (const Move& m : set) {
        const Vec2 src = site_position_um(m.src, arch.site_pitch_um);
        const Vec2 dst = site_position_um(m.dst, arch.site_pitch_um);
        motion.motions.push_back({m.qubit, src, dst});
        max_disp = std::max(max_disp, distance_um(src, dst));
    }
    motion.t_start_us = cursor;
    motion.duration_us = movement_time_us(max_disp, arch.accel_m_per_s2);
    cursor += motion.duration_us;
    out.emplace_back(std::move(motion));

    std::map<int, std::vector<int>> by_dst_row;
    for (const Move& m : set) by_dst_row[m.dst.y].push_back(m.qubit);
    for (auto& [row, qubits] : by_dst_row) {
        TransferInst dropoff;
        dropoff.pickup = false;
        dropoff.aod = aod;
        dropoff.qubits = std::move(qubits);
        dropoff.t_start_us = cursor;
        dropoff.duration_us = arch.t_transfer_us;
        cursor += dropoff.duration_us;
        out.emplace_back(std::move(dropoff));
    }
    return out;
}

inline double instructions_duration_us(const std::vector<Instruction>& insts) {
    double end = 0.0;
    for (const Instruction& i : insts) end = std::max(end, instruction_end_us(i));
    return end;
}

struct Trunk {
    std::vector<int> set_indices;  // executed simultaneously on distinct AODs
    double duration_us = 0.0;      // longest member
};

/// Groups compatible move sets into trunks of n_aods sets executed
/// simultaneously; a trunk lasts as long as its longest member. Sets are
/// taken in descending duration (stable on ties), which keeps the total
/// duration nonincreasing in the number of AODs.
inline std::vector<Trunk> assign_round_robin(const std::vector<double>& set_durations_us, int n_aods) {
    if (n_aods < 1) throw std::invalid_argument("assign_round_robin: n_aods must be >= 1");
    std::vector<int> order(set_durations_us.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return set_durations_us[a] > set_durations_us[b];
    });
    std::vector<Trunk> trunks;
    for (std::size_t i = 0; i < order.size(); i += n_aods) {
        Trunk t;
        for (std::size_t j = i; j < std::min(order.size(), i + n_aods); ++j) {
            t.set_indices.push_back(order[j]);
        }
        t.duration_us = set_durations_us[t.set_indices.front()];
        trunks.push_back(std::move(t));
    }
    return trunks;
}

/// Compatible move sets for the two legs around one Rydberg stage: gather
/// brings one endpoint of each gate to its partner, scatter disperses the
/// moved atoms afterwards (back home, or to re-annealed sites).
struct StageTransitionPlan {
    std::vector<std::vector<Move>> gather_sets;
    std::vector<std::vector<Move>> scatter_sets;
};

namespace detail {

/// Lowers one leg's sets as round-robin trunks, appending to the program.
inline double lower_leg(const std::vector<std::vector<Move>>& sets, double cursor, int n_aods,
                        const ArchConfig& arch, const CodegenOptions& opts,
                        std::vector<Instruction>& out) {
    std::vector<std::vector<Instruction>> lowered;
    std::vector<double> durations;
    lowered.reserve(sets.size());
    for (const auto& set : sets) {
        lowered.push_back(lower_move_set(set, 0, arch, opts));
        durations.push_back(instructions_duration_us(lowered.back()));
    }
    for (const Trunk& trunk : assign_round_robin(durations, n_aods)) {
        for (std::size_t member = 0; member < trunk.set_indices.size(); ++member) {
            for (Instruction inst : lowered[trunk.set_indices[member]]) {
                std::visit(
                    [&](auto& i) {
                        if constexpr (requires { i.aod; }) i.aod = static_cast<int>(member);
                        i.t_start_us += cursor;
                    },
                    inst);
                out.push_back(std::move(inst));
            }
        }
        cursor += trunk.duration_us;
    }
    return cursor;
}

}  // namespace detail

/// Assembles the full timed program: for every stage, the gather trunks, the
/// Rydberg exposure, then the scatter trunks.
inline InstructionProgram lower_program(const SlicedCircuit& circuit, const Schedule& schedule,
                                        const Placement& placement,
                                        const std::vector<StageTransitionPlan>& plans,
                                        const ArchConfig& arch, int n_aods,
                                        const CodegenOptions& opts = {}) {
    if (static_cast<int>(plans.size()) != schedule.n_stages) {
        throw std::invalid_argument("lower_program: one transition plan per stage required");
    }
    InstructionProgram program;
    program.n_qubits = circuit.n_qubits;
    program.pitch_um = arch.site_pitch_um;
    program.rydberg_range_um = arch.rydberg_range_um;
    program.initial_sites = placement.per_stage.empty() ? std::vector<Site>(circuit.n_qubits, Site{0, 0})
                                                        : placement.per_stage.front();
    program.stages = schedule.gates_by_stage;

    double cursor = 0.0;
    for (int s = 0; s < schedule.n_stages; ++s) {
        cursor = detail::lower_leg(plans[s].gather_sets, cursor, n_aods, arch, opts,
                                   program.instructions);
        RydbergInst ryd;
        ryd.stage = s;
        ryd.t_start_us = cursor;
        ryd.duration_us = arch.t_rydberg_us;
        cursor += ryd.duration_us;
        program.instructions.emplace_back(ryd);
        cursor = detail::lower_leg(plans[s].scatter_sets, cursor, n_aods, arch, opts,
                                   program.instructions);
    }
    program.finalize();
    return program;
}

}  // namespace dpqa
