// Shared hand-built scenarios used by the unit and acceptance suites.
#pragma once

#include <cmath>

#include "dpqa/arch.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/geometry.hpp"
#include "dpqa/program.hpp"

namespace fixtures {

/// Seven qubits, three gates in one exposure. Movers 0, 4, and 6 share a
/// source row, so a single simultaneous pickup lifts all three; the longest
/// displacement is a sqrt(2) site diagonal and the exposure fires with the
/// movers still aboard the AOD.
struct WorkedExample {
    dpqa::SlicedCircuit circuit;
    dpqa::InstructionProgram program;
};

inline WorkedExample make_worked_example(const dpqa::ArchConfig& arch) {
    WorkedExample ex;
    ex.circuit.n_qubits = 7;
    ex.circuit.name = "worked-example";
    ex.circuit.slices.push_back({dpqa::SliceType::Commute, {{0, 1}, {2, 4}, {3, 6}}});

    dpqa::InstructionProgram& p = ex.program;
    p.n_qubits = 7;
    p.pitch_um = arch.site_pitch_um;
    p.rydberg_range_um = arch.rydberg_range_um;
    p.initial_sites = {{0, 0}, {1, 1}, {3, 1}, {4, 1}, {2, 0}, {6, 3}, {4, 0}};
    p.stages = {{{0, 1}, {2, 4}, {3, 6}}};

    dpqa::TransferInst pickup;
    pickup.pickup = true;
    pickup.qubits = {0, 4, 6};
    pickup.t_start_us = 0.0;
    pickup.duration_us = arch.t_transfer_us;
    p.instructions.emplace_back(pickup);

    const double pitch = arch.site_pitch_um;
    dpqa::MoveInst move;
    move.motions = {{0, {0.0, 0.0}, {pitch, pitch}},
                    {4, {2.0 * pitch, 0.0}, {3.0 * pitch, pitch}},
                    {6, {4.0 * pitch, 0.0}, {4.0 * pitch, pitch}}};
    move.t_start_us = pickup.duration_us;
    move.duration_us = dpqa::movement_time_us(std::sqrt(2.0) * pitch, arch.accel_m_per_s2);
    p.instructions.emplace_back(move);

    dpqa::RydbergInst ryd;
    ryd.stage = 0;
    ryd.t_start_us = move.t_start_us + move.duration_us;
    ryd.duration_us = arch.t_rydberg_us;
    p.instructions.emplace_back(ryd);

    p.finalize();
    return ex;
}

}  // namespace fixtures
