#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpqa/arch.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/geometry.hpp"
#include "dpqa/program.hpp"

namespace dpqa {

enum class ViolationKind {
    AodOrderInversion,       // row/column order changes within one motion
    UnscheduledInteraction,  // two qubits within Rydberg range with no gate scheduled
    GateNotColocated,        // a scheduled gate's qubits are apart at its stage
    SiteOvercrowded,         // more than two qubits share a site during a stage
    MisalignedTransfer,      // transfer of a qubit that is not at an aligned trap
    WrongStage,              // gate executed at a stage other than its scheduled one
    Malformed,               // structural inconsistency in the program
};

inline const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::AodOrderInversion: return "aod-order-inversion";
        case ViolationKind::UnscheduledInteraction: return "unscheduled-interaction";
        case ViolationKind::GateNotColocated: return "gate-not-colocated";
        case ViolationKind::SiteOvercrowded: return "site-overcrowded";
        case ViolationKind::MisalignedTransfer: return "misaligned-transfer";
        case ViolationKind::WrongStage: return "wrong-stage";
        case ViolationKind::Malformed: return "malformed";
    }
    return "unknown";
}

struct Violation {
    ViolationKind kind = ViolationKind::Malformed;
    std::string message;
    int instruction = -1;  // index into the program, or -1
    std::vector<int> qubits;
};

namespace detail {

inline constexpr double kPosTolUm = 1e-6;

struct ReplayResult {
    std::vector<Violation> violations;
    std::vector<int> pairs_per_stage;  // co-sited pairs at each Rydberg exposure
    std::vector<std::vector<std::pair<int, int>>> executed_pairs;  // normalized, per stage
};

/// Replays trap occupancy and atom positions through the instruction list,
/// collecting the geometric and structural violations. Schedule-consistency
/// checks live in verify().
inline ReplayResult replay_program(const InstructionProgram& program) {
    ReplayResult result;
    const int n = program.n_qubits;
    auto violate = [&](ViolationKind kind, std::string msg, int inst, std::vector<int> qs = {}) {
        result.violations.push_back({kind, std::move(msg), inst, std::move(qs)});
    };

    if (static_cast<int>(program.initial_sites.size()) != n) {
        violate(ViolationKind::Malformed, "initial_sites does not list every qubit", -1);
        return result;
    }

    std::vector<Vec2> pos(n);
    for (int q = 0; q < n; ++q) pos[q] = site_position_um(program.initial_sites[q], program.pitch_um);
    std::vector<int> in_aod(n, -1);
    std::map<int, int> held_count;  // per AOD

    auto on_grid = [&](const Vec2& p) {
        const double gx = p.x / program.pitch_um;
        const double gy = p.y / program.pitch_um;
        return std::abs(gx - std::round(gx)) * program.pitch_um < kPosTolUm &&
               std::abs(gy - std::round(gy)) * program.pitch_um < kPosTolUm;
    };
    auto near = [](double a, double b) { return std::abs(a - b) < kPosTolUm; };
    auto sign_of = [](double d) { return d < -kPosTolUm ? -1 : (d > kPosTolUm ? 1 : 0); };

    int rydberg_seen = 0;
    for (std::size_t idx = 0; idx < program.instructions.size(); ++idx) {
        const int ii = static_cast<int>(idx);
        const Instruction& inst = program.instructions[idx];

        if (const auto* t = std::get_if<TransferInst>(&inst)) {
            std::set<int> seen;
            for (const int q : t->qubits) {
                if (q < 0 || q >= n) {
                    violate(ViolationKind::Malformed, "transfer references unknown qubit", ii, {q});
                    continue;
                }
                if (!seen.insert(q).second) {
                    violate(ViolationKind::Malformed, "qubit listed twice in one transfer", ii, {q});
                    continue;
                }
                if (t->pickup) {
                    if (in_aod[q] != -1) {
                        violate(ViolationKind::MisalignedTransfer, "pickup of a qubit already in an AOD",
                                ii, {q});
                        continue;
                    }
                } else if (in_aod[q] != t->aod) {
                    violate(ViolationKind::MisalignedTransfer, "dropoff of a qubit not held by this AOD",
                            ii, {q});
                    continue;
                }
                if (!on_grid(pos[q])) {
                    violate(ViolationKind::MisalignedTransfer, "transfer away from an aligned trap", ii,
                            {q});
                    continue;
                }
                in_aod[q] = t->pickup ? t->aod : -1;
                held_count[t->aod] += t->pickup ? 1 : -1;
            }
        } else if (const auto* m = std::get_if<MoveInst>(&inst)) {
            if (m->motions.empty()) continue;  // column-alignment shift
            std::set<int> listed;
            int listed_held = 0;
            for (const Motion& mo : m->motions) {
                const int q = mo.qubit;
                if (q < 0 || q >= n) {
                    violate(ViolationKind::Malformed, "motion references unknown qubit", ii, {q});
                    continue;
                }
                if (!listed.insert(q).second) {
                    violate(ViolationKind::Malformed, "qubit listed twice in one motion", ii, {q});
                    continue;
                }
                if (in_aod[q] != m->aod) {
                    violate(ViolationKind::Malformed, "motion of a qubit not held by this AOD", ii, {q});
                    continue;
                }
                ++listed_held;
                if (!near(pos[q].x, mo.src_um.x) || !near(pos[q].y, mo.src_um.y)) {
                    violate(ViolationKind::Malformed, "motion source disagrees with the qubit position",
                            ii, {q});
                }
            }
            if (listed_held != held_count[m->aod]) {
                for (int q = 0; q < n; ++q) {
                    if (in_aod[q] == m->aod && !listed.count(q)) {
                        violate(ViolationKind::Malformed, "motion omits a qubit held by this AOD", ii,
                                {q});
                    }
                }
            }
            // row/column order preservation within this AOD motion
            for (std::size_t a = 0; a < m->motions.size(); ++a) {
                for (std::size_t b = a + 1; b < m->motions.size(); ++b) {
                    const Motion& ma = m->motions[a];
                    const Motion& mb = m->motions[b];
                    const bool x_ok = sign_of(ma.src_um.x - mb.src_um.x) == sign_of(ma.dst_um.x - mb.dst_um.x);
                    const bool y_ok = sign_of(ma.src_um.y - mb.src_um.y) == sign_of(ma.dst_um.y - mb.dst_um.y);
                    if (!x_ok || !y_ok) {
                        violate(ViolationKind::AodOrderInversion,
                                "row/column order changes within one motion", ii, {ma.qubit, mb.qubit});
                    }
                }
            }
            for (const Motion& mo : m->motions) {
                if (mo.qubit >= 0 && mo.qubit < n && in_aod[mo.qubit] == m->aod) pos[mo.qubit] = mo.dst_um;
            }
        } else {
            const auto& r = std::get<RydbergInst>(inst);
            if (r.stage != rydberg_seen) {
                violate(ViolationKind::Malformed, "rydberg stage indices out of order", ii);
            }
            ++rydberg_seen;

            // pairs within the Rydberg range, via cell hashing (range < pitch/2)
            const double cell = std::max(program.rydberg_range_um, 1e-3);
            std::map<std::pair<long long, long long>, std::vector<int>> cells;
            for (int q = 0; q < n; ++q) {
                cells[{static_cast<long long>(std::floor(pos[q].x / cell)),
                       static_cast<long long>(std::floor(pos[q].y / cell))}]
                    .push_back(q);
            }
            std::vector<std::pair<int, int>> close_pairs;
            for (const auto& [key, members] : cells) {
                for (int dx = 0; dx <= 1; ++dx) {
                    for (int dy = (dx == 0 ? 0 : -1); dy <= 1; ++dy) {
                        const auto it = cells.find({key.first + dx, key.second + dy});
                        if (it == cells.end()) continue;
                        for (const int qa : members) {
                            for (const int qb : it->second) {
                                if ((dx == 0 && dy == 0 && qb <= qa)) continue;
                                if (distance_um(pos[qa], pos[qb]) < program.rydberg_range_um) {
                                    close_pairs.emplace_back(std::min(qa, qb), std::max(qa, qb));
                                }
                            }
                        }
                    }
                }
            }
            std::sort(close_pairs.begin(), close_pairs.end());
            close_pairs.erase(std::unique(close_pairs.begin(), close_pairs.end()), close_pairs.end());

            result.pairs_per_stage.push_back(static_cast<int>(close_pairs.size()));
            result.executed_pairs.push_back(close_pairs);

            // more than two qubits at one exact position
            std::map<std::pair<long long, long long>, int> occupancy;
            for (int q = 0; q < n; ++q) {
                const auto key = std::make_pair(static_cast<long long>(std::llround(pos[q].x * 1e6)),
                                                static_cast<long long>(std::llround(pos[q].y * 1e6)));
                if (++occupancy[key] == 3) {
                    violate(ViolationKind::SiteOvercrowded, "more than two qubits at one site", ii);
                }
            }
        }
    }
    return result;
}

}  // namespace detail

/// Independently verifies a program against the hardware rules and its own
/// claimed schedule: AOD order preservation, interaction bookkeeping at every
/// Rydberg exposure, transfer alignment, and schedule consistency with the
/// circuit. Returns the empty list iff the program is sound.
inline std::vector<Violation> verify(const InstructionProgram& program, const SlicedCircuit& circuit,
                                     const ArchConfig& arch) {
    std::vector<Violation> violations;
    auto violate = [&](ViolationKind kind, std::string msg, int inst = -1, std::vector<int> qs = {}) {
        violations.push_back({kind, std::move(msg), inst, std::move(qs)});
    };

    if (program.n_qubits != circuit.n_qubits) {
        violate(ViolationKind::Malformed, "program and circuit disagree on the qubit count");
        return violations;
    }
    if (std::abs(program.pitch_um - arch.site_pitch_um) > detail::kPosTolUm ||
        std::abs(program.rydberg_range_um - arch.rydberg_range_um) > detail::kPosTolUm) {
        violate(ViolationKind::Malformed, "program geometry disagrees with the architecture");
    }

    // The claimed schedule must be a legal schedule of the circuit: same gate
    // multiset, a matching per stage, dependency order respected, and slices
    // in order.
    std::map<std::pair<int, int>, std::vector<int>> claimed_stages;
    for (std::size_t s = 0; s < program.stages.size(); ++s) {
        std::set<int> touched;
        for (const Gate& g : program.stages[s]) {
            claimed_stages[g.normalized()].push_back(static_cast<int>(s));
            if (!touched.insert(g.q0).second || !touched.insert(g.q1).second) {
                violate(ViolationKind::Malformed,
                        "claimed stage " + std::to_string(s) + " is not a matching");
            }
        }
    }
    for (auto& [pair, stages] : claimed_stages) std::sort(stages.begin(), stages.end());

    // canonical assignment: occurrences of one pair take claimed stages in order
    std::map<std::pair<int, int>, std::size_t> cursor;
    bool schedule_consistent = true;
    std::vector<std::vector<int>> assigned_stage(circuit.slices.size());
    int total_claimed = 0;
    for (const auto& [pair, stages] : claimed_stages) total_claimed += static_cast<int>(stages.size());
    if (total_claimed != circuit.total_gates()) {
        violate(ViolationKind::Malformed, "claimed schedule and circuit disagree on the gate count");
        schedule_consistent = false;
    }
    if (schedule_consistent) {
        for (std::size_t si = 0; si < circuit.slices.size() && schedule_consistent; ++si) {
            for (const Gate& g : circuit.slices[si].gates) {
                const auto it = claimed_stages.find(g.normalized());
                std::size_t& c = cursor[g.normalized()];
                if (it == claimed_stages.end() || c >= it->second.size()) {
                    violate(ViolationKind::Malformed, "circuit gate missing from the claimed schedule");
                    schedule_consistent = false;
                    break;
                }
                assigned_stage[si].push_back(it->second[c++]);
            }
        }
    }
    if (schedule_consistent) {
        int prev_slice_max = -1;
        for (std::size_t si = 0; si < circuit.slices.size(); ++si) {
            const Slice& slice = circuit.slices[si];
            if (slice.gates.empty()) continue;
            const auto [mn, mx] = std::minmax_element(assigned_stage[si].begin(), assigned_stage[si].end());
            if (*mn <= prev_slice_max) {
                violate(ViolationKind::Malformed, "claimed schedule interleaves slices");
            }
            prev_slice_max = *mx;
            if (slice.type == SliceType::Dependency) {
                std::vector<int> last(circuit.n_qubits, -1);
                for (std::size_t gi = 0; gi < slice.gates.size(); ++gi) {
                    const Gate& g = slice.gates[gi];
                    const int s = assigned_stage[si][gi];
                    if (s <= last[g.q0] || s <= last[g.q1]) {
                        violate(ViolationKind::Malformed, "claimed schedule breaks a dependency");
                    }
                    last[g.q0] = std::max(last[g.q0], s);
                    last[g.q1] = std::max(last[g.q1], s);
                }
            }
        }
    }

    detail::ReplayResult replay = detail::replay_program(program);
    for (Violation& v : replay.violations) violations.push_back(std::move(v));

    if (static_cast<int>(replay.executed_pairs.size()) != program.n_stages()) {
        violate(ViolationKind::Malformed, "program executes a different number of stages than claimed");
        return violations;
    }

    for (std::size_t s = 0; s < replay.executed_pairs.size(); ++s) {
        std::set<std::pair<int, int>> claimed_here;
        for (const Gate& g : program.stages[s]) claimed_here.insert(g.normalized());
        for (const auto& pair : replay.executed_pairs[s]) {
            if (claimed_here.count(pair)) continue;
            const auto it = claimed_stages.find(pair);
            if (it != claimed_stages.end()) {
                violate(ViolationKind::WrongStage,
                        "gate executed at stage " + std::to_string(s) + " but scheduled elsewhere", -1,
                        {pair.first, pair.second});
            } else {
                violate(ViolationKind::UnscheduledInteraction,
                        "qubits within Rydberg range without a scheduled gate at stage " +
                            std::to_string(s),
                        -1, {pair.first, pair.second});
            }
        }
        std::set<std::pair<int, int>> executed(replay.executed_pairs[s].begin(),
                                               replay.executed_pairs[s].end());
        for (const auto& pair : claimed_here) {
            if (!executed.count(pair)) {
                violate(ViolationKind::GateNotColocated,
                        "scheduled gate is not co-located at stage " + std::to_string(s), -1,
                        {pair.first, pair.second});
            }
        }
    }
    return violations;
}

/// Multiplicative fidelity estimate, recomputed from the program alone:
/// gate counts from position replay, transfer counts from the instruction
/// list, idle times from the timeline.
struct FidelityReport {
    double two_qubit_term = 1.0;
    double transfer_term = 1.0;
    double decoherence_term = 1.0;
    double total = 1.0;
    int g2 = 0;
    int n_stages = 0;
    int n_transfers = 0;
    int n_qubits = 0;
    std::vector<double> t_q_us;
    bool hard_failure = false;  // some idle time reached the coherence time

    nlohmann::json to_json() const {
        return nlohmann::json{{"two_qubit_term", two_qubit_term},
                              {"transfer_term", transfer_term},
                              {"decoherence_term", decoherence_term},
                              {"total", total},
                              {"g2", g2},
                              {"n_stages", n_stages},
                              {"n_transfers", n_transfers},
                              {"n_qubits", n_qubits},
                              {"t_q_us", t_q_us},
                              {"hard_failure", hard_failure}};
    }
};

inline FidelityReport fidelity(const InstructionProgram& program, const ArchConfig& arch) {
    FidelityReport report;
    report.n_qubits = program.n_qubits;

    detail::ReplayResult replay = detail::replay_program(program);
    for (const int pairs : replay.pairs_per_stage) report.g2 += pairs;
    report.n_stages = static_cast<int>(replay.pairs_per_stage.size());

    double total_us = 0.0;
    std::vector<double> busy(program.n_qubits, 0.0);
    for (const Instruction& inst : program.instructions) {
        total_us = std::max(total_us, instruction_end_us(inst));
        if (const auto* t = std::get_if<TransferInst>(&inst)) {
            report.n_transfers += static_cast<int>(t->qubits.size());
            for (const int q : t->qubits) {
                if (q >= 0 && q < program.n_qubits) busy[q] += t->duration_us;
            }
        } else if (const auto* r = std::get_if<RydbergInst>(&inst)) {
            for (double& b : busy) b += r->duration_us;
        }
    }
    report.t_q_us.resize(program.n_qubits);
    for (int q = 0; q < program.n_qubits; ++q) report.t_q_us[q] = total_us - busy[q];

    const double bystander_exponent =
        static_cast<double>(program.n_qubits) * report.n_stages - 2.0 * report.g2;
    report.two_qubit_term = std::pow(arch.f_two_qubit, report.g2) *
                            std::pow(arch.f_excitement, bystander_exponent);
    report.transfer_term = std::pow(arch.f_transfer, report.n_transfers);
    report.decoherence_term = 1.0;
    for (const double tq : report.t_q_us) {
        const double factor = 1.0 - tq / arch.t2_coherence_us;
        if (factor <= 0.0) report.hard_failure = true;
        report.decoherence_term *= factor;
    }
    report.total = report.two_qubit_term * report.transfer_term * report.decoherence_term;
    return report;
}

/// One plot-friendly row of natural-log fidelity terms.
inline void write_breakdown_csv(std::ostream& out, const FidelityReport& report) {
    out << "n_qubits,two_qubit,transfer,decoherence,total\n";
    out << report.n_qubits << ',' << std::log(report.two_qubit_term) << ','
        << std::log(report.transfer_term) << ',' << std::log(report.decoherence_term) << ','
        << std::log(report.total) << '\n';
}

}  // namespace dpqa
