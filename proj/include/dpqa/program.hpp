#pragma once

#include <algorithm>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpqa/circuit.hpp"
#include "dpqa/geometry.hpp"

namespace dpqa {

/// Simultaneous pickup or dropoff of a group of atoms between the static
/// traps and one AOD. Counts one transfer per listed qubit.
struct TransferInst {
    bool pickup = true;
    int aod = 0;
    std::vector<int> qubits;
    double t_start_us = 0.0;
    double duration_us = 0.0;
};

struct Motion {
    int qubit = 0;
    Vec2 src_um;
    Vec2 dst_um;
};

/// One parallel AOD motion. An empty motion list is a column-alignment shift
/// between row pickups. Duration covers the longest displacement.
struct MoveInst {
    int aod = 0;
    std::vector<Motion> motions;
    double t_start_us = 0.0;
    double duration_us = 0.0;
};

/// One global laser exposure; every co-sited pair undergoes a gate.
struct RydbergInst {
    int stage = 0;
    double t_start_us = 0.0;
    double duration_us = 0.0;
};

using Instruction = std::variant<TransferInst, MoveInst, RydbergInst>;

inline double instruction_end_us(const Instruction& inst) {
    return std::visit([](const auto& i) { return i.t_start_us + i.duration_us; }, inst);
}

/// The low-level program: timed instructions, the claimed gate schedule, and
/// the per-qubit busy/idle ledger. This is the conformance format the
/// verifier and external animators consume.
struct InstructionProgram {
    int n_qubits = 0;
    double pitch_um = 0.0;
    double rydberg_range_um = 0.0;
    std::vector<Site> initial_sites;
    std::vector<std::vector<Gate>> stages;  // intended gates per Rydberg stage
    std::vector<Instruction> instructions;

    int n_transfers = 0;
    double total_us = 0.0;
    std::vector<double> busy_us;
    std::vector<double> idle_us;

    int n_stages() const { return static_cast<int>(stages.size()); }

    /// Recomputes totals and the ledger from the instruction list. A qubit is
    /// busy during its own transfers and during every Rydberg exposure; it
    /// idles through all AOD motions and through other qubits' transfers.
    void finalize() {
        n_transfers = 0;
        total_us = 0.0;
        busy_us.assign(n_qubits, 0.0);
        idle_us.assign(n_qubits, 0.0);
        for (const Instruction& inst : instructions) {
            total_us = std::max(total_us, instruction_end_us(inst));
            if (const auto* t = std::get_if<TransferInst>(&inst)) {
                n_transfers += static_cast<int>(t->qubits.size());
                for (const int q : t->qubits) busy_us.at(q) += t->duration_us;
            } else if (const auto* r = std::get_if<RydbergInst>(&inst)) {
                for (double& b : busy_us) b += r->duration_us;
            }
        }
        for (int q = 0; q < n_qubits; ++q) idle_us[q] = total_us - busy_us[q];
    }

    nlohmann::json to_json() const {
        nlohmann::json jinsts = nlohmann::json::array();
        for (const Instruction& inst : instructions) {
            if (const auto* t = std::get_if<TransferInst>(&inst)) {
                jinsts.push_back({{"type", "transfer"},
                                  {"direction", t->pickup ? "pickup" : "dropoff"},
                                  {"aod", t->aod},
                                  {"qubits", t->qubits},
                                  {"t_start_us", t->t_start_us},
                                  {"duration_us", t->duration_us}});
            } else if (const auto* m = std::get_if<MoveInst>(&inst)) {
                nlohmann::json jmotions = nlohmann::json::array();
                for (const Motion& mo : m->motions) {
                    jmotions.push_back({{"qubit", mo.qubit},
                                        {"src_um", {mo.src_um.x, mo.src_um.y}},
                                        {"dst_um", {mo.dst_um.x, mo.dst_um.y}}});
                }
                jinsts.push_back({{"type", "move"},
                                  {"aod", m->aod},
                                  {"motions", std::move(jmotions)},
                                  {"t_start_us", m->t_start_us},
                                  {"duration_us", m->duration_us}});
            } else {
                const auto& r = std::get<RydbergInst>(inst);
                jinsts.push_back({{"type", "rydberg"},
                                  {"stage", r.stage},
                                  {"t_start_us", r.t_start_us},
                                  {"duration_us", r.duration_us}});
            }
        }
        nlohmann::json jsites = nlohmann::json::array();
        for (const Site& s : initial_sites) jsites.push_back({s.x, s.y});
        nlohmann::json jstages = nlohmann::json::array();
        for (const auto& stage : stages) {
            nlohmann::json jgates = nlohmann::json::array();
            for (const Gate& g : stage) jgates.push_back({g.q0, g.q1});
            jstages.push_back(std::move(jgates));
        }
        return nlohmann::json{{"n_qubits", n_qubits},
                              {"pitch_um", pitch_um},
                              {"rydberg_range_um", rydberg_range_um},
                              {"initial_sites", std::move(jsites)},
                              {"stages", std::move(jstages)},
                              {"instructions", std::move(jinsts)},
                              {"n_transfers", n_transfers},
                              {"n_stages", n_stages()},
                              {"total_us", total_us},
                              {"ledger", {{"busy_us", busy_us}, {"idle_us", idle_us}}}};
    }

    static InstructionProgram from_json(const nlohmann::json& j) {
        InstructionProgram p;
        p.n_qubits = j.at("n_qubits").get<int>();
        p.pitch_um = j.at("pitch_um").get<double>();
        p.rydberg_range_um = j.at("rydberg_range_um").get<double>();
        for (const auto& js : j.at("initial_sites")) {
            p.initial_sites.push_back(Site{js.at(0).get<int>(), js.at(1).get<int>()});
        }
        for (const auto& jstage : j.at("stages")) {
            auto& stage = p.stages.emplace_back();
            for (const auto& jg : jstage) stage.push_back(Gate{jg.at(0).get<int>(), jg.at(1).get<int>()});
        }
        for (const auto& ji : j.at("instructions")) {
            const std::string type = ji.at("type").get<std::string>();
            if (type == "transfer") {
                TransferInst t;
                t.pickup = ji.at("direction").get<std::string>() == "pickup";
                t.aod = ji.at("aod").get<int>();
                t.qubits = ji.at("qubits").get<std::vector<int>>();
                t.t_start_us = ji.at("t_start_us").get<double>();
                t.duration_us = ji.at("duration_us").get<double>();
                p.instructions.emplace_back(std::move(t));
            } else if (type == "move") {
                MoveInst m;
                m.aod = ji.at("aod").get<int>();
                for (const auto& jm : ji.at("motions")) {
                    Motion mo;
                    mo.qubit = jm.at("qubit").get<int>();
                    mo.src_um = {jm.at("src_um").at(0).get<double>(), jm.at("src_um").at(1).get<double>()};
                    mo.dst_um = {jm.at("dst_um").at(0).get<double>(), jm.at("dst_um").at(1).get<double>()};
                    m.motions.push_back(mo);
                }
                m.t_start_us = ji.at("t_start_us").get<double>();
                m.duration_us = ji.at("duration_us").get<double>();
                p.instructions.emplace_back(std::move(m));
            } else if (type == "rydberg") {
                RydbergInst r;
                r.stage = ji.at("stage").get<int>();
                r.t_start_us = ji.at("t_start_us").get<double>();
                r.duration_us = ji.at("duration_us").get<double>();
                p.instructions.emplace_back(r);
            } else {
                throw std::invalid_argument("program: unknown instruction type \"" + type + "\"");
            }
        }
        p.finalize();
        return p;
    }

    static InstructionProgram load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open program file: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write program file: " + path);
        out << to_json().dump(2) << '\n';
    }
};

}  // namespace dpqa
