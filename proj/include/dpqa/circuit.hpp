#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace dpqa {

/// A two-qubit gate acting on qubits q0 and q1 (order irrelevant).
struct Gate {
    int q0 = 0;
    int q1 = 0;

    friend bool operator==(const Gate&, const Gate&) = default;

    std::pair<int, int> normalized() const {
        return q0 < q1 ? std::pair{q0, q1} : std::pair{q1, q0};
    }
};

enum class SliceType {
    /// Gates that may execute in any order; modeled as an interaction graph.
    Commute,
    /// Gates whose listed order induces dependencies on shared qubits.
    Dependency,
};

struct Slice {
    SliceType type = SliceType::Commute;
    std::vector<Gate> gates;
};

/// A circuit pre-sliced into commutation groups and dependency subcircuits.
struct SlicedCircuit {
    int n_qubits = 0;
    std::vector<Slice> slices;
    std::string name;
    std::optional<std::uint64_t> seed;

    int total_gates() const {
        int n = 0;
        for (const auto& s : slices) n += static_cast<int>(s.gates.size());
        return n;
    }

    void validate() const {
        if (n_qubits < 0) throw std::invalid_argument("circuit: n_qubits must be >= 0");
        for (std::size_t si = 0; si < slices.size(); ++si) {
            const auto& slice = slices[si];
            std::set<std::pair<int, int>> seen;
            for (std::size_t gi = 0; gi < slice.gates.size(); ++gi) {
                const Gate& g = slice.gates[gi];
                if (g.q0 == g.q1) {
                    throw std::invalid_argument("circuit: slice " + std::to_string(si) + " gate " +
                                                std::to_string(gi) + " acts twice on qubit " +
                                                std::to_string(g.q0));
                }
                if (g.q0 < 0 || g.q1 < 0 || g.q0 >= n_qubits || g.q1 >= n_qubits) {
                    throw std::invalid_argument("circuit: slice " + std::to_string(si) + " gate " +
                                                std::to_string(gi) + " references a qubit out of range");
                }
                if (slice.type == SliceType::Commute && !seen.insert(g.normalized()).second) {
                    throw std::invalid_argument(
                        "circuit: slice " + std::to_string(si) + " repeats gate (" +
                        std::to_string(g.q0) + "," + std::to_string(g.q1) +
                        ") inside one commutation group; split it into consecutive slices");
                }
            }
        }
    }

    static SlicedCircuit from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw std::invalid_argument("circuit: expected a JSON object");
        SlicedCircuit c;
        if (!j.contains("n_qubits")) throw std::invalid_argument("circuit: missing n_qubits");
        c.n_qubits = j.at("n_qubits").get<int>();
        c.name = j.value("name", std::string{});
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        const auto& slices = j.at("slices");
        if (!slices.is_array()) throw std::invalid_argument("circuit: slices must be an array");
        for (std::size_t si = 0; si < slices.size(); ++si) {
            const auto& js = slices[si];
            Slice slice;
            const std::string type = js.value("type", std::string{});
            if (type == "commute") slice.type = SliceType::Commute;
            else if (type == "dependency") slice.type = SliceType::Dependency;
            else {
                throw std::invalid_argument("circuit: slice " + std::to_string(si) +
                                            " has unknown type \"" + type + "\"");
            }
            for (const auto& jg : js.at("gates")) {
                if (!jg.is_array() || jg.size() != 2) {
                    throw std::invalid_argument("circuit: slice " + std::to_string(si) +
                                                " contains a gate that is not a [q0, q1] pair");
                }
                slice.gates.push_back(Gate{jg[0].get<int>(), jg[1].get<int>()});
            }
            c.slices.push_back(std::move(slice));
        }
        c.validate();
        return c;
    }

    nlohmann::json to_json() const {
        nlohmann::json js = nlohmann::json::array();
        for (const auto& slice : slices) {
            nlohmann::json gates = nlohmann::json::array();
            for (const auto& g : slice.gates) gates.push_back({g.q0, g.q1});
            js.push_back({{"type", slice.type == SliceType::Commute ? "commute" : "dependency"},
                          {"gates", std::move(gates)}});
        }
        nlohmann::json j{{"n_qubits", n_qubits}, {"slices", std::move(js)}};
        if (!name.empty()) j["name"] = name;
        if (seed) j["seed"] = *seed;
        return j;
    }

    static SlicedCircuit load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open circuit file: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write circuit file: " + path);
        out << to_json().dump(2) << '\n';
    }
};

}  // namespace dpqa
