#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

namespace dpqa {

/// Architecture parameters: grid extents, site geometry, and the fidelity and
/// timing constants of the error model. Defaults follow published hardware
/// numbers. All durations are in microseconds, lengths in micrometers.
struct ArchConfig {
    // Grid extents in sites. 0 means "derive from the circuit size": the
    // placer then bounds the region by floor(sqrt(n)) + 4.
    int cols_max = 0;
    int rows_max = 0;

    double site_pitch_um = 15.0;
    double rydberg_range_um = 6.0;

    double f_two_qubit = 0.995;
    double f_excitement = 0.9975;
    double f_transfer = 0.999;
    // Single-qubit constants are carried for report completeness only; the
    // compiler itself never consumes them.
    double f_one_qubit = 0.9997;

    double t_rydberg_us = 0.36;
    double t_transfer_us = 15.0;
    double t_raman_us = 0.625;
    double t2_coherence_us = 1.5e6;

    double accel_m_per_s2 = 2750.0;
    int n_aods = 1;

    void validate() const {
        auto fail = [](const std::string& msg) { throw std::invalid_argument("ArchConfig: " + msg); };
        if (site_pitch_um < 2.5 * rydberg_range_um) {
            fail("site_pitch_um must be at least 2.5 * rydberg_range_um");
        }
        auto check_fidelity = [&](double f, const char* name) {
            if (!(f > 0.0 && f <= 1.0)) fail(std::string(name) + " must be in (0, 1]");
        };
        check_fidelity(f_two_qubit, "f_two_qubit");
        check_fidelity(f_excitement, "f_excitement");
        check_fidelity(f_transfer, "f_transfer");
        check_fidelity(f_one_qubit, "f_one_qubit");
        auto check_duration = [&](double t, const char* name) {
            if (!(t > 0.0)) fail(std::string(name) + " must be positive");
        };
        check_duration(site_pitch_um, "site_pitch_um");
        check_duration(rydberg_range_um, "rydberg_range_um");
        check_duration(t_rydberg_us, "t_rydberg_us");
        check_duration(t_transfer_us, "t_transfer_us");
        check_duration(t_raman_us, "t_raman_us");
        check_duration(t2_coherence_us, "t2_coherence_us");
        check_duration(accel_m_per_s2, "accel_m_per_s2");
        if (n_aods < 1) fail("n_aods must be >= 1");
        if (cols_max < 0 || rows_max < 0) fail("cols_max/rows_max must be >= 0");
    }

    static ArchConfig from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw std::invalid_argument("ArchConfig: expected a JSON object");
        ArchConfig cfg;
        for (const auto& [key, value] : j.items()) {
            if (key == "cols_max") cfg.cols_max = value.get<int>();
            else if (key == "rows_max") cfg.rows_max = value.get<int>();
            else if (key == "site_pitch_um") cfg.site_pitch_um = value.get<double>();
            else if (key == "rydberg_range_um") cfg.rydberg_range_um = value.get<double>();
            else if (key == "f_two_qubit") cfg.f_two_qubit = value.get<double>();
            else if (key == "f_excitement") cfg.f_excitement = value.get<double>();
            else if (key == "f_transfer") cfg.f_transfer = value.get<double>();
            else if (key == "f_one_qubit") cfg.f_one_qubit = value.get<double>();
            else if (key == "t_rydberg_us") cfg.t_rydberg_us = value.get<double>();
            else if (key == "t_transfer_us") cfg.t_transfer_us = value.get<double>();
            else if (key == "t_raman_us") cfg.t_raman_us = value.get<double>();
            else if (key == "t2_coherence_us") cfg.t2_coherence_us = value.get<double>();
            else if (key == "accel_m_per_s2") cfg.accel_m_per_s2 = value.get<double>();
            else if (key == "n_aods") cfg.n_aods = value.get<int>();
            else throw std::invalid_argument("ArchConfig: unknown field \"" + key + "\"");
        }
        cfg.validate();
        return cfg;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"cols_max", cols_max},
            {"rows_max", rows_max},
            {"site_pitch_um", site_pitch_um},
            {"rydberg_range_um", rydberg_range_um},
            {"f_two_qubit", f_two_qubit},
            {"f_excitement", f_excitement},
            {"f_transfer", f_transfer},
            {"f_one_qubit", f_one_qubit},
            {"t_rydberg_us", t_rydberg_us},
            {"t_transfer_us", t_transfer_us},
            {"t_raman_us", t_raman_us},
            {"t2_coherence_us", t2_coherence_us},
            {"accel_m_per_s2", accel_m_per_s2},
            {"n_aods", n_aods},
        };
    }

    static ArchConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open architecture file: " + path);
        nlohmann::json j;
        in >> j;
        return from_json(j);
    }
};

}  // namespace dpqa
