#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpqa/arch.hpp"
#include "dpqa/checker.hpp"
#include "dpqa/circuit.hpp"
#include "dpqa/codegen.hpp"
#include "dpqa/placer.hpp"
#include "dpqa/program.hpp"
#include "dpqa/router.hpp"
#include "dpqa/scheduler.hpp"

namespace dpqa {

enum class PlacementMode { Trivial, Static, Dynamic };
enum class RoutingMode { SortIS, WindowIS, ExactMIS };

inline const char* to_string(PlacementMode m) {
    switch (m) {
        case PlacementMode::Trivial: return "trivial";
        case PlacementMode::Static: return "static";
        case PlacementMode::Dynamic: return "dynamic";
    }
    return "unknown";
}

inline const char* to_string(RoutingMode m) {
    switch (m) {
        case RoutingMode::SortIS: return "sortis";
        case RoutingMode::WindowIS: return "windowis";
        case RoutingMode::ExactMIS: return "mis";
    }
    return "unknown";
}

struct CompileOptions {
    PlacementMode placement = PlacementMode::Dynamic;
    RoutingMode routing = RoutingMode::WindowIS;
    int window_size = 1000;
    int n_aods = 0;  // 0: take the architecture's count
    std::uint64_t seed = 0;
    PlacerParams placer;
    CodegenOptions codegen;
    bool exact_chromatic_audit = false;
    int mis_guard = 64;
};

struct PhaseTimings {
    double schedule_ms = 0.0;
    double placement_ms = 0.0;
    double routing_ms = 0.0;
    double codegen_ms = 0.0;
    double verify_ms = 0.0;
    double total_ms = 0.0;

    nlohmann::json to_json() const {
        return nlohmann::json{{"schedule_ms", schedule_ms}, {"placement_ms", placement_ms},
                              {"routing_ms", routing_ms},   {"codegen_ms", codegen_ms},
                              {"verify_ms", verify_ms},     {"total_ms", total_ms}};
    }
};

struct CompileResult {
    Schedule schedule;
    Placement placement;
    std::vector<StageTransitionPlan> plans;
    InstructionProgram program;
    FidelityReport report;
    std::vector<Violation> violations;
    PhaseTimings timings;
};

namespace detail {

class PhaseStopwatch {
  public:
    explicit PhaseStopwatch(double& sink) : sink_(sink), start_(std::chrono::steady_clock::now()) {}
    ~PhaseStopwatch() {
        const auto end = std::chrono::steady_clock::now();
        sink_ += std::chrono::duration<double, std::milli>(end - start_).count();
    }

  private:
    double& sink_;
    std::chrono::steady_clock::time_point start_;
};

inline RoutingPlan route(const RoutingInput& input, const ArchConfig& arch, const CompileOptions& opts) {
    switch (opts.routing) {
        case RoutingMode::SortIS: return route_sort_is(input, arch.site_pitch_um);
        case RoutingMode::WindowIS: return route_window_is(input, arch.site_pitch_um, opts.window_size);
        case RoutingMode::ExactMIS: return route_exact_mis(input, arch.site_pitch_um, opts.mis_guard);
    }
    throw std::logic_error("route: unknown routing mode");
}

}  // namespace detail

/// Runs scheduling, placement, routing, and lowering, then verifies and
/// scores the program. Deterministic for fixed inputs and seed.
inline CompileResult compile_circuit(const SlicedCircuit& circuit, const ArchConfig& arch,
                                     const CompileOptions& opts = {}) {
    circuit.validate();
    arch.validate();
    const auto t0 = std::chrono::steady_clock::now();

    CompileResult result;
    {
        detail::PhaseStopwatch sw(result.timings.schedule_ms);
        ScheduleOptions sopts;
        sopts.exact_chromatic_audit = opts.exact_chromatic_audit;
        result.schedule = schedule_circuit(circuit, sopts);
    }
    const Schedule& schedule = result.schedule;
    const int n_aods = opts.n_aods > 0 ? opts.n_aods : arch.n_aods;

    result.plans.assign(schedule.n_stages, {});

    if (opts.placement == PlacementMode::Dynamic) {
        DynamicPlacer placer = [&] {
            detail::PhaseStopwatch sw(result.timings.placement_ms);
            return DynamicPlacer(circuit, schedule, arch, opts.placer, opts.seed);
        }();
        for (int s = 0; s < schedule.n_stages; ++s) {
            const std::vector<Site>& sites = placer.stage_sites(s);
            RoutingInput gather = make_gate_move_pairs(schedule.gates_by_stage[s], sites);
            RoutingPlan gather_plan;
            {
                detail::PhaseStopwatch sw(result.timings.routing_ms);
                gather_plan = detail::route(gather, arch, opts);
            }
            result.plans[s].gather_sets = gather_plan.materialize(gather);

            std::vector<int> movers;
            for (const int mi : gather_plan.executed_for_gate) {
                if (mi < 0) throw std::logic_error("router left a gate without an executed move");
                movers.push_back(gather.moves[mi].qubit);
            }

            std::vector<Move> scatter_moves;
            if (s + 1 < schedule.n_stages) {
                bool advanced = true;
                {
                    detail::PhaseStopwatch sw(result.timings.placement_ms);
                    try {
                        placer.advance(s, movers);
                    } catch (const std::invalid_argument&) {
                        placer.record_fallback(s);
                        advanced = false;
                    }
                }
                const std::vector<Site>& next_sites =
                    advanced ? placer.stage_sites(s + 1) : placer.stage_sites(s);
                for (std::size_t gi = 0; gi < movers.size(); ++gi) {
                    const Move& executed = gather.moves[gather_plan.executed_for_gate[gi]];
                    scatter_moves.push_back({executed.qubit, executed.dst, next_sites[executed.qubit]});
                }
            } else {
                for (const int mi : gather_plan.executed_for_gate) {
                    const Move& executed = gather.moves[mi];
                    scatter_moves.push_back({executed.qubit, executed.dst, executed.src});
                }
            }
            RoutingInput scatter = make_plain_moves(scatter_moves);
            RoutingPlan scatter_plan;
            {
                detail::PhaseStopwatch sw(result.timings.routing_ms);
                scatter_plan = detail::route(scatter, arch, opts);
            }
            result.plans[s].scatter_sets = scatter_plan.materialize(scatter);
        }
        result.placement = std::move(placer).take();
    } else {
        {
            detail::PhaseStopwatch sw(result.timings.placement_ms);
            result.placement = opts.placement == PlacementMode::Trivial
                                   ? place_trivial(circuit, schedule)
                                   : place_static(circuit, schedule, arch, opts.placer, opts.seed);
        }
        for (int s = 0; s < schedule.n_stages; ++s) {
            const std::vector<Site>& sites = result.placement.per_stage[s];
            RoutingInput gather = make_gate_move_pairs(schedule.gates_by_stage[s], sites);
            RoutingPlan gather_plan;
            {
                detail::PhaseStopwatch sw(result.timings.routing_ms);
                gather_plan = detail::route(gather, arch, opts);
            }
            result.plans[s].gather_sets = gather_plan.materialize(gather);

            std::vector<Move> reverse_moves;
            for (const int mi : gather_plan.executed_for_gate) {
                if (mi < 0) throw std::logic_error("router left a gate without an executed move");
                const Move& executed = gather.moves[mi];
                reverse_moves.push_back({executed.qubit, executed.dst, executed.src});
            }
            RoutingInput scatter = make_plain_moves(reverse_moves);
            RoutingPlan scatter_plan;
            {
                detail::PhaseStopwatch sw(result.timings.routing_ms);
                scatter_plan = detail::route(scatter, arch, opts);
            }
            result.plans[s].scatter_sets = scatter_plan.materialize(scatter);
        }
    }

    {
        detail::PhaseStopwatch sw(result.timings.codegen_ms);
        result.program =
            lower_program(circuit, schedule, result.placement, result.plans, arch, n_aods, opts.codegen);
    }
    {
        detail::PhaseStopwatch sw(result.timings.verify_ms);
        result.violations = verify(result.program, circuit, arch);
        result.report = fidelity(result.program, arch);
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.timings.total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    return result;
}

/// report.json payload: fidelity plus schedule, placement, routing, and
/// timing diagnostics.
inline nlohmann::json compile_report_json(const SlicedCircuit& circuit, const CompileResult& result,
                                          const CompileOptions& opts) {
    nlohmann::json slices = nlohmann::json::array();
    for (const SliceDiagnostics& d : result.schedule.diagnostics) {
        nlohmann::json js{{"slice", d.slice_index},
                          {"type", d.type == SliceType::Commute ? "commute" : "dependency"},
                          {"n_gates", d.n_gates},
                          {"n_stages", d.n_stages}};
        if (d.type == SliceType::Commute) js["max_degree"] = d.max_degree;
        if (d.exact_chromatic_index) js["exact_chromatic_index"] = *d.exact_chromatic_index;
        slices.push_back(std::move(js));
    }
    nlohmann::json sets = nlohmann::json::array();
    for (const StageTransitionPlan& plan : result.plans) {
        sets.push_back({{"gather_sets", plan.gather_sets.size()}, {"scatter_sets", plan.scatter_sets.size()}});
    }
    nlohmann::json violations = nlohmann::json::array();
    for (const Violation& v : result.violations) {
        violations.push_back({{"kind", to_string(v.kind)},
                              {"message", v.message},
                              {"instruction", v.instruction},
                              {"qubits", v.qubits}});
    }
    return nlohmann::json{
        {"circuit", circuit.name.empty() ? "unnamed" : circuit.name},
        {"n_qubits", circuit.n_qubits},
        {"fidelity", result.report.to_json()},
        {"schedule", {{"n_stages", result.schedule.n_stages}, {"slices", std::move(slices)}}},
        {"placement",
         {{"mode", to_string(opts.placement)},
          {"fallback_transitions", result.placement.fallback_transitions}}},
        {"routing",
         {{"mode", to_string(opts.routing)},
          {"window_size", opts.window_size},
          {"transitions", std::move(sets)}}},
        {"n_aods", opts.n_aods},
        {"seed", opts.seed},
        {"timings_ms", result.timings.to_json()},
        {"violations", std::move(violations)},
    };
}

/// Writes program.json, report.json, and breakdown.csv into out_dir.
inline void write_compile_outputs(const std::filesystem::path& out_dir, const SlicedCircuit& circuit,
                                  const CompileResult& result, const CompileOptions& opts) {
    std::filesystem::create_directories(out_dir);
    result.program.save((out_dir / "program.json").string());
    {
        std::ofstream out(out_dir / "report.json");
        if (!out) throw std::runtime_error("cannot write report.json");
        out << compile_report_json(circuit, result, opts).dump(2) << '\n';
    }
    {
        std::ofstream out(out_dir / "breakdown.csv");
        if (!out) throw std::runtime_error("cannot write breakdown.csv");
        write_breakdown_csv(out, result.report);
    }
}

}  // namespace dpqa
