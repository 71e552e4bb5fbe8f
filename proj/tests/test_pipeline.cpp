#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <variant>

#include "dpqa/benchmark.hpp"
#include "dpqa/pipeline.hpp"

using namespace dpqa;

namespace {

/// Test-side position replay: walks the instruction list and returns the
/// final physical position of each qubit.
std::vector<Vec2> final_positions(const InstructionProgram& p) {
    std::vector<Vec2> pos(p.n_qubits);
    for (int q = 0; q < p.n_qubits; ++q) pos[q] = site_position_um(p.initial_sites[q], p.pitch_um);
    for (const Instruction& inst : p.instructions) {
        if (const auto* m = std::get_if<MoveInst>(&inst)) {
            for (const Motion& mo : m->motions) pos[mo.qubit] = mo.dst_um;
        }
    }
    return pos;
}

/// Transfer parity: every qubit is out of the AOD at each exposure, and every
/// pickup is matched by a dropoff.
bool dropped_off_at_every_exposure(const InstructionProgram& p) {
    std::vector<int> in_aod(p.n_qubits, -1);
    for (const Instruction& inst : p.instructions) {
        if (const auto* t = std::get_if<TransferInst>(&inst)) {
            for (const int q : t->qubits) in_aod[q] = t->pickup ? t->aod : -1;
        } else if (std::holds_alternative<RydbergInst>(inst)) {
            for (const int held : in_aod) {
                if (held != -1) return false;
            }
        }
    }
    for (const int held : in_aod) {
        if (held != -1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("QAOA benchmark generator", "[pipeline]") {
    SECTION("n = 4 forces the complete graph") {
        const SlicedCircuit k4 = generate_qaoa_benchmark(4, 3, 0);
        REQUIRE(k4.slices.size() == 1);
        REQUIRE(k4.slices[0].gates.size() == 6);
    }
    SECTION("same seed reproduces the edge list") {
        const SlicedCircuit a = generate_qaoa_benchmark(90, 3, 123);
        const SlicedCircuit b = generate_qaoa_benchmark(90, 3, 123);
        REQUIRE(a.slices[0].gates == b.slices[0].gates);
        const SlicedCircuit c = generate_qaoa_benchmark(90, 3, 124);
        CHECK(a.slices[0].gates != c.slices[0].gates);
    }
    SECTION("structure: 3-regular with n*3/2 edges") {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const SlicedCircuit g = generate_qaoa_benchmark(30, 3, seed);
            REQUIRE(g.slices[0].gates.size() == 45);
            std::vector<int> degree(30, 0);
            for (const Gate& e : g.slices[0].gates) {
                ++degree[e.q0];
                ++degree[e.q1];
            }
            for (const int d : degree) REQUIRE(d == 3);
        }
    }
    SECTION("infeasible parameters are rejected") {
        CHECK_THROWS_AS(generate_qaoa_benchmark(5, 3, 0), std::invalid_argument);  // odd stub count
        CHECK_THROWS_AS(generate_qaoa_benchmark(3, 3, 0), std::invalid_argument);  // n <= degree
    }
}

TEST_CASE("compilation is deterministic byte for byte", "[pipeline]") {
    const SlicedCircuit qaoa = generate_qaoa_benchmark(14, 3, 8);
    const ArchConfig arch{};
    CompileOptions opts;
    opts.seed = 21;
    const CompileResult a = compile_circuit(qaoa, arch, opts);
    const CompileResult b = compile_circuit(qaoa, arch, opts);
    CHECK(a.program.to_json().dump() == b.program.to_json().dump());

    CompileOptions other = opts;
    other.seed = 22;
    const CompileResult c = compile_circuit(qaoa, arch, other);
    CHECK(a.program.to_json().dump() != c.program.to_json().dump());
}

TEST_CASE("ten-qubit compilation closes end to end", "[pipeline]") {
    const SlicedCircuit qaoa = generate_qaoa_benchmark(10, 3, 4);
    const ArchConfig arch{};
    const CompileResult result = compile_circuit(qaoa, arch, CompileOptions{});
    CHECK(result.violations.empty());
    CHECK(result.schedule.n_stages <= 4);
    CHECK(result.schedule.n_stages >= 3);
    CHECK(result.report.g2 == 15);
    CHECK(result.report.n_transfers == 4 * 15);  // four transfers per gate
    CHECK(result.report.total > 0.0);
    CHECK(result.report.total <= 1.0);
    CHECK(dropped_off_at_every_exposure(result.program));
}

TEST_CASE("every placement and routing mode verifies cleanly", "[pipeline]") {
    const SlicedCircuit qaoa = generate_qaoa_benchmark(8, 3, 6);
    const ArchConfig arch{};
    for (const PlacementMode pm : {PlacementMode::Trivial, PlacementMode::Static, PlacementMode::Dynamic}) {
        for (const RoutingMode rm : {RoutingMode::SortIS, RoutingMode::WindowIS, RoutingMode::ExactMIS}) {
            CompileOptions opts;
            opts.placement = pm;
            opts.routing = rm;
            opts.seed = 9;
            const CompileResult result = compile_circuit(qaoa, arch, opts);
            INFO("placement=" << to_string(pm) << " routing=" << to_string(rm));
            CHECK(result.violations.empty());
            CHECK(result.report.n_transfers == 4 * 12);
        }
    }
}

TEST_CASE("mixed commute and dependency slices compile", "[pipeline]") {
    SlicedCircuit c;
    c.n_qubits = 6;
    c.slices.push_back({SliceType::Commute, {{0, 1}, {2, 3}, {4, 5}, {1, 2}}});
    c.slices.push_back({SliceType::Dependency, {{0, 1}, {1, 2}, {2, 3}}});
    c.slices.push_back({SliceType::Commute, {{0, 5}, {1, 4}}});
    const ArchConfig arch{};
    for (const PlacementMode pm : {PlacementMode::Static, PlacementMode::Dynamic}) {
        CompileOptions opts;
        opts.placement = pm;
        opts.seed = 31;
        const CompileResult result = compile_circuit(c, arch, opts);
        INFO("placement=" << to_string(pm));
        CHECK(result.violations.empty());
        CHECK(result.report.g2 == c.total_gates());
    }
}

TEST_CASE("zero-gate circuit lowers to an empty program", "[pipeline]") {
    SlicedCircuit c;
    c.n_qubits = 5;
    const CompileResult result = compile_circuit(c, ArchConfig{}, CompileOptions{});
    CHECK(result.program.instructions.empty());
    CHECK(result.violations.empty());
    for (const double tq : result.report.t_q_us) CHECK(tq == 0.0);
    CHECK(result.report.total == 1.0);
}

TEST_CASE("static mode returns every qubit home", "[pipeline]") {
    const SlicedCircuit qaoa = generate_qaoa_benchmark(12, 3, 10);
    const ArchConfig arch{};
    CompileOptions opts;
    opts.placement = PlacementMode::Static;
    opts.seed = 3;
    const CompileResult result = compile_circuit(qaoa, arch, opts);
    REQUIRE(result.violations.empty());
    const auto pos = final_positions(result.program);
    for (int q = 0; q < qaoa.n_qubits; ++q) {
        const Vec2 home = site_position_um(result.program.initial_sites[q], arch.site_pitch_um);
        CHECK(pos[q] == home);
    }
}

TEST_CASE("dynamic mode ends with a separated configuration", "[pipeline]") {
    const SlicedCircuit qaoa = generate_qaoa_benchmark(12, 3, 10);
    const ArchConfig arch{};
    CompileOptions opts;
    opts.seed = 3;
    const CompileResult result = compile_circuit(qaoa, arch, opts);
    REQUIRE(result.violations.empty());
    const auto pos = final_positions(result.program);
    std::set<std::pair<long long, long long>> spots;
    for (const Vec2& p : pos) {
        CHECK(spots.insert({std::llround(p.x * 1e6), std::llround(p.y * 1e6)}).second);
    }
    CHECK(dropped_off_at_every_exposure(result.program));
}

TEST_CASE("compile outputs land on disk", "[pipeline]") {
    const SlicedCircuit qaoa = generate_qaoa_benchmark(8, 3, 2);
    const ArchConfig arch{};
    CompileOptions opts;
    opts.seed = 1;
    const CompileResult result = compile_circuit(qaoa, arch, opts);
    const auto dir = std::filesystem::temp_directory_path() / "dpqa-test-out";
    std::filesystem::remove_all(dir);
    write_compile_outputs(dir, qaoa, result, opts);
    CHECK(std::filesystem::exists(dir / "program.json"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "breakdown.csv"));

    const InstructionProgram reloaded = InstructionProgram::load((dir / "program.json").string());
    CHECK(reloaded.to_json().dump() == result.program.to_json().dump());
    CHECK(verify(reloaded, qaoa, arch).empty());
    std::filesystem::remove_all(dir);
}
