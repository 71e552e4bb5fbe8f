#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "dpqa/benchmark.hpp"
#include "dpqa/checker.hpp"
#include "dpqa/pipeline.hpp"
#include "fixtures.hpp"

using namespace dpqa;

namespace {

bool has_kind(const std::vector<Violation>& violations, ViolationKind kind) {
    for (const auto& v : violations) {
        if (v.kind == kind) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("worked single-stage scenario scores the expected fidelity", "[checker]") {
    const ArchConfig arch{};
    const auto ex = fixtures::make_worked_example(arch);

    CHECK(verify(ex.program, ex.circuit, arch).empty());

    const FidelityReport report = fidelity(ex.program, arch);
    CHECK(report.g2 == 3);
    CHECK(report.n_stages == 1);
    CHECK(report.n_transfers == 3);
    CHECK_THAT(report.two_qubit_term, Catch::Matchers::WithinAbs(0.9826, 5e-4));
    CHECK_THAT(report.transfer_term, Catch::Matchers::WithinAbs(0.9970, 5e-4));
    CHECK_THAT(report.decoherence_term, Catch::Matchers::WithinAbs(0.9996, 5e-4));
    CHECK_THAT(report.total, Catch::Matchers::WithinAbs(0.9792, 5e-4));

    // bystander exponent |Q| * S - 2 g2 = 7 - 6 = 1
    CHECK_THAT(report.two_qubit_term,
               Catch::Matchers::WithinRel(std::pow(arch.f_two_qubit, 3) * arch.f_excitement, 1e-12));
}

TEST_CASE("empty program scores unit fidelity", "[checker]") {
    InstructionProgram p;
    p.n_qubits = 5;
    p.pitch_um = 15.0;
    p.rydberg_range_um = 6.0;
    p.initial_sites = {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}};
    p.finalize();
    const FidelityReport report = fidelity(p, ArchConfig{});
    CHECK(report.two_qubit_term == 1.0);
    CHECK(report.transfer_term == 1.0);
    CHECK(report.decoherence_term == 1.0);
    CHECK(report.total == 1.0);
    for (const double tq : report.t_q_us) CHECK(tq == 0.0);
}

TEST_CASE("idle time at the coherence limit is a hard failure", "[checker]") {
    ArchConfig arch{};
    arch.t2_coherence_us = 50.0;
    const auto ex = fixtures::make_worked_example(arch);
    const FidelityReport report = fidelity(ex.program, arch);
    CHECK(report.hard_failure);
    CHECK(report.decoherence_term <= 0.0);
}

TEST_CASE("verifier flags hand-crafted violations", "[checker]") {
    const ArchConfig arch{};
    const double pitch = arch.site_pitch_um;

    SECTION("crossing columns within one motion") {
        SlicedCircuit c;
        c.n_qubits = 2;
        InstructionProgram p;
        p.n_qubits = 2;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{0, 0}, {1, 0}};
        TransferInst pickup;
        pickup.pickup = true;
        pickup.qubits = {0, 1};
        pickup.duration_us = arch.t_transfer_us;
        p.instructions.emplace_back(pickup);
        MoveInst move;
        move.motions = {{0, {0.0, 0.0}, {2.0 * pitch, 0.0}}, {1, {pitch, 0.0}, {0.0, 0.0}}};
        move.t_start_us = arch.t_transfer_us;
        move.duration_us = 1.0;
        p.instructions.emplace_back(move);
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::AodOrderInversion));
    }

    SECTION("scheduled gate left apart") {
        SlicedCircuit c;
        c.n_qubits = 2;
        c.slices.push_back({SliceType::Commute, {{0, 1}}});
        InstructionProgram p;
        p.n_qubits = 2;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{0, 0}, {3, 3}};
        p.stages = {{{0, 1}}};
        RydbergInst ryd;
        ryd.stage = 0;
        ryd.duration_us = arch.t_rydberg_us;
        p.instructions.emplace_back(ryd);
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::GateNotColocated));
    }

    SECTION("co-sited pair without a scheduled gate") {
        SlicedCircuit c;
        c.n_qubits = 2;  // no gates at all
        InstructionProgram p;
        p.n_qubits = 2;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{1, 1}, {1, 1}};
        p.stages = {{}};
        RydbergInst ryd;
        ryd.stage = 0;
        ryd.duration_us = arch.t_rydberg_us;
        p.instructions.emplace_back(ryd);
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::UnscheduledInteraction));
    }

    SECTION("three qubits on one site") {
        SlicedCircuit c;
        c.n_qubits = 3;
        InstructionProgram p;
        p.n_qubits = 3;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{2, 2}, {2, 2}, {2, 2}};
        p.stages = {{}};
        RydbergInst ryd;
        ryd.stage = 0;
        ryd.duration_us = arch.t_rydberg_us;
        p.instructions.emplace_back(ryd);
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::SiteOvercrowded));
    }

    SECTION("pickup of a qubit already aboard") {
        SlicedCircuit c;
        c.n_qubits = 1;
        InstructionProgram p;
        p.n_qubits = 1;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{0, 0}};
        for (int i = 0; i < 2; ++i) {
            TransferInst t;
            t.pickup = true;
            t.qubits = {0};
            t.t_start_us = 15.0 * i;
            t.duration_us = 15.0;
            p.instructions.emplace_back(t);
        }
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::MisalignedTransfer));
    }

    SECTION("gate executed at the wrong stage") {
        SlicedCircuit c;
        c.n_qubits = 4;
        c.slices.push_back({SliceType::Dependency, {{2, 3}, {0, 1}}});
        InstructionProgram p;
        p.n_qubits = 4;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{0, 0}, {0, 0}, {2, 2}, {2, 2}};  // (0,1) co-sited from the start
        p.stages = {{{2, 3}}, {{0, 1}}};
        for (int s = 0; s < 2; ++s) {
            RydbergInst ryd;
            ryd.stage = s;
            ryd.t_start_us = s * 1.0;
            ryd.duration_us = arch.t_rydberg_us;
            p.instructions.emplace_back(ryd);
        }
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::WrongStage));
    }

    SECTION("claimed schedule must cover the circuit") {
        SlicedCircuit c;
        c.n_qubits = 2;
        c.slices.push_back({SliceType::Commute, {{0, 1}}});
        InstructionProgram p;
        p.n_qubits = 2;
        p.pitch_um = pitch;
        p.rydberg_range_um = arch.rydberg_range_um;
        p.initial_sites = {{0, 0}, {1, 0}};
        p.finalize();
        CHECK(has_kind(verify(p, c, arch), ViolationKind::Malformed));
    }
}

TEST_CASE("verifier accepts pipeline output and is order-sound", "[checker]") {
    const ArchConfig arch{};
    const SlicedCircuit qaoa = generate_qaoa_benchmark(12, 3, 3);
    CompileOptions opts;
    opts.seed = 5;
    const CompileResult result = compile_circuit(qaoa, arch, opts);
    REQUIRE(result.violations.empty());

    // permuting the moves inside every compatible set must not change the verdict
    std::vector<StageTransitionPlan> permuted = result.plans;
    for (auto& plan : permuted) {
        for (auto& set : plan.gather_sets) std::reverse(set.begin(), set.end());
        for (auto& set : plan.scatter_sets) std::reverse(set.begin(), set.end());
    }
    const InstructionProgram reprogram =
        lower_program(qaoa, result.schedule, result.placement, permuted, arch, 1);
    CHECK(verify(reprogram, qaoa, arch).empty());
}

TEST_CASE("fidelity is multiplicatively monotone and log-additive", "[checker]") {
    const ArchConfig arch{};
    const SlicedCircuit qaoa = generate_qaoa_benchmark(10, 3, 1);
    CompileOptions opts;
    opts.seed = 2;
    const CompileResult result = compile_circuit(qaoa, arch, opts);
    const double base = result.report.total;

    SECTION("appending a transfer lowers fidelity") {
        InstructionProgram extended = result.program;
        TransferInst t;
        t.pickup = true;
        t.qubits = {0};
        t.t_start_us = extended.total_us;
        t.duration_us = arch.t_transfer_us;
        extended.instructions.emplace_back(t);
        extended.finalize();
        CHECK(fidelity(extended, arch).total <= base);
    }
    SECTION("appending an exposure lowers fidelity") {
        InstructionProgram extended = result.program;
        RydbergInst ryd;
        ryd.stage = extended.n_stages();
        ryd.t_start_us = extended.total_us;
        ryd.duration_us = arch.t_rydberg_us;
        extended.instructions.emplace_back(ryd);
        extended.finalize();
        CHECK(fidelity(extended, arch).total <= base);
    }
    SECTION("log of the total equals the sum of term logs") {
        const FidelityReport r = result.report;
        const double lhs = std::log(r.total);
        const double rhs = std::log(r.two_qubit_term) + std::log(r.transfer_term) +
                           std::log(r.decoherence_term);
        CHECK_THAT(lhs, Catch::Matchers::WithinRel(rhs, 1e-12));
    }
}

TEST_CASE("breakdown CSV emits log terms", "[checker]") {
    const ArchConfig arch{};
    const auto ex = fixtures::make_worked_example(arch);
    const FidelityReport report = fidelity(ex.program, arch);
    std::ostringstream out;
    write_breakdown_csv(out, report);
    const std::string csv = out.str();
    CHECK(csv.find("n_qubits,two_qubit,transfer,decoherence,total") == 0);
    CHECK(csv.find("\n7,") != std::string::npos);
}
