// dpqac: layout-synthesis compiler for dynamically field-programmable qubit
// arrays. Subcommands: `compile` runs the schedule/place/route/lower pipeline
// and writes program.json, report.json, and breakdown.csv; `gen-qaoa` emits
// random 3-regular benchmark circuits.
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dpqa/arch.hpp"
#include "dpqa/benchmark.hpp"
#include "dpqa/pipeline.hpp"

namespace {

struct CompileArgs {
    std::vector<std::string> circuit_paths;
    std::string arch_path;
    std::string placement = "dynamic";
    std::string routing = "windowis";
    int window_size = 1000;
    int aods = 0;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool timings = false;
    int jobs = 1;
};

dpqa::PlacementMode parse_placement(const std::string& s) {
    if (s == "trivial") return dpqa::PlacementMode::Trivial;
    if (s == "static") return dpqa::PlacementMode::Static;
    if (s == "dynamic") return dpqa::PlacementMode::Dynamic;
    throw CLI::ValidationError("--placement must be one of trivial|static|dynamic");
}

dpqa::RoutingMode parse_routing(const std::string& s) {
    if (s == "sortis") return dpqa::RoutingMode::SortIS;
    if (s == "windowis") return dpqa::RoutingMode::WindowIS;
    if (s == "mis") return dpqa::RoutingMode::ExactMIS;
    throw CLI::ValidationError("--routing must be one of sortis|windowis|mis");
}

void print_timings(const std::string& name, const dpqa::PhaseTimings& t) {
    std::printf("%s: schedule %.1f ms | placement %.1f ms | routing %.1f ms | codegen %.1f ms | "
                "verify %.1f ms | total %.1f ms\n",
                name.c_str(), t.schedule_ms, t.placement_ms, t.routing_ms, t.codegen_ms, t.verify_ms,
                t.total_ms);
}

int run_compile(const CompileArgs& args) {
    const dpqa::ArchConfig arch =
        args.arch_path.empty() ? dpqa::ArchConfig{} : dpqa::ArchConfig::load(args.arch_path);
    arch.validate();

    dpqa::CompileOptions options;
    options.placement = parse_placement(args.placement);
    options.routing = parse_routing(args.routing);
    options.window_size = args.window_size;
    options.n_aods = args.aods;
    options.seed = args.seed;

    struct Job {
        std::string path;
        std::filesystem::path out_dir;
    };
    std::vector<Job> jobs;
    const bool batch = args.circuit_paths.size() > 1;
    for (const std::string& path : args.circuit_paths) {
        const std::filesystem::path out =
            batch ? std::filesystem::path(args.out_dir) / std::filesystem::path(path).stem()
                  : std::filesystem::path(args.out_dir);
        jobs.push_back({path, out});
    }

    std::atomic<std::size_t> next{0};
    std::atomic<int> exit_code{0};
    std::mutex io_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            const Job& job = jobs[i];
            try {
                const dpqa::SlicedCircuit circuit = dpqa::SlicedCircuit::load(job.path);
                const dpqa::CompileResult result = dpqa::compile_circuit(circuit, arch, options);
                std::scoped_lock lock(io_mutex);
                if (!result.violations.empty()) {
                    std::cerr << job.path << ": verification failed with " << result.violations.size()
                              << " violation(s)\n";
                    for (const dpqa::Violation& v : result.violations) {
                        std::cerr << "  [" << dpqa::to_string(v.kind) << "] " << v.message;
                        if (v.instruction >= 0) std::cerr << " (instruction " << v.instruction << ")";
                        std::cerr << '\n';
                    }
                    exit_code.store(2);
                    continue;
                }
                dpqa::write_compile_outputs(job.out_dir, circuit, result, options);
                std::cout << job.path << ": " << result.schedule.n_stages << " stages, fidelity "
                          << result.report.total << " -> " << job.out_dir.string() << '\n';
                if (args.timings) print_timings(job.path, result.timings);
            } catch (const std::exception& e) {
                std::scoped_lock lock(io_mutex);
                std::cerr << job.path << ": error: " << e.what() << '\n';
                exit_code.store(1);
            }
        }
    };

    const int n_threads = std::max(1, std::min<int>(args.jobs, static_cast<int>(jobs.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return exit_code.load();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"layout-synthesis compiler for dynamically field-programmable qubit arrays"};
    app.require_subcommand(1);

    CompileArgs cargs;
    CLI::App* compile = app.add_subcommand("compile", "compile a circuit into a verified program");
    compile->add_option("--circuit", cargs.circuit_paths, "circuit JSON file(s)")
        ->required()
        ->check(CLI::ExistingFile);
    compile->add_option("--arch", cargs.arch_path, "architecture JSON file (defaults built in)")
        ->check(CLI::ExistingFile);
    compile->add_option("--placement", cargs.placement, "trivial|static|dynamic (default dynamic)");
    compile->add_option("--routing", cargs.routing, "sortis|windowis|mis (default windowis)");
    compile->add_option("--window-size", cargs.window_size, "windowIS window size (default 1000)")
        ->check(CLI::PositiveNumber);
    compile->add_option("--aods", cargs.aods, "number of AODs (default: architecture value)")
        ->check(CLI::PositiveNumber);
    compile->add_option("--seed", cargs.seed, "random seed (default 0)");
    compile->add_option("--out-dir", cargs.out_dir, "output directory (default ./out)");
    compile->add_flag("--timings", cargs.timings, "print per-phase wall times");
    compile->add_option("--jobs", cargs.jobs, "parallel compilations in batch mode")
        ->check(CLI::PositiveNumber);

    int gen_n = 0;
    int gen_degree = 3;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    CLI::App* gen = app.add_subcommand("gen-qaoa", "generate a random regular-graph benchmark");
    gen->add_option("--n", gen_n, "number of qubits")->required()->check(CLI::PositiveNumber);
    gen->add_option("--degree", gen_degree, "regular degree (default 3)")->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "random seed (default 0)");
    gen->add_option("--out", gen_out, "output circuit file (default qaoa-n<N>-s<seed>.json)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compile->parsed()) return run_compile(cargs);
        if (gen->parsed()) {
            const dpqa::SlicedCircuit circuit = dpqa::generate_qaoa_benchmark(gen_n, gen_degree, gen_seed);
            const std::string path = gen_out.empty() ? circuit.name + ".json" : gen_out;
            circuit.save(path);
            std::cout << "wrote " << path << " (" << circuit.slices[0].gates.size() << " gates)\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
