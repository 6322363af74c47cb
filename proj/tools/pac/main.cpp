#include "pac/bench.hpp"
#include "pac/datagen.hpp"
#include "pac/io.hpp"
#include "pac/pipeline.hpp"
#include "pac/streaming.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

void add_common_knobs(CLI::App* cmd, pac::PacConfig& config) {
    cmd->add_option("--lambda-c", config.lambda_c, "parallel-phase regularization")
        ->required()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--epsilon", config.epsilon, "lambda_g = epsilon * (|X|/|C|)^2")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--lambda-g", config.lambda_g_override,
                    "explicit lambda_g (bypasses --epsilon)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--threads", config.n_threads, "number of data subsets")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", config.tol, "energy-change tolerance (0 = 1e-8 x initial energy)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--max-iter", config.iter_max, "sweep cap per phase")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", config.seed, "root seed for all randomness");
    cmd->add_option("--workers", config.max_workers, "worker pool cap (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--audit", config.audit_fraction,
                    "fraction of filtered refinement candidates to re-check")
        ->check(CLI::Range(0.0, 1.0));
}

void check_finite_result(const pac::PacResult& result) {
    for (const auto& cluster : result.final_partition.clusters)
        if (!cluster.centroid.allFinite() || !std::isfinite(cluster.scatter))
            throw pac::NumericError("non-finite cluster statistics in the result");
    if (!std::isfinite(result.final_energy))
        throw pac::NumericError("non-finite final energy");
}

void write_fit_outputs(const std::string& out_path, const pac::Dataset& data,
                       const pac::PacConfig& config, const pac::PacResult& result) {
    check_finite_result(result);
    pac::write_labeled(out_path, data, result.final_partition.assignment);
    pac::write_json(out_path + ".meta.json", pac::result_metadata(config, result));
}

int run_fit(const std::string& data_path, const std::string& out_path, pac::PacConfig& config) {
    const pac::Dataset data = pac::read_dataset(data_path);
    const pac::PacResult result = pac::pac_fit(data, config);
    if (!result.omega_ok)
        std::cerr << "warning: lambda_c/lambda_g ratio does not guarantee a stable cluster count"
                     " during refinement (omega condition failed)\n";
    write_fit_outputs(out_path, data, config, result);
    std::cout << "k=" << result.k << " lambda_g=" << result.lambda_g
              << " energy=" << result.final_energy << " labels=" << out_path << "\n";
    return 0;
}

int run_stream(const std::string& state_path, const std::string& batch_path,
               const std::string& out_path, pac::PacConfig& config) {
    pac::StreamState state;
    if (std::filesystem::exists(state_path)) state = pac::state_load_file(state_path);

    pac::Dataset batch;
    if (batch_path == "-") {
        if (!pac::read_framed_batch(std::cin, batch))
            throw pac::IoError("stdin: no framed batch found");
    } else {
        batch = pac::read_dataset(batch_path);
    }

    const pac::PacResult result = pac::stream_step(state, batch, config);
    if (!result.omega_ok)
        std::cerr << "warning: lambda_c/lambda_g ratio does not guarantee a stable cluster count"
                     " during refinement (omega condition failed)\n";
    pac::state_save_file(state, state_path);
    write_fit_outputs(out_path, state.accumulated, config, result);
    std::cout << "t=" << state.t << " k=" << result.k << " lambda_g=" << result.lambda_g
              << " points=" << state.accumulated.size() << " labels=" << out_path << "\n";
    return 0;
}

int run_gen(const std::string& kind, const std::string& spec_path, std::uint64_t seed,
            bool seed_given, const std::string& out_path) {
    const nlohmann::json spec_json = pac::read_json(spec_path);
    pac::Dataset data;
    if (kind == "mixture") {
        pac::MixtureSpec spec = pac::mixture_spec_from_json(spec_json);
        if (seed_given) spec.seed = seed;
        data = pac::gen_gaussian_mixture(spec);
    } else {
        pac::RingSpec spec = pac::ring_spec_from_json(spec_json);
        if (seed_given) spec.seed = seed;
        data = pac::gen_concentric_rings(spec);
    }
    pac::write_dataset(out_path, data);
    std::cout << "wrote " << data.size() << " points (d=" << data.dim() << ") to " << out_path
              << "\n";
    return 0;
}

int run_bench(const std::string& scenario_path, const std::string& out_path) {
    const pac::ScenarioSpec scenario = pac::scenario_from_json(pac::read_json(scenario_path));
    const pac::BenchReport report = pac::run_benchmark(scenario);
    pac::write_json(out_path, pac::report_to_json(report));
    std::cout << "scenario " << report.scenario << ": " << report.cells.size() << " cells, "
              << scenario.trials << " trials each, report=" << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parallel adaptive clustering"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "cluster a dataset");
    std::string fit_data, fit_out = "labels.csv";
    pac::PacConfig fit_config;
    fit->add_option("data", fit_data, "input CSV (rows of coordinates)")->required();
    fit->add_option("--out", fit_out, "label output path");
    add_common_knobs(fit, fit_config);
    fit->add_option("--nu", fit_config.nu, "accepted for symmetry; ignored by fit")
        ->check(CLI::Range(0.0, 0.999999));

    // stream
    auto* stream = app.add_subcommand("stream", "ingest one batch of a data stream");
    std::string stream_state, stream_batch, stream_out = "labels.csv";
    pac::PacConfig stream_cfg;
    stream->add_option("--state", stream_state, "state file (created if missing)")->required();
    stream->add_option("--batch", stream_batch, "batch CSV path, or - for a framed stdin block")
        ->required();
    stream->add_option("--out", stream_out, "label output path for the accumulated data");
    add_common_knobs(stream, stream_cfg);
    stream->add_option("--nu", stream_cfg.nu, "lambda_g growth exponent")
        ->check(CLI::Range(0.0, 0.999999));

    // gen
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->require_subcommand(1);
    std::string gen_spec, gen_out = "data.csv";
    std::uint64_t gen_seed = 0;
    auto* gen_mixture = gen->add_subcommand("mixture", "Gaussian mixture");
    auto* gen_rings = gen->add_subcommand("rings", "concentric rings");
    for (auto* sub : {gen_mixture, gen_rings}) {
        sub->add_option("--spec", gen_spec, "generator spec (JSON)")->required();
        sub->add_option("--seed", gen_seed, "override the spec seed");
        sub->add_option("--out", gen_out, "output CSV path");
    }

    // bench
    auto* bench = app.add_subcommand("bench", "run an experiment scenario");
    std::string bench_scenario, bench_out = "report.json";
    bench->add_option("--scenario", bench_scenario, "scenario file (JSON)")->required();
    bench->add_option("--out", bench_out, "report output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (fit->parsed()) return run_fit(fit_data, fit_out, fit_config);
        if (stream->parsed()) return run_stream(stream_state, stream_batch, stream_out, stream_cfg);
        if (gen->parsed())
            return run_gen(gen_mixture->parsed() ? "mixture" : "rings", gen_spec, gen_seed,
                           gen_mixture->count("--seed") + gen_rings->count("--seed") > 0, gen_out);
        if (bench->parsed()) return run_bench(bench_scenario, bench_out);
    } catch (const pac::NumericError& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const pac::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
