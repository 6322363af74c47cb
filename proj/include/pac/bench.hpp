#pragma once

#include "pac/datagen.hpp"
#include "pac/pipeline.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace pac {

MixtureSpec mixture_spec_from_json(const nlohmann::json& j);
RingSpec ring_spec_from_json(const nlohmann::json& j);

/// Builds a dataset from a generator description: either
/// {"canonical": "fig2"|"rings", "points": n, "seed": s} or an inline
/// {"type": "mixture"|"rings", ...} spec.
Dataset dataset_from_generator_json(const nlohmann::json& j);

/// A named experiment: one dataset, a list of (lambda_c, epsilon) cells, and
/// a number of reshuffled trials per cell.
struct ScenarioSpec {
    std::string name;
    nlohmann::json generator;
    std::vector<std::pair<double, double>> cells;  // (lambda_c, epsilon)
    int trials = 1;
    int threads = 16;
    std::uint64_t seed = 0;
    double tol = 0.0;
    int iter_max = 100;
};

ScenarioSpec scenario_from_json(const nlohmann::json& j);

struct TrialRecord {
    int trial = 0;
    std::uint64_t seed = 0;
    int k = 0;
    double lambda_g = 0.0;
    int parallel_clusters = 0;
    int grouping_clusters = 0;
    double parallel_seconds = 0.0;
    double grouping_seconds = 0.0;
    double refinement_seconds = 0.0;
    std::vector<double> refine_relative_energy;  // per sweep, relative to the pre-refinement energy
    std::vector<double> refine_fraction_moved;
};

struct GridCell {
    double lambda_c = 0.0;
    double epsilon = 0.0;
    double mean_k = 0.0;
    double std_k = 0.0;
    std::vector<TrialRecord> records;
};

struct BenchReport {
    std::string scenario;
    Index n_points = 0;
    std::vector<GridCell> cells;
};

/// Runs every cell of the grid `trials` times with per-trial seeds (so the
/// data order and split reshuffle each trial) and aggregates k statistics.
BenchReport run_benchmark(const ScenarioSpec& scenario);

nlohmann::json report_to_json(const BenchReport& report);

}  // namespace pac
