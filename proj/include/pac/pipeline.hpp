#pragma once

#include "pac/grouping.hpp"
#include "pac/refinement.hpp"
#include "pac/reg_kmeans.hpp"
#include "pac/types.hpp"

#include <cstdint>

namespace pac {

struct PacConfig {
    int n_threads = 16;      // number of disjoint data subsets
    double lambda_c = 1.0;   // parallel-phase regularization
    double epsilon = 0.05;   // generates lambda_g from the cluster sizes
    double nu = 0.1;         // time growth exponent (streaming only)
    double tol = 0.0;        // 0 = per-phase default of 1e-8 x initial energy
    int iter_max = 100;
    std::uint64_t seed = 0;
    double lambda_g_override = 0.0;  // > 0 bypasses the epsilon rule
    int max_workers = 0;             // worker pool cap; 0 = all hardware threads
    double audit_fraction = 0.0;     // refinement filter audit sampling rate
};

void validate_config(const PacConfig& config);

struct PhaseTrace {
    double seconds = 0.0;
    int clusters = 0;
};

struct PacResult {
    Partition final_partition;
    int k = 0;
    double lambda_g = 0.0;
    bool omega_ok = false;
    Index min_parallel_cluster_size = 0;

    std::vector<ClusterSummary> parallel_clusters;  // per-subset clusters with rho
    std::vector<int> atom_of_point;                 // point -> parallel cluster
    Grouping grouping;                              // pre-refinement configuration

    PhaseTrace parallel_phase;
    PhaseTrace grouping_phase;
    PhaseTrace refinement_phase;
    std::vector<int> subset_cluster_counts;
    std::vector<SweepStats> grouping_trace;
    std::vector<RefineSweep> refine_trace;

    double parallel_energy = 0.0;    // sum of per-subset energies at lambda_c
    double grouping_energy = 0.0;    // set-level energy at lambda_g
    double pre_refine_energy = 0.0;  // point-level energy of the grouped partition
    double final_energy = 0.0;
};

/// Deterministic random split into disjoint subsets with sizes differing by
/// at most one. The returned lists hold global row indices; the order within
/// a subset is the shuffled order and fixes the per-subset sweep order.
std::vector<std::vector<Index>> split_indices(Index n_points, int n_subsets, std::uint64_t seed);

std::vector<Dataset> split_random(const Dataset& data, int n_subsets, std::uint64_t seed);

/// lambda_g = epsilon * (|X| / |C|)^2.
double lambda_g_from_epsilon(double epsilon, Index n_points, Index n_clusters);

struct ParallelPhase {
    std::vector<ClusterSummary> atoms;
    std::vector<int> atom_of_point;
    std::vector<int> subset_cluster_counts;
    double total_energy = 0.0;
    double seconds = 0.0;
};

/// Runs the per-subset regularized k-means concurrently and collects the
/// clusters in (subset, local cluster) order.
ParallelPhase run_parallel_phase(const Dataset& data, const std::vector<std::vector<Index>>& subsets,
                                 const PacConfig& config);

/// Grouping plus refinement over an already-clustered configuration; shared
/// by the batch fit and the streaming step.
PacResult group_and_refine(const Dataset& data, std::vector<ClusterSummary> atoms,
                           std::vector<int> atom_of_point, double lambda_g,
                           const PacConfig& config, PhaseTrace parallel_phase,
                           std::vector<int> subset_cluster_counts, double parallel_energy);

/// The full pipeline on caller-provided subsets (exposed for matched-split
/// comparisons); lambda_g follows the epsilon rule unless overridden.
PacResult pac_fit_subsets(const Dataset& data, const std::vector<std::vector<Index>>& subsets,
                          const PacConfig& config);

/// Random split, parallel clustering, grouping, refinement.
PacResult pac_fit(const Dataset& data, const PacConfig& config);

}  // namespace pac
