#include "pac/pipeline.hpp"

#include "pac/parallel.hpp"
#include "pac/rng.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

namespace pac {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void validate_config(const PacConfig& config) {
    if (config.n_threads < 1) throw std::invalid_argument("config: n_threads must be >= 1");
    if (config.lambda_c <= 0.0) throw std::invalid_argument("config: lambda_c must be > 0");
    if (config.epsilon <= 0.0 && config.lambda_g_override <= 0.0)
        throw std::invalid_argument("config: epsilon must be > 0");
    if (config.iter_max < 1) throw std::invalid_argument("config: iter_max must be >= 1");
    if (config.nu < 0.0 || config.nu >= 1.0)
        throw std::invalid_argument("config: nu must lie in [0, 1)");
}

std::vector<std::vector<Index>> split_indices(Index n_points, int n_subsets, std::uint64_t seed) {
    if (n_subsets < 1) throw std::invalid_argument("split: need at least one subset");
    if (static_cast<Index>(n_subsets) > n_points)
        throw std::invalid_argument("split: more subsets than points");
    std::vector<Index> perm(static_cast<std::size_t>(n_points));
    std::iota(perm.begin(), perm.end(), Index{0});
    RngStream rng(seed);
    rng.shuffle(perm);

    const Index base = n_points / n_subsets;
    const Index extra = n_points % n_subsets;
    std::vector<std::vector<Index>> subsets(static_cast<std::size_t>(n_subsets));
    std::size_t cursor = 0;
    for (int s = 0; s < n_subsets; ++s) {
        const Index len = base + (s < extra ? 1 : 0);
        auto& subset = subsets[static_cast<std::size_t>(s)];
        subset.assign(perm.begin() + static_cast<std::ptrdiff_t>(cursor),
                      perm.begin() + static_cast<std::ptrdiff_t>(cursor + static_cast<std::size_t>(len)));
        cursor += static_cast<std::size_t>(len);
    }
    return subsets;
}

std::vector<Dataset> split_random(const Dataset& data, int n_subsets, std::uint64_t seed) {
    validate_dataset(data);
    const auto subsets = split_indices(data.size(), n_subsets, seed);
    std::vector<Dataset> out;
    out.reserve(subsets.size());
    for (const auto& subset : subsets) {
        PointMatrix pts(static_cast<Index>(subset.size()), data.dim());
        for (std::size_t i = 0; i < subset.size(); ++i)
            pts.row(static_cast<Index>(i)) = data.point(subset[i]);
        out.emplace_back(std::move(pts));
    }
    return out;
}

double lambda_g_from_epsilon(double epsilon, Index n_points, Index n_clusters) {
    if (n_clusters < 1) throw std::invalid_argument("lambda_g: need at least one cluster");
    const double ratio = static_cast<double>(n_points) / static_cast<double>(n_clusters);
    return epsilon * ratio * ratio;
}

ParallelPhase run_parallel_phase(const Dataset& data, const std::vector<std::vector<Index>>& subsets,
                                 const PacConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n_subsets = subsets.size();

    std::vector<RegKmeansResult> results(n_subsets);
    parallel_for(n_subsets, config.max_workers, [&](std::size_t s) {
        const auto& subset = subsets[s];
        PointMatrix pts(static_cast<Index>(subset.size()), data.dim());
        for (std::size_t i = 0; i < subset.size(); ++i)
            pts.row(static_cast<Index>(i)) = data.point(subset[i]);
        RegKmeansSettings settings{config.lambda_c, config.tol, config.iter_max};
        results[s] = regularized_kmeans(Dataset(std::move(pts)), settings);
    });

    ParallelPhase phase;
    phase.atom_of_point.assign(static_cast<std::size_t>(data.size()), -1);
    for (std::size_t s = 0; s < n_subsets; ++s) {
        const Partition& part = results[s].partition;
        const int atom_base = static_cast<int>(phase.atoms.size());
        phase.subset_cluster_counts.push_back(part.k());
        phase.total_energy += results[s].final_energy;
        for (const auto& summary : part.clusters) phase.atoms.push_back(summary);
        for (std::size_t local = 0; local < subsets[s].size(); ++local) {
            const Index global = subsets[s][local];
            phase.atom_of_point[static_cast<std::size_t>(global)] =
                atom_base + part.assignment[local];
        }
    }
    phase.seconds = seconds_since(start);
    return phase;
}

PacResult group_and_refine(const Dataset& data, std::vector<ClusterSummary> atoms,
                           std::vector<int> atom_of_point, double lambda_g,
                           const PacConfig& config, PhaseTrace parallel_phase,
                           std::vector<int> subset_cluster_counts, double parallel_energy) {
    PacResult result;
    result.lambda_g = lambda_g;
    result.parallel_phase = parallel_phase;
    result.subset_cluster_counts = std::move(subset_cluster_counts);
    result.parallel_energy = parallel_energy;

    Index min_size = atoms.front().size;
    for (const auto& atom : atoms) min_size = std::min(min_size, atom.size);
    result.min_parallel_cluster_size = min_size;
    result.omega_ok = config.lambda_c < lambda_g && omega_guard(config.lambda_c, lambda_g, min_size);

    auto t_group = std::chrono::steady_clock::now();
    RegKmeansSettings group_settings{lambda_g, config.tol, config.iter_max};
    GroupingResult grouped = regularized_set_kmeans(atoms, group_settings);
    result.grouping_phase.seconds = seconds_since(t_group);
    result.grouping_phase.clusters = grouped.grouping.k();
    result.grouping_energy = grouped.final_energy;
    result.grouping_trace = std::move(grouped.trace);

    // The refinement consumes the parallel partition (point -> cluster with
    // rho) plus the grouping of those clusters.
    Partition parallel_partition;
    parallel_partition.assignment = atom_of_point;
    parallel_partition.member_lists.assign(atoms.size(), {});
    for (Index p = 0; p < data.size(); ++p)
        parallel_partition.member_lists[static_cast<std::size_t>(
                                            atom_of_point[static_cast<std::size_t>(p)])]
            .push_back(p);
    parallel_partition.clusters = atoms;

    auto t_refine = std::chrono::steady_clock::now();
    RegKmeansSettings refine_settings{lambda_g, config.tol, config.iter_max};
    RefineOptions refine_options;
    refine_options.audit_fraction = config.audit_fraction;
    refine_options.audit_seed = derive_seed(config.seed, "filter-audit");
    refine_options.max_workers = config.max_workers;
    RefineResult refined =
        refine(data, grouped.grouping, parallel_partition, lambda_g, refine_settings, refine_options);
    result.refinement_phase.seconds = seconds_since(t_refine);
    result.refinement_phase.clusters = refined.partition.k();

    result.parallel_phase.clusters = static_cast<int>(atoms.size());
    result.pre_refine_energy = refined.initial_energy;
    result.final_energy = refined.final_energy;
    result.refine_trace = std::move(refined.trace);
    result.k = refined.partition.k();
    result.final_partition = std::move(refined.partition);
    result.grouping = std::move(grouped.grouping);
    result.parallel_clusters = std::move(atoms);
    result.atom_of_point = std::move(atom_of_point);
    return result;
}

PacResult pac_fit_subsets(const Dataset& data, const std::vector<std::vector<Index>>& subsets,
                          const PacConfig& config) {
    validate_dataset(data);
    validate_config(config);

    ParallelPhase phase = run_parallel_phase(data, subsets, config);
    const double lambda_g =
        config.lambda_g_override > 0.0
            ? config.lambda_g_override
            : lambda_g_from_epsilon(config.epsilon, data.size(),
                                    static_cast<Index>(phase.atoms.size()));
    PhaseTrace parallel_trace;
    parallel_trace.seconds = phase.seconds;
    parallel_trace.clusters = static_cast<int>(phase.atoms.size());
    return group_and_refine(data, std::move(phase.atoms), std::move(phase.atom_of_point), lambda_g,
                            config, parallel_trace, std::move(phase.subset_cluster_counts),
                            phase.total_energy);
}

PacResult pac_fit(const Dataset& data, const PacConfig& config) {
    validate_dataset(data);
    validate_config(config);
    const auto subsets =
        split_indices(data.size(), config.n_threads, derive_seed(config.seed, "split", 1));
    return pac_fit_subsets(data, subsets, config);
}

}  // namespace pac
