#pragma once

#include "pac/grouping.hpp"
#include "pac/reg_kmeans.hpp"
#include "pac/types.hpp"

#include <cstdint>
#include <optional>

namespace pac {

/// Minimum distance from a point to its own group centroid below which a move
/// from group i to group j cannot lower the energy. Solves the quadratic
/// balance a*g^2 + b*g = L for its unique positive root; absent when L <= 0
/// or when |G_i| = 1 (no filtering possible for the pair).
std::optional<double> solve_gamma(Index size_i, const Eigen::Ref<const RowVec>& centroid_i,
                                  Index size_j, const Eigen::Ref<const RowVec>& centroid_j,
                                  double lambda_r);
std::optional<double> solve_gamma(const GroupSummary& gi, const GroupSummary& gj, double lambda_r);

/// Whether (1 - w) * s - 2 * sqrt(w) >= 1 with w = lambda_c / lambda_g, the
/// condition under which refinement can never profitably create a new
/// cluster. False (with the caller expected to warn) when lambda_c >= lambda_g.
bool omega_guard(double lambda_c, double lambda_g, Index min_parallel_cluster_size);

struct RefineOptions {
    /// Probability of re-checking a filtered-out candidate with the full
    /// delta; any negative delta found this way is counted as a violation.
    double audit_fraction = 0.0;
    std::uint64_t audit_seed = 0;
    int max_workers = 0;  // scan-phase parallelism across groups
};

struct RefineSweep {
    double energy = 0.0;  // exact point-level energy after the sweep
    Index points_moved = 0;
    int k = 0;
    Index tier1_skips = 0;        // (cluster, target) pairs skipped whole
    Index tier2_skips = 0;        // (point, target) pairs skipped
    Index deltas_evaluated = 0;   // full move deltas computed
    Index audit_checked = 0;
    Index audit_violations = 0;
};

struct RefineResult {
    Partition partition;
    std::vector<RefineSweep> trace;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    bool converged = false;
};

/// Per-point correction of the grouped partition. Each sweep recomputes the
/// gamma table, scans groups with the two-tier filter (whole thread-clusters
/// via rho and the triangle inequality, then single points), records the best
/// negative-delta target per point, and applies all recorded moves at once.
/// Moved points re-enter later sweeps as loose singleton clusters with rho 0.
/// Empty groups are removed at sweep end; new groups are never created.
RefineResult refine(const Dataset& data, const Grouping& grouping,
                    const Partition& parallel_partition, double lambda_r,
                    const RegKmeansSettings& settings, const RefineOptions& options = {});

}  // namespace pac
