#pragma once

#include "pac/types.hpp"

namespace pac {

/// Knobs shared by the point-level and set-level solvers.
/// tol is an absolute change in total energy between consecutive sweeps;
/// tol == 0 selects the default of 1e-8 times the initial energy.
struct RegKmeansSettings {
    double lambda = 1.0;
    double tol = 0.0;
    int iter_max = 100;
};

/// Exact energy change of moving one point between clusters, all else fixed.
/// Requires size_from >= 2; the singleton case is a cluster removal and is
/// evaluated with merge_delta instead.
double point_move_delta(const Eigen::Ref<const RowVec>& x, Index size_from,
                        const Eigen::Ref<const RowVec>& centroid_from, Index size_to,
                        const Eigen::Ref<const RowVec>& centroid_to, double lambda);
double point_move_delta(const Eigen::Ref<const RowVec>& x, const ClusterSummary& from,
                        const ClusterSummary& to, double lambda);

/// Exact energy change of splitting one point off into a new singleton cluster.
/// Zero when the point already is a singleton cluster.
double point_new_cluster_delta(const Eigen::Ref<const RowVec>& x, Index size_from,
                               const Eigen::Ref<const RowVec>& centroid_from, double lambda);
double point_new_cluster_delta(const Eigen::Ref<const RowVec>& x, const ClusterSummary& from,
                               double lambda);

/// Exact energy change of merging two clusters; symmetric in its arguments.
double merge_delta(Index size_a, const Eigen::Ref<const RowVec>& centroid_a, Index size_b,
                   const Eigen::Ref<const RowVec>& centroid_b, double lambda);
double merge_delta(const ClusterSummary& a, const ClusterSummary& b, double lambda);

struct SweepStats {
    double tracked_energy = 0.0;  // accumulated from applied deltas
    double exact_energy = 0.0;    // recomputed from scratch at sweep end
    Index moves = 0;              // accepted point moves (including singleton folds)
    Index merges = 0;             // merges applied in the pairwise scan
    int k = 0;                    // live clusters at sweep end
};

struct RegKmeansResult {
    Partition partition;
    std::vector<SweepStats> trace;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    bool converged = false;  // energy change fell below tol before iter_max
};

/// Greedy coordinate descent on the regularized energy: all points start in
/// one cluster; each sweep reassigns points to the argmin candidate (existing
/// clusters or a new singleton) when the move lowers the energy, then merges
/// any cluster pair with a negative merge delta. Sweep order is dataset order.
RegKmeansResult regularized_kmeans(const Dataset& data, const RegKmeansSettings& settings);

}  // namespace pac
