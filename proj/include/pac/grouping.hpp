#pragma once

#include "pac/reg_kmeans.hpp"
#include "pac/types.hpp"

namespace pac {

/// Aggregate statistics of a group of clusters. The size is the total point
/// count of the members, so a group behaves like a cluster of weighted points.
struct GroupSummary {
    std::vector<int> member_clusters;
    Index size = 0;
    RowVec coord_sum;
    RowVec centroid;
};

/// Assignment of clusters into disjoint, non-empty groups.
struct Grouping {
    std::vector<GroupSummary> groups;
    std::vector<int> assignment;  // per cluster group index

    int k() const { return static_cast<int>(groups.size()); }
};

GroupSummary group_summary_from_members(const std::vector<ClusterSummary>& clusters,
                                        const std::vector<int>& member_ids);

void validate_grouping(const std::vector<ClusterSummary>& clusters, const Grouping& grouping,
                       double tol = 1e-9);

/// Exact set-level energy by full summation; the grouping oracle.
EnergyValue group_energy(const std::vector<ClusterSummary>& clusters, const Grouping& grouping,
                         double lambda_g);

/// Exact energy change of moving cluster `c` between groups, all else fixed.
/// When `c` is its entire source group the move removes the group, which is
/// evaluated as a merge of the two groups' aggregates.
double group_move_delta(const ClusterSummary& c, const GroupSummary& from, const GroupSummary& to,
                        double lambda_g);

/// Exact energy change of splitting cluster `c` off into a new group.
/// Zero when `c` already is its entire group.
double group_new_delta(const ClusterSummary& c, const GroupSummary& from, double lambda_g);

struct GroupingResult {
    Grouping grouping;
    std::vector<SweepStats> trace;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    bool converged = false;
};

/// The point-level solver's control flow applied to clusters with mass:
/// sweeps reassign whole clusters between groups, a pairwise scan merges
/// groups, and sweep order is the cluster list order.
GroupingResult regularized_set_kmeans(const std::vector<ClusterSummary>& clusters,
                                      const RegKmeansSettings& settings);

}  // namespace pac
