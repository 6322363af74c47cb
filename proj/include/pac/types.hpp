#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pac {

/// Points are rows; row-major so a point is contiguous in memory.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVec = Eigen::RowVectorXd;
using Index = std::int64_t;

/// Thrown when an input file or stream cannot be parsed.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Thrown when a non-finite value is detected in a numeric pipeline.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An ordered set of d-dimensional points. Iteration order is the row order,
/// so a stored permutation of the rows fully determines sweep order.
struct Dataset {
    PointMatrix points;

    Dataset() = default;
    explicit Dataset(PointMatrix pts) : points(std::move(pts)) {}

    Index size() const { return points.rows(); }
    Index dim() const { return points.cols(); }
    auto point(Index i) const { return points.row(i); }
};

/// Requires every coordinate finite and the dataset non-empty.
void validate_dataset(const Dataset& data);

/// Sufficient statistics of one cluster of points.
struct ClusterSummary {
    Index size = 0;
    RowVec coord_sum;      // sum of member coordinates
    RowVec centroid;       // coord_sum / size
    double scatter = 0.0;  // sum of squared distances to the centroid
    double radius_rho = 0.0;  // max member distance to the centroid
    bool rho_stale = false;   // incremental edits do not maintain radius_rho

    double variance() const { return size > 0 ? scatter / static_cast<double>(size) : 0.0; }
};

/// A disjoint cover of a dataset by clusters.
struct Partition {
    std::vector<int> assignment;  // per point cluster index
    std::vector<ClusterSummary> clusters;
    std::vector<std::vector<Index>> member_lists;

    int k() const { return static_cast<int>(clusters.size()); }
};

/// Checks disjoint cover and that summaries match their member lists.
void validate_partition(const Dataset& data, const Partition& partition, double tol = 1e-9);

struct EnergyValue {
    double regularization_term = 0.0;
    double fitting_term = 0.0;
    double total = 0.0;
};

enum class Apply { add, remove };

/// Statistics of a point set, computed in one pass plus a distance pass.
ClusterSummary cluster_stats(const Eigen::Ref<const PointMatrix>& points);
ClusterSummary cluster_stats(const Dataset& data, const std::vector<Index>& members);

/// Incremental one-point update. The scatter uses the standard single-point
/// identity; radius_rho is marked stale because removal can shrink it.
ClusterSummary summary_apply(const ClusterSummary& summary, const Eigen::Ref<const RowVec>& point,
                             Apply direction);

/// Exact regularized energy by full summation over member lists; the oracle
/// every incremental delta in this library is validated against.
EnergyValue global_energy(const Dataset& data, const Partition& partition, double lambda);

/// Builds a Partition (summaries, member lists, rho) from a per-point assignment
/// with cluster indices in 0..k-1. Every cluster must be non-empty.
Partition partition_from_assignment(const Dataset& data, const std::vector<int>& assignment, int k);

}  // namespace pac
