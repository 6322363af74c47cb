#include "pac/types.hpp"

#include <cmath>

namespace pac {

void validate_dataset(const Dataset& data) {
    if (data.size() == 0) throw std::invalid_argument("dataset is empty");
    if (!data.points.allFinite()) throw NumericError("dataset contains non-finite coordinates");
}

ClusterSummary cluster_stats(const Eigen::Ref<const PointMatrix>& points) {
    if (points.rows() == 0) throw std::invalid_argument("cluster_stats: empty point list");
    ClusterSummary s;
    s.size = points.rows();
    s.coord_sum = points.colwise().sum();
    s.centroid = s.coord_sum / static_cast<double>(s.size);
    double scatter = 0.0;
    double max_sq = 0.0;
    for (Index i = 0; i < points.rows(); ++i) {
        const double d2 = (points.row(i) - s.centroid).squaredNorm();
        scatter += d2;
        if (d2 > max_sq) max_sq = d2;
    }
    s.scatter = scatter;
    s.radius_rho = std::sqrt(max_sq);
    s.rho_stale = false;
    return s;
}

ClusterSummary cluster_stats(const Dataset& data, const std::vector<Index>& members) {
    if (members.empty()) throw std::invalid_argument("cluster_stats: empty member list");
    ClusterSummary s;
    s.size = static_cast<Index>(members.size());
    s.coord_sum = RowVec::Zero(data.dim());
    for (Index p : members) s.coord_sum += data.point(p);
    s.centroid = s.coord_sum / static_cast<double>(s.size);
    double scatter = 0.0;
    double max_sq = 0.0;
    for (Index p : members) {
        const double d2 = (data.point(p) - s.centroid).squaredNorm();
        scatter += d2;
        if (d2 > max_sq) max_sq = d2;
    }
    s.scatter = scatter;
    s.radius_rho = std::sqrt(max_sq);
    s.rho_stale = false;
    return s;
}

ClusterSummary summary_apply(const ClusterSummary& summary, const Eigen::Ref<const RowVec>& point,
                             Apply direction) {
    ClusterSummary out = summary;
    out.rho_stale = true;
    const double n = static_cast<double>(summary.size);
    if (direction == Apply::add) {
        if (summary.size == 0) {
            out.size = 1;
            out.coord_sum = point;
            out.centroid = point;
            out.scatter = 0.0;
            return out;
        }
        out.scatter = summary.scatter + (n / (n + 1.0)) * (summary.centroid - point).squaredNorm();
        out.size = summary.size + 1;
        out.coord_sum = summary.coord_sum + point;
        out.centroid = out.coord_sum / static_cast<double>(out.size);
    } else {
        if (summary.size < 1) throw std::invalid_argument("summary_apply: remove from empty summary");
        if (summary.size == 1) {
            out.size = 0;
            out.coord_sum.setZero();
            out.centroid.setZero();
            out.scatter = 0.0;
            return out;
        }
        out.scatter = summary.scatter - (n / (n - 1.0)) * (summary.centroid - point).squaredNorm();
        if (out.scatter < 0.0) out.scatter = 0.0;
        out.size = summary.size - 1;
        out.coord_sum = summary.coord_sum - point;
        out.centroid = out.coord_sum / static_cast<double>(out.size);
    }
    return out;
}

EnergyValue global_energy(const Dataset& data, const Partition& partition, double lambda) {
    validate_dataset(data);
    if (partition.member_lists.empty()) throw std::invalid_argument("global_energy: no clusters");
    Index covered = 0;
    EnergyValue e;
    for (const auto& members : partition.member_lists) {
        if (members.empty()) throw std::invalid_argument("global_energy: empty cluster in partition");
        covered += static_cast<Index>(members.size());
        RowVec sum = RowVec::Zero(data.dim());
        for (Index p : members) sum += data.point(p);
        const RowVec centroid = sum / static_cast<double>(members.size());
        double fit = 0.0;
        for (Index p : members) fit += (data.point(p) - centroid).squaredNorm();
        e.fitting_term += fit;
        e.regularization_term += lambda / static_cast<double>(members.size());
    }
    if (covered != data.size())
        throw std::invalid_argument("global_energy: partition does not cover the dataset");
    e.total = e.regularization_term + e.fitting_term;
    return e;
}

Partition partition_from_assignment(const Dataset& data, const std::vector<int>& assignment, int k) {
    if (static_cast<Index>(assignment.size()) != data.size())
        throw std::invalid_argument("partition_from_assignment: assignment size mismatch");
    Partition p;
    p.assignment = assignment;
    p.member_lists.assign(static_cast<std::size_t>(k), {});
    for (Index i = 0; i < data.size(); ++i) {
        const int c = assignment[static_cast<std::size_t>(i)];
        if (c < 0 || c >= k) throw std::invalid_argument("partition_from_assignment: label out of range");
        p.member_lists[static_cast<std::size_t>(c)].push_back(i);
    }
    p.clusters.reserve(static_cast<std::size_t>(k));
    for (const auto& members : p.member_lists) {
        if (members.empty())
            throw std::invalid_argument("partition_from_assignment: empty cluster");
        p.clusters.push_back(cluster_stats(data, members));
    }
    return p;
}

void validate_partition(const Dataset& data, const Partition& partition, double tol) {
    if (partition.clusters.size() != partition.member_lists.size())
        throw std::invalid_argument("partition: clusters/member_lists size mismatch");
    std::vector<char> seen(static_cast<std::size_t>(data.size()), 0);
    for (std::size_t c = 0; c < partition.member_lists.size(); ++c) {
        for (Index p : partition.member_lists[c]) {
            if (p < 0 || p >= data.size() || seen[static_cast<std::size_t>(p)])
                throw std::invalid_argument("partition: not a disjoint cover");
            seen[static_cast<std::size_t>(p)] = 1;
            if (partition.assignment[static_cast<std::size_t>(p)] != static_cast<int>(c))
                throw std::invalid_argument("partition: assignment disagrees with member list");
        }
    }
    for (char s : seen)
        if (!s) throw std::invalid_argument("partition: uncovered point");
    for (std::size_t c = 0; c < partition.clusters.size(); ++c) {
        const ClusterSummary fresh = cluster_stats(data, partition.member_lists[c]);
        const ClusterSummary& have = partition.clusters[c];
        const double scale = 1.0 + fresh.centroid.cwiseAbs().maxCoeff() + std::abs(fresh.scatter);
        if (have.size != fresh.size ||
            (have.centroid - fresh.centroid).cwiseAbs().maxCoeff() > tol * scale ||
            std::abs(have.scatter - fresh.scatter) > tol * scale)
            throw std::invalid_argument("partition: summary does not match member list");
        if (!have.rho_stale && std::abs(have.radius_rho - fresh.radius_rho) > tol * scale)
            throw std::invalid_argument("partition: stale radius_rho");
    }
}

}  // namespace pac
