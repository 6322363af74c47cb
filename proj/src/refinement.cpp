#include "pac/refinement.hpp"

#include "pac/parallel.hpp"
#include "pac/rng.hpp"

#include <cmath>

namespace pac {

std::optional<double> solve_gamma(Index size_i, const Eigen::Ref<const RowVec>& centroid_i,
                                  Index size_j, const Eigen::Ref<const RowVec>& centroid_j,
                                  double lambda_r) {
    if (size_i < 2) return std::nullopt;
    const double gi = static_cast<double>(size_i);
    const double gj = static_cast<double>(size_j);
    const double dist = (centroid_j - centroid_i).norm();
    const double L = lambda_r / (gi * gi - gi) - lambda_r / (gj * gj + gj) +
                     (gj / (gj + 1.0)) * dist * dist;
    if (L <= 0.0) return std::nullopt;
    const double b = (2.0 * gj / (gj + 1.0)) * dist;
    const double a = (gi + gj) / ((gi - 1.0) * (gj + 1.0));
    return (-b + std::sqrt(b * b + 4.0 * a * L)) / (2.0 * a);
}

std::optional<double> solve_gamma(const GroupSummary& gi, const GroupSummary& gj, double lambda_r) {
    return solve_gamma(gi.size, gi.centroid, gj.size, gj.centroid, lambda_r);
}

bool omega_guard(double lambda_c, double lambda_g, Index min_parallel_cluster_size) {
    if (lambda_c <= 0.0 || lambda_g <= 0.0)
        throw std::invalid_argument("omega_guard: parameters must be > 0");
    if (lambda_c >= lambda_g) return false;
    const double omega = lambda_c / lambda_g;
    const double s = static_cast<double>(min_parallel_cluster_size);
    return (1.0 - omega) * s - 2.0 * std::sqrt(omega) >= 1.0;
}

namespace {

struct GroupState {
    bool alive = true;
    Index size = 0;
    RowVec coord_sum;
    RowVec centroid;
};

struct Chunk {
    RowVec centroid;  // frozen at creation; stays an enclosing ball center as members leave
    double rho = 0.0;
    std::vector<Index> members;
};

struct ScanCounters {
    Index tier1_skips = 0;
    Index tier2_skips = 0;
    Index deltas_evaluated = 0;
    Index audit_checked = 0;
    Index audit_violations = 0;
};

}  // namespace

RefineResult refine(const Dataset& data, const Grouping& grouping,
                    const Partition& parallel_partition, double lambda_r,
                    const RegKmeansSettings& settings, const RefineOptions& options) {
    validate_dataset(data);
    if (lambda_r <= 0.0) throw std::invalid_argument("refine: lambda_r must be > 0");
    if (parallel_partition.assignment.size() != static_cast<std::size_t>(data.size()))
        throw std::invalid_argument("refine: parallel partition does not match the dataset");
    if (grouping.assignment.size() != parallel_partition.clusters.size())
        throw std::invalid_argument("refine: grouping does not match the parallel clusters");

    const Index n = data.size();
    const int k0 = grouping.k();

    std::vector<GroupState> groups(static_cast<std::size_t>(k0));
    std::vector<std::vector<Chunk>> group_chunks(static_cast<std::size_t>(k0));
    for (int g = 0; g < k0; ++g) {
        groups[static_cast<std::size_t>(g)].size = grouping.groups[static_cast<std::size_t>(g)].size;
        groups[static_cast<std::size_t>(g)].coord_sum =
            grouping.groups[static_cast<std::size_t>(g)].coord_sum;
        groups[static_cast<std::size_t>(g)].centroid =
            grouping.groups[static_cast<std::size_t>(g)].centroid;
    }
    for (std::size_t atom = 0; atom < parallel_partition.clusters.size(); ++atom) {
        const ClusterSummary& c = parallel_partition.clusters[atom];
        if (c.rho_stale)
            throw std::invalid_argument("refine: parallel cluster has stale radius_rho");
        Chunk chunk;
        chunk.centroid = c.centroid;
        chunk.rho = c.radius_rho;
        chunk.members = parallel_partition.member_lists[atom];
        group_chunks[static_cast<std::size_t>(grouping.assignment[atom])].push_back(std::move(chunk));
    }
    std::vector<int> point_group(static_cast<std::size_t>(n));
    for (Index p = 0; p < n; ++p)
        point_group[static_cast<std::size_t>(p)] =
            grouping.assignment[static_cast<std::size_t>(
                parallel_partition.assignment[static_cast<std::size_t>(p)])];

    auto exact_energy = [&]() {
        double e = 0.0;
        for (const auto& g : groups)
            if (g.alive) e += lambda_r / static_cast<double>(g.size);
        for (Index p = 0; p < n; ++p)
            e += (data.point(p) - groups[static_cast<std::size_t>(point_group[static_cast<std::size_t>(p)])].centroid)
                     .squaredNorm();
        return e;
    };

    RefineResult result;
    result.initial_energy = exact_energy();
    const double tol = settings.tol > 0.0 ? settings.tol : 1e-8 * std::abs(result.initial_energy);
    double prev_energy = result.initial_energy;

    std::vector<double> best_delta(static_cast<std::size_t>(n));
    std::vector<int> best_target(static_cast<std::size_t>(n));

    // FP guard for the audit: the theory gives delta >= 0 exactly; anything
    // beyond rounding noise counts as a filter violation.
    const double audit_eps = 1e-9 * (1.0 + lambda_r);

    for (int sweep = 1; sweep <= settings.iter_max; ++sweep) {
        std::vector<int> alive;
        for (int g = 0; g < static_cast<int>(groups.size()); ++g)
            if (groups[static_cast<std::size_t>(g)].alive) alive.push_back(g);
        const std::size_t ka = alive.size();

        // Gamma table over alive group pairs, frozen for the whole sweep.
        std::vector<std::optional<double>> gamma(ka * ka);
        for (std::size_t a = 0; a < ka; ++a)
            for (std::size_t b = 0; b < ka; ++b) {
                if (a == b) continue;
                const GroupState& gi = groups[static_cast<std::size_t>(alive[a])];
                const GroupState& gj = groups[static_cast<std::size_t>(alive[b])];
                gamma[a * ka + b] = solve_gamma(gi.size, gi.centroid, gj.size, gj.centroid, lambda_r);
            }

        std::fill(best_delta.begin(), best_delta.end(), 0.0);
        std::fill(best_target.begin(), best_target.end(), -1);
        std::vector<ScanCounters> counters(ka);

        // Scan phase: groups own disjoint point sets, so each task writes to
        // disjoint slots of the per-point ledgers.
        parallel_for(ka, options.max_workers, [&](std::size_t a) {
            const int i = alive[a];
            const GroupState& gi = groups[static_cast<std::size_t>(i)];
            ScanCounters& ctr = counters[a];
            RngStream audit_rng(derive_seed(options.audit_seed, "filter-audit",
                                            (static_cast<std::uint64_t>(sweep) << 32) |
                                                static_cast<std::uint64_t>(i)));
            const bool auditing = options.audit_fraction > 0.0;
            std::vector<double> dist_own;  // per chunk-member distance to own centroid

            auto eval_delta = [&](Index p, const GroupState& gj) {
                if (gi.size >= 2)
                    return point_move_delta(data.point(p), gi.size, gi.centroid, gj.size,
                                            gj.centroid, lambda_r);
                // Singleton group: the point is the whole group, so the move
                // is a merge of the two groups.
                return merge_delta(Index{1}, data.point(p), gj.size, gj.centroid, lambda_r);
            };

            for (Chunk& chunk : group_chunks[static_cast<std::size_t>(i)]) {
                if (chunk.members.empty()) continue;
                const double dist_center = (gi.centroid - chunk.centroid).norm();
                bool dists_ready = false;
                for (std::size_t b = 0; b < ka; ++b) {
                    if (b == a) continue;
                    const int j = alive[b];
                    const GroupState& gj = groups[static_cast<std::size_t>(j)];
                    const std::optional<double>& g_ij = gamma[a * ka + b];
                    if (g_ij && dist_center + chunk.rho <= *g_ij) {
                        ++ctr.tier1_skips;
                        if (auditing && audit_rng.uniform01() < options.audit_fraction) {
                            for (Index p : chunk.members) {
                                const double d = eval_delta(p, gj);
                                ++ctr.audit_checked;
                                if (d < -audit_eps) ++ctr.audit_violations;
                            }
                        }
                        continue;
                    }
                    if (!dists_ready) {
                        dist_own.resize(chunk.members.size());
                        for (std::size_t m = 0; m < chunk.members.size(); ++m)
                            dist_own[m] = (data.point(chunk.members[m]) - gi.centroid).norm();
                        dists_ready = true;
                    }
                    for (std::size_t m = 0; m < chunk.members.size(); ++m) {
                        const Index p = chunk.members[m];
                        if (g_ij && dist_own[m] <= *g_ij) {
                            ++ctr.tier2_skips;
                            if (auditing && audit_rng.uniform01() < options.audit_fraction) {
                                const double d = eval_delta(p, gj);
                                ++ctr.audit_checked;
                                if (d < -audit_eps) ++ctr.audit_violations;
                            }
                            continue;
                        }
                        const double d = eval_delta(p, gj);
                        ++ctr.deltas_evaluated;
                        if (d < best_delta[static_cast<std::size_t>(p)]) {
                            best_delta[static_cast<std::size_t>(p)] = d;
                            best_target[static_cast<std::size_t>(p)] = j;
                        }
                    }
                }
            }
        });

        // Apply phase: all recorded moves at once, then rebuild group stats
        // and the chunk structure.
        RefineSweep entry;
        for (std::size_t a = 0; a < ka; ++a) {
            entry.tier1_skips += counters[a].tier1_skips;
            entry.tier2_skips += counters[a].tier2_skips;
            entry.deltas_evaluated += counters[a].deltas_evaluated;
            entry.audit_checked += counters[a].audit_checked;
            entry.audit_violations += counters[a].audit_violations;
        }

        Index moved = 0;
        for (Index p = 0; p < n; ++p) {
            const int target = best_target[static_cast<std::size_t>(p)];
            if (target < 0) continue;
            point_group[static_cast<std::size_t>(p)] = target;
            ++moved;
        }
        entry.points_moved = moved;

        if (moved > 0) {
            for (auto& g : groups) {
                g.size = 0;
                if (g.alive) g.coord_sum.setZero();
            }
            for (Index p = 0; p < n; ++p) {
                GroupState& g = groups[static_cast<std::size_t>(point_group[static_cast<std::size_t>(p)])];
                g.size += 1;
                g.coord_sum += data.point(p);
            }
            for (auto& g : groups) {
                if (!g.alive) continue;
                if (g.size == 0) {
                    g.alive = false;
                    continue;
                }
                g.centroid = g.coord_sum / static_cast<double>(g.size);
            }

            // Moved points leave their chunk and re-enter as loose singletons
            // in the target group; a shrunken chunk keeps its frozen centroid
            // and rho, which still bound the remaining members.
            std::vector<std::vector<Chunk>> fresh(groups.size());
            for (std::size_t g = 0; g < group_chunks.size(); ++g) {
                for (Chunk& chunk : group_chunks[g]) {
                    std::vector<Index> stay;
                    stay.reserve(chunk.members.size());
                    for (Index p : chunk.members)
                        if (best_target[static_cast<std::size_t>(p)] < 0) stay.push_back(p);
                    if (stay.empty()) continue;
                    chunk.members = std::move(stay);
                    fresh[g].push_back(std::move(chunk));
                }
            }
            for (Index p = 0; p < n; ++p) {
                const int target = best_target[static_cast<std::size_t>(p)];
                if (target < 0) continue;
                Chunk single;
                single.centroid = data.point(p);
                single.rho = 0.0;
                single.members = {p};
                fresh[static_cast<std::size_t>(target)].push_back(std::move(single));
            }
            group_chunks = std::move(fresh);
        }

        int k = 0;
        for (const auto& g : groups)
            if (g.alive) ++k;
        entry.k = k;

        const double energy = exact_energy();
        entry.energy = energy;
        result.trace.push_back(entry);

        const double change = std::abs(energy - prev_energy);
        prev_energy = energy;
        if (change < tol) {
            result.converged = true;
            break;
        }
    }

    result.final_energy = prev_energy;

    std::vector<int> compact(groups.size(), -1);
    int k_final = 0;
    for (std::size_t g = 0; g < groups.size(); ++g)
        if (groups[g].alive) compact[g] = k_final++;
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index p = 0; p < n; ++p)
        labels[static_cast<std::size_t>(p)] =
            compact[static_cast<std::size_t>(point_group[static_cast<std::size_t>(p)])];
    result.partition = partition_from_assignment(data, labels, k_final);
    return result;
}

}  // namespace pac
