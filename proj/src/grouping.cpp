#include "pac/grouping.hpp"

#include <cmath>

namespace pac {

GroupSummary group_summary_from_members(const std::vector<ClusterSummary>& clusters,
                                        const std::vector<int>& member_ids) {
    if (member_ids.empty()) throw std::invalid_argument("group summary: empty group");
    GroupSummary g;
    g.member_clusters = member_ids;
    g.coord_sum = RowVec::Zero(clusters[static_cast<std::size_t>(member_ids.front())].centroid.cols());
    for (int id : member_ids) {
        const ClusterSummary& c = clusters[static_cast<std::size_t>(id)];
        g.size += c.size;
        g.coord_sum += c.coord_sum;
    }
    g.centroid = g.coord_sum / static_cast<double>(g.size);
    return g;
}

void validate_grouping(const std::vector<ClusterSummary>& clusters, const Grouping& grouping,
                       double tol) {
    if (grouping.assignment.size() != clusters.size())
        throw std::invalid_argument("grouping: assignment size mismatch");
    std::vector<char> seen(clusters.size(), 0);
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
        const GroupSummary& group = grouping.groups[g];
        if (group.member_clusters.empty()) throw std::invalid_argument("grouping: empty group");
        for (int id : group.member_clusters) {
            if (id < 0 || static_cast<std::size_t>(id) >= clusters.size() ||
                seen[static_cast<std::size_t>(id)])
                throw std::invalid_argument("grouping: not a disjoint cover");
            seen[static_cast<std::size_t>(id)] = 1;
            if (grouping.assignment[static_cast<std::size_t>(id)] != static_cast<int>(g))
                throw std::invalid_argument("grouping: assignment disagrees with member list");
        }
        const GroupSummary fresh = group_summary_from_members(clusters, group.member_clusters);
        const double scale = 1.0 + fresh.centroid.cwiseAbs().maxCoeff();
        if (group.size != fresh.size ||
            (group.centroid - fresh.centroid).cwiseAbs().maxCoeff() > tol * scale)
            throw std::invalid_argument("grouping: summary does not match members");
    }
    for (char s : seen)
        if (!s) throw std::invalid_argument("grouping: unassigned cluster");
}

EnergyValue group_energy(const std::vector<ClusterSummary>& clusters, const Grouping& grouping,
                         double lambda_g) {
    if (clusters.empty()) throw std::invalid_argument("group_energy: no clusters");
    EnergyValue e;
    std::size_t covered = 0;
    for (const GroupSummary& group : grouping.groups) {
        if (group.member_clusters.empty())
            throw std::invalid_argument("group_energy: empty group");
        covered += group.member_clusters.size();
        const GroupSummary fresh = group_summary_from_members(clusters, group.member_clusters);
        double fit = 0.0;
        for (int id : group.member_clusters) {
            const ClusterSummary& c = clusters[static_cast<std::size_t>(id)];
            fit += static_cast<double>(c.size) * (fresh.centroid - c.centroid).squaredNorm();
        }
        e.fitting_term += fit;
        e.regularization_term += lambda_g / static_cast<double>(fresh.size);
    }
    if (covered != clusters.size())
        throw std::invalid_argument("group_energy: grouping does not cover the clusters");
    e.total = e.regularization_term + e.fitting_term;
    return e;
}

double group_move_delta(const ClusterSummary& c, const GroupSummary& from, const GroupSummary& to,
                        double lambda_g) {
    if (&from == &to) return 0.0;
    if (from.size == c.size)
        return merge_delta(from.size, from.centroid, to.size, to.centroid, lambda_g);
    const double m = static_cast<double>(c.size);
    const double gi = static_cast<double>(from.size);
    const double gj = static_cast<double>(to.size);
    return lambda_g * m / (gi * (gi - m)) - lambda_g * m / (gj * (gj + m)) +
           (gj * m / (gj + m)) * (to.centroid - c.centroid).squaredNorm() -
           (gi * m / (gi - m)) * (from.centroid - c.centroid).squaredNorm();
}

double group_new_delta(const ClusterSummary& c, const GroupSummary& from, double lambda_g) {
    if (from.size == c.size) return 0.0;
    const double m = static_cast<double>(c.size);
    const double gi = static_cast<double>(from.size);
    return lambda_g * m / (gi * (gi - m)) + lambda_g / m -
           (gi * m / (gi - m)) * (from.centroid - c.centroid).squaredNorm();
}

namespace {

struct GroupSlot {
    bool alive = true;
    Index size = 0;
    RowVec coord_sum;
    RowVec centroid;
    double set_scatter = 0.0;  // sum over members of |C| * ||centroid - c_bar||^2
};

int find_root(std::vector<int>& alias, int s) {
    int root = s;
    while (alias[static_cast<std::size_t>(root)] != root) root = alias[static_cast<std::size_t>(root)];
    while (alias[static_cast<std::size_t>(s)] != root) {
        const int next = alias[static_cast<std::size_t>(s)];
        alias[static_cast<std::size_t>(s)] = root;
        s = next;
    }
    return root;
}

void remove_atom(GroupSlot& g, const ClusterSummary& atom) {
    const double m = static_cast<double>(atom.size);
    const double s = static_cast<double>(g.size);
    g.set_scatter -= (s * m / (s - m)) * (g.centroid - atom.centroid).squaredNorm();
    if (g.set_scatter < 0.0) g.set_scatter = 0.0;
    g.coord_sum -= atom.coord_sum;
    g.size -= atom.size;
    g.centroid = g.coord_sum / static_cast<double>(g.size);
}

void add_atom(GroupSlot& g, const ClusterSummary& atom) {
    const double m = static_cast<double>(atom.size);
    const double s = static_cast<double>(g.size);
    g.set_scatter += (s * m / (s + m)) * (g.centroid - atom.centroid).squaredNorm();
    g.coord_sum += atom.coord_sum;
    g.size += atom.size;
    g.centroid = g.coord_sum / static_cast<double>(g.size);
}

void fold_group(GroupSlot& dst, const GroupSlot& src) {
    const double a = static_cast<double>(dst.size);
    const double b = static_cast<double>(src.size);
    dst.set_scatter +=
        src.set_scatter + (a * b / (a + b)) * (dst.centroid - src.centroid).squaredNorm();
    dst.coord_sum += src.coord_sum;
    dst.size += src.size;
    dst.centroid = dst.coord_sum / static_cast<double>(dst.size);
}

}  // namespace

GroupingResult regularized_set_kmeans(const std::vector<ClusterSummary>& clusters,
                                      const RegKmeansSettings& settings) {
    if (clusters.empty()) throw std::invalid_argument("regularized_set_kmeans: no clusters");
    if (settings.lambda <= 0.0)
        throw std::invalid_argument("regularized_set_kmeans: lambda must be > 0");
    for (const auto& c : clusters)
        if (c.size < 1) throw std::invalid_argument("regularized_set_kmeans: empty input cluster");

    const std::size_t n_atoms = clusters.size();
    const Index dim = clusters.front().centroid.cols();

    std::vector<GroupSlot> slots(1);
    slots[0].coord_sum = RowVec::Zero(dim);
    for (const auto& c : clusters) {
        slots[0].size += c.size;
        slots[0].coord_sum += c.coord_sum;
    }
    slots[0].centroid = slots[0].coord_sum / static_cast<double>(slots[0].size);
    for (const auto& c : clusters)
        slots[0].set_scatter +=
            static_cast<double>(c.size) * (slots[0].centroid - c.centroid).squaredNorm();

    std::vector<int> alias{0};
    std::vector<int> assign(n_atoms, 0);
    int k = 1;

    const double initial_energy =
        settings.lambda / static_cast<double>(slots[0].size) + slots[0].set_scatter;
    const double tol = settings.tol > 0.0 ? settings.tol : 1e-8 * initial_energy;

    GroupingResult result;
    result.initial_energy = initial_energy;

    double tracked = initial_energy;
    double prev_exact = initial_energy;

    for (int sweep = 1; sweep <= settings.iter_max; ++sweep) {
        SweepStats entry;

        for (std::size_t a = 0; a < n_atoms; ++a) {
            const int i = find_root(alias, assign[a]);
            assign[a] = i;
            const ClusterSummary& atom = clusters[a];
            GroupSlot& from = slots[static_cast<std::size_t>(i)];

            double best = 0.0;
            int best_j = -1;
            bool best_is_new = false;

            if (from.size > atom.size) {
                const double m = static_cast<double>(atom.size);
                const double gi = static_cast<double>(from.size);
                const double from_term =
                    settings.lambda * m / (gi * (gi - m)) -
                    (gi * m / (gi - m)) * (from.centroid - atom.centroid).squaredNorm();
                for (std::size_t j = 0; j < slots.size(); ++j) {
                    if (!slots[j].alive || static_cast<int>(j) == i) continue;
                    const double gj = static_cast<double>(slots[j].size);
                    const double d =
                        from_term - settings.lambda * m / (gj * (gj + m)) +
                        (gj * m / (gj + m)) * (slots[j].centroid - atom.centroid).squaredNorm();
                    if (d < best) {
                        best = d;
                        best_j = static_cast<int>(j);
                    }
                }
                const double d_new = from_term + settings.lambda / m;
                if (d_new < best) {
                    best = d_new;
                    best_j = -1;
                    best_is_new = true;
                }
                if (best < 0.0) {
                    remove_atom(from, atom);
                    if (best_is_new) {
                        GroupSlot fresh;
                        fresh.size = atom.size;
                        fresh.coord_sum = atom.coord_sum;
                        fresh.centroid = atom.centroid;
                        fresh.set_scatter = 0.0;
                        slots.push_back(std::move(fresh));
                        alias.push_back(static_cast<int>(slots.size()) - 1);
                        assign[a] = static_cast<int>(slots.size()) - 1;
                        ++k;
                    } else {
                        add_atom(slots[static_cast<std::size_t>(best_j)], atom);
                        assign[a] = best_j;
                    }
                    tracked += best;
                    ++entry.moves;
                }
            } else {
                // The atom is its entire group; relocating it removes the
                // group, which is a merge of the two group aggregates.
                for (std::size_t j = 0; j < slots.size(); ++j) {
                    if (!slots[j].alive || static_cast<int>(j) == i) continue;
                    const double d = merge_delta(from.size, from.centroid, slots[j].size,
                                                 slots[j].centroid, settings.lambda);
                    if (d < best) {
                        best = d;
                        best_j = static_cast<int>(j);
                    }
                }
                if (best < 0.0) {
                    GroupSlot& to = slots[static_cast<std::size_t>(best_j)];
                    fold_group(to, from);
                    from.alive = false;
                    alias[static_cast<std::size_t>(i)] = best_j;
                    assign[a] = best_j;
                    --k;
                    tracked += best;
                    ++entry.moves;
                }
            }
        }

        for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
            if (!slots[i].alive) continue;
            for (std::size_t j = i + 1; j < slots.size(); ++j) {
                if (!slots[j].alive) continue;
                const double d = merge_delta(slots[i].size, slots[i].centroid, slots[j].size,
                                             slots[j].centroid, settings.lambda);
                if (d < 0.0) {
                    fold_group(slots[i], slots[j]);
                    slots[j].alive = false;
                    alias[j] = static_cast<int>(i);
                    --k;
                    tracked += d;
                    ++entry.merges;
                }
            }
        }

        std::vector<int> remap(slots.size(), -1);
        std::vector<GroupSlot> live;
        live.reserve(static_cast<std::size_t>(k));
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (!slots[s].alive) continue;
            remap[s] = static_cast<int>(live.size());
            GroupSlot fresh;
            fresh.coord_sum = RowVec::Zero(dim);
            live.push_back(std::move(fresh));
        }
        for (std::size_t a = 0; a < n_atoms; ++a) {
            const int root = find_root(alias, assign[a]);
            const int g = remap[static_cast<std::size_t>(root)];
            assign[a] = g;
            live[static_cast<std::size_t>(g)].size += clusters[a].size;
            live[static_cast<std::size_t>(g)].coord_sum += clusters[a].coord_sum;
        }
        for (auto& g : live) g.centroid = g.coord_sum / static_cast<double>(g.size);
        for (std::size_t a = 0; a < n_atoms; ++a) {
            GroupSlot& g = live[static_cast<std::size_t>(assign[a])];
            g.set_scatter +=
                static_cast<double>(clusters[a].size) * (g.centroid - clusters[a].centroid).squaredNorm();
        }
        slots = std::move(live);
        alias.resize(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) alias[s] = static_cast<int>(s);

        double exact = 0.0;
        for (const auto& g : slots)
            exact += settings.lambda / static_cast<double>(g.size) + g.set_scatter;

        entry.tracked_energy = tracked;
        entry.exact_energy = exact;
        entry.k = k;
        result.trace.push_back(entry);

        const double change = std::abs(exact - prev_exact);
        prev_exact = exact;
        tracked = exact;
        if (change < tol) {
            result.converged = true;
            break;
        }
    }

    result.final_energy = prev_exact;

    Grouping grouping;
    grouping.assignment = assign;
    grouping.groups.resize(static_cast<std::size_t>(k));
    std::vector<std::vector<int>> members(static_cast<std::size_t>(k));
    for (std::size_t a = 0; a < n_atoms; ++a)
        members[static_cast<std::size_t>(assign[a])].push_back(static_cast<int>(a));
    for (int g = 0; g < k; ++g)
        grouping.groups[static_cast<std::size_t>(g)] =
            group_summary_from_members(clusters, members[static_cast<std::size_t>(g)]);
    result.grouping = std::move(grouping);
    return result;
}

}  // namespace pac
