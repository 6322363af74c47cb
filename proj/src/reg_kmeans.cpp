#include "pac/reg_kmeans.hpp"

#include <cmath>

namespace pac {

double point_move_delta(const Eigen::Ref<const RowVec>& x, Index size_from,
                        const Eigen::Ref<const RowVec>& centroid_from, Index size_to,
                        const Eigen::Ref<const RowVec>& centroid_to, double lambda) {
    if (size_from < 2) throw std::invalid_argument("point_move_delta: source cluster must have size >= 2");
    const double a = static_cast<double>(size_from);
    const double b = static_cast<double>(size_to);
    return lambda / (a * (a - 1.0)) - lambda / (b * (b + 1.0)) +
           (b / (b + 1.0)) * (centroid_to - x).squaredNorm() -
           (a / (a - 1.0)) * (centroid_from - x).squaredNorm();
}

double point_move_delta(const Eigen::Ref<const RowVec>& x, const ClusterSummary& from,
                        const ClusterSummary& to, double lambda) {
    if (&from == &to) return 0.0;
    return point_move_delta(x, from.size, from.centroid, to.size, to.centroid, lambda);
}

double point_new_cluster_delta(const Eigen::Ref<const RowVec>& x, Index size_from,
                               const Eigen::Ref<const RowVec>& centroid_from, double lambda) {
    if (size_from == 1) return 0.0;  // the "new" cluster is the old one
    const double a = static_cast<double>(size_from);
    return lambda / (a * (a - 1.0)) + lambda -
           (a / (a - 1.0)) * (centroid_from - x).squaredNorm();
}

double point_new_cluster_delta(const Eigen::Ref<const RowVec>& x, const ClusterSummary& from,
                               double lambda) {
    return point_new_cluster_delta(x, from.size, from.centroid, lambda);
}

double merge_delta(Index size_a, const Eigen::Ref<const RowVec>& centroid_a, Index size_b,
                   const Eigen::Ref<const RowVec>& centroid_b, double lambda) {
    const double a = static_cast<double>(size_a);
    const double b = static_cast<double>(size_b);
    return (a * b / (a + b)) * (centroid_a - centroid_b).squaredNorm() +
           lambda * (1.0 / (a + b) - 1.0 / a - 1.0 / b);
}

double merge_delta(const ClusterSummary& a, const ClusterSummary& b, double lambda) {
    if (&a == &b) throw std::invalid_argument("merge_delta: self-merge is undefined");
    return merge_delta(a.size, a.centroid, b.size, b.centroid, lambda);
}

namespace {

struct Slot {
    bool alive = true;
    Index size = 0;
    RowVec coord_sum;
    RowVec centroid;
    double scatter = 0.0;
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

void remove_point(Slot& s, const Eigen::Ref<const RowVec>& x) {
    const double n = static_cast<double>(s.size);
    s.scatter -= (n / (n - 1.0)) * (s.centroid - x).squaredNorm();
    if (s.scatter < 0.0) s.scatter = 0.0;
    s.coord_sum -= x;
    s.size -= 1;
    s.centroid = s.coord_sum / static_cast<double>(s.size);
}

void add_point(Slot& s, const Eigen::Ref<const RowVec>& x) {
    const double n = static_cast<double>(s.size);
    s.scatter += (n / (n + 1.0)) * (s.centroid - x).squaredNorm();
    s.coord_sum += x;
    s.size += 1;
    s.centroid = s.coord_sum / static_cast<double>(s.size);
}

void fold_into(Slot& dst, const Slot& src) {
    const double a = static_cast<double>(dst.size);
    const double b = static_cast<double>(src.size);
    dst.scatter += src.scatter + (a * b / (a + b)) * (dst.centroid - src.centroid).squaredNorm();
    dst.coord_sum += src.coord_sum;
    dst.size += src.size;
    dst.centroid = dst.coord_sum / static_cast<double>(dst.size);
}

}  // namespace

RegKmeansResult regularized_kmeans(const Dataset& data, const RegKmeansSettings& settings) {
    validate_dataset(data);
    if (settings.lambda <= 0.0) throw std::invalid_argument("regularized_kmeans: lambda must be > 0");
    if (settings.iter_max < 1) throw std::invalid_argument("regularized_kmeans: iter_max must be >= 1");

    const Index n = data.size();
    const Index dim = data.dim();

    std::vector<Slot> slots(1);
    {
        const ClusterSummary all = cluster_stats(data.points);
        slots[0].size = all.size;
        slots[0].coord_sum = all.coord_sum;
        slots[0].centroid = all.centroid;
        slots[0].scatter = all.scatter;
    }
    std::vector<int> alias{0};
    std::vector<int> assign(static_cast<std::size_t>(n), 0);
    int k = 1;

    const double initial_energy =
        settings.lambda / static_cast<double>(n) + slots[0].scatter;
    const double tol = settings.tol > 0.0 ? settings.tol : 1e-8 * initial_energy;

    RegKmeansResult result;
    result.initial_energy = initial_energy;

    double tracked = initial_energy;
    double prev_exact = initial_energy;

    for (int sweep = 1; sweep <= settings.iter_max; ++sweep) {
        SweepStats entry;

        for (Index p = 0; p < n; ++p) {
            const int i = find_root(alias, assign[static_cast<std::size_t>(p)]);
            assign[static_cast<std::size_t>(p)] = i;
            const auto x = data.point(p);
            Slot& from = slots[static_cast<std::size_t>(i)];

            double best = 0.0;
            int best_j = -1;
            bool best_is_new = false;

            if (from.size >= 2) {
                for (std::size_t j = 0; j < slots.size(); ++j) {
                    if (!slots[j].alive || static_cast<int>(j) == i) continue;
                    const double d = point_move_delta(x, from.size, from.centroid, slots[j].size,
                                                      slots[j].centroid, settings.lambda);
                    if (d < best) {
                        best = d;
                        best_j = static_cast<int>(j);
                    }
                }
                const double d_new =
                    point_new_cluster_delta(x, from.size, from.centroid, settings.lambda);
                if (d_new < best) {
                    best = d_new;
                    best_j = -1;
                    best_is_new = true;
                }
                if (best < 0.0) {
                    remove_point(from, x);
                    if (best_is_new) {
                        Slot fresh;
                        fresh.size = 1;
                        fresh.coord_sum = x;
                        fresh.centroid = x;
                        fresh.scatter = 0.0;
                        slots.push_back(std::move(fresh));
                        alias.push_back(static_cast<int>(slots.size()) - 1);
                        assign[static_cast<std::size_t>(p)] = static_cast<int>(slots.size()) - 1;
                        ++k;
                    } else {
                        add_point(slots[static_cast<std::size_t>(best_j)], x);
                        assign[static_cast<std::size_t>(p)] = best_j;
                    }
                    tracked += best;
                    ++entry.moves;
                }
            } else {
                // Sole point of a singleton cluster: moving it removes the
                // cluster, which is exactly a merge of the two clusters.
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
                    Slot& to = slots[static_cast<std::size_t>(best_j)];
                    fold_into(to, from);
                    from.alive = false;
                    alias[static_cast<std::size_t>(i)] = best_j;
                    assign[static_cast<std::size_t>(p)] = best_j;
                    --k;
                    tracked += best;
                    ++entry.moves;
                }
            }
        }

        // Pairwise merge scan, one full pass in increasing (i, j); a merged
        // slot keeps scanning with its updated statistics.
        for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
            if (!slots[i].alive) continue;
            for (std::size_t j = i + 1; j < slots.size(); ++j) {
                if (!slots[j].alive) continue;
                const double d = merge_delta(slots[i].size, slots[i].centroid, slots[j].size,
                                             slots[j].centroid, settings.lambda);
                if (d < 0.0) {
                    fold_into(slots[i], slots[j]);
                    slots[j].alive = false;
                    alias[j] = static_cast<int>(i);
                    --k;
                    tracked += d;
                    ++entry.merges;
                }
            }
        }

        // Compact live slots and rebuild exact statistics from the points.
        std::vector<int> remap(slots.size(), -1);
        std::vector<Slot> live;
        live.reserve(static_cast<std::size_t>(k));
        for (std::size_t s = 0; s < slots.size(); ++s) {
            if (!slots[s].alive) continue;
            remap[s] = static_cast<int>(live.size());
            Slot fresh;
            fresh.size = 0;
            fresh.coord_sum = RowVec::Zero(dim);
            fresh.scatter = 0.0;
            live.push_back(std::move(fresh));
        }
        for (Index p = 0; p < n; ++p) {
            const int root = find_root(alias, assign[static_cast<std::size_t>(p)]);
            const int c = remap[static_cast<std::size_t>(root)];
            assign[static_cast<std::size_t>(p)] = c;
            live[static_cast<std::size_t>(c)].size += 1;
            live[static_cast<std::size_t>(c)].coord_sum += data.point(p);
        }
        for (auto& s : live) s.centroid = s.coord_sum / static_cast<double>(s.size);
        for (Index p = 0; p < n; ++p) {
            Slot& s = live[static_cast<std::size_t>(assign[static_cast<std::size_t>(p)])];
            s.scatter += (s.centroid - data.point(p)).squaredNorm();
        }
        slots = std::move(live);
        alias.resize(slots.size());
        for (std::size_t s = 0; s < slots.size(); ++s) alias[s] = static_cast<int>(s);

        double exact = 0.0;
        for (const auto& s : slots)
            exact += settings.lambda / static_cast<double>(s.size) + s.scatter;

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
    result.partition = partition_from_assignment(data, assign, k);
    return result;
}

}  // namespace pac
