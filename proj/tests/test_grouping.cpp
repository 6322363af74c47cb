#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pac/grouping.hpp"
#include "test_util.hpp"

using namespace pac;
using namespace pac::testing;

namespace {

double oracle_group_move(const std::vector<ClusterSummary>& atoms, std::vector<int> labels,
                         int n_groups, int atom, int target, double lambda_g) {
    const double before = group_energy_of_labels(atoms, labels, lambda_g);
    labels[static_cast<std::size_t>(atom)] = target == n_groups ? n_groups : target;
    const double after = group_energy_of_labels(atoms, labels, lambda_g);
    return after - before;
}

/// Atoms built from real points so the set and point energies can be compared.
struct PointBackedAtoms {
    Dataset data;
    std::vector<ClusterSummary> atoms;
    std::vector<int> point_atom;
};

PointBackedAtoms atoms_of_identical_points(RngStream& rng, int n_atoms, Index dim) {
    PointBackedAtoms out;
    std::vector<RowVec> rows;
    std::vector<Index> sizes;
    for (int a = 0; a < n_atoms; ++a) {
        RowVec center(dim);
        for (Index d = 0; d < dim; ++d) center(d) = rng.uniform(-2.0, 2.0);
        const Index m = 1 + static_cast<Index>(rng.below(4));
        sizes.push_back(m);
        for (Index i = 0; i < m; ++i) {
            rows.push_back(center);
            out.point_atom.push_back(a);
        }
    }
    PointMatrix pts(static_cast<Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i) pts.row(static_cast<Index>(i)) = rows[i];
    out.data = Dataset(std::move(pts));
    Index cursor = 0;
    for (Index m : sizes) {
        out.atoms.push_back(cluster_stats(out.data.points.middleRows(cursor, m)));
        cursor += m;
    }
    return out;
}

}  // namespace

TEST_CASE("group_energy") {
    SUBCASE("one group holding one cluster") {
        RngStream rng(1);
        auto atoms = random_atoms(rng, 1, 2, 6);
        const double e = group_energy(atoms, grouping_from_labels(atoms, {0}), 3.0).total;
        CHECK(e == doctest::Approx(3.0 / static_cast<double>(atoms[0].size)));
    }
    SUBCASE("singleton clusters reduce to the point energy") {
        RngStream rng(2);
        const SmallInstance inst = random_instance(rng, 8, 3, 2);
        std::vector<ClusterSummary> atoms;
        for (Index i = 0; i < inst.data.size(); ++i)
            atoms.push_back(cluster_stats(inst.data.points.middleRows(i, 1)));
        const double lambda = 1.7;
        const double eg = group_energy_of_labels(atoms, inst.labels, lambda);
        const double erkm = energy_of_labels(inst.data, inst.labels, lambda);
        CHECK(close_rel(eg, erkm));
    }
    SUBCASE("zero-variance clusters make both energies equal") {
        RngStream rng(3);
        const PointBackedAtoms pb = atoms_of_identical_points(rng, 6, 2);
        std::vector<int> group_labels{0, 1, 0, 2, 1, 0};
        std::vector<int> point_labels;
        for (int a : pb.point_atom) point_labels.push_back(group_labels[static_cast<std::size_t>(a)]);
        const double lambda = 2.2;
        const double eg = group_energy_of_labels(pb.atoms, group_labels, lambda);
        const double erkm = energy_of_labels(pb.data, point_labels, lambda);
        CHECK(close_rel(eg, erkm));
    }
    SUBCASE("empty group rejected") {
        RngStream rng(4);
        auto atoms = random_atoms(rng, 3, 2, 6);
        Grouping g = grouping_from_labels(atoms, {0, 0, 1});
        g.groups.push_back(GroupSummary{});
        CHECK_THROWS_AS(group_energy(atoms, g, 1.0), std::invalid_argument);
    }
}

TEST_CASE("group move and new-group deltas match the oracle") {
    RngStream rng(17);
    for (int rep = 0; rep < 200; ++rep) {
        const int n_atoms = 2 + static_cast<int>(rng.below(5));
        auto atoms = random_atoms(rng, n_atoms, 2, 6);
        std::vector<int> labels(static_cast<std::size_t>(n_atoms));
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_atoms)));
        for (int a = 0; a < k; ++a) labels[static_cast<std::size_t>(a)] = a;
        for (int a = k; a < n_atoms; ++a)
            labels[static_cast<std::size_t>(a)] = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
        const Grouping grouping = grouping_from_labels(atoms, labels);
        const double lambda_g = rng.uniform(0.1, 10.0);

        for (int a = 0; a < n_atoms; ++a) {
            const int from = grouping.assignment[static_cast<std::size_t>(a)];
            for (int to = 0; to < grouping.k(); ++to) {
                if (to == from) continue;
                const double closed = group_move_delta(
                    atoms[static_cast<std::size_t>(a)],
                    grouping.groups[static_cast<std::size_t>(from)],
                    grouping.groups[static_cast<std::size_t>(to)], lambda_g);
                const double explicit_diff =
                    oracle_group_move(atoms, labels, grouping.k(), a, to, lambda_g);
                CHECK(close_rel(closed, explicit_diff));
            }
            // move into a fresh group
            const GroupSummary& from_group = grouping.groups[static_cast<std::size_t>(from)];
            if (from_group.size > atoms[static_cast<std::size_t>(a)].size) {
                const double closed =
                    group_new_delta(atoms[static_cast<std::size_t>(a)], from_group, lambda_g);
                const double explicit_diff =
                    oracle_group_move(atoms, labels, grouping.k(), a, grouping.k(), lambda_g);
                CHECK(close_rel(closed, explicit_diff));
            } else {
                CHECK(group_new_delta(atoms[static_cast<std::size_t>(a)], from_group, lambda_g) ==
                      0.0);
            }
        }
    }
}

TEST_CASE("group deltas reduce to point deltas on singleton clusters") {
    RngStream rng(23);
    const SmallInstance inst = random_instance(rng, 8, 3, 2);
    std::vector<ClusterSummary> atoms;
    for (Index i = 0; i < inst.data.size(); ++i)
        atoms.push_back(cluster_stats(inst.data.points.middleRows(i, 1)));
    const Grouping grouping = grouping_from_labels(atoms, inst.labels);
    const Partition partition = labels_to_partition(inst.data, inst.labels);
    const double lambda = 1.4;
    for (std::size_t a = 0; a < atoms.size(); ++a) {
        const int from = grouping.assignment[a];
        if (grouping.groups[static_cast<std::size_t>(from)].size < 2) continue;
        for (int to = 0; to < grouping.k(); ++to) {
            if (to == from) continue;
            const double set_delta =
                group_move_delta(atoms[a], grouping.groups[static_cast<std::size_t>(from)],
                                 grouping.groups[static_cast<std::size_t>(to)], lambda);
            const double point_delta = point_move_delta(
                inst.data.point(static_cast<Index>(a)),
                partition.clusters[static_cast<std::size_t>(from)],
                partition.clusters[static_cast<std::size_t>(to)], lambda);
            CHECK(close_rel(set_delta, point_delta));
        }
    }
}

TEST_CASE("group_new_delta boundary and zero-distance forms") {
    SUBCASE("zero distance to the group centroid") {
        ClusterSummary c;
        c.size = 3;
        c.centroid = RowVec::Zero(2);
        c.coord_sum = RowVec::Zero(2);
        GroupSummary g;
        g.size = 10;
        g.centroid = RowVec::Zero(2);
        g.coord_sum = RowVec::Zero(2);
        const double lambda_g = 2.0;
        const double expected = lambda_g * 3.0 / (10.0 * 7.0) + lambda_g / 3.0;
        CHECK(group_new_delta(c, g, lambda_g) == doctest::Approx(expected));
        CHECK(group_new_delta(c, g, lambda_g) > 0.0);
    }
    SUBCASE("zero exactly at the distance bound") {
        // Vanishes when dist^2 = lambda_g * (1/|C|^2 - 1/(|C||G|) + 1/|G|^2).
        const double lambda_g = 5.0;
        for (auto [m, s] : std::vector<std::pair<Index, Index>>{{1, 4}, {2, 7}, {3, 9}}) {
            const double md = static_cast<double>(m);
            const double sd = static_cast<double>(s);
            const double bound = lambda_g * (1.0 / (md * md) - 1.0 / (md * sd) + 1.0 / (sd * sd));
            ClusterSummary c;
            c.size = m;
            c.centroid = RowVec(2);
            c.centroid << std::sqrt(bound), 0.0;
            c.coord_sum = c.centroid * md;
            GroupSummary g;
            g.size = s;
            g.centroid = RowVec::Zero(2);
            CHECK(std::abs(group_new_delta(c, g, lambda_g)) < 1e-12 * lambda_g);
        }
    }
}

TEST_CASE("regularized_set_kmeans") {
    SUBCASE("single cluster in, single group out") {
        RngStream rng(6);
        auto atoms = random_atoms(rng, 1, 2, 6);
        const GroupingResult r = regularized_set_kmeans(atoms, {1.0, 0.0, 100});
        CHECK(r.grouping.k() == 1);
    }
    SUBCASE("two far bundles split into two groups below the cohabitation bound") {
        RngStream rng(8);
        std::vector<ClusterSummary> atoms;
        auto add_atom = [&](double cx, double cy, Index size) {
            ClusterSummary c;
            c.size = size;
            c.centroid = RowVec(2);
            c.centroid << cx, cy;
            c.coord_sum = c.centroid * static_cast<double>(size);
            atoms.push_back(std::move(c));
        };
        add_atom(0.0, 0.0, 6);
        add_atom(0.15, 0.05, 5);
        add_atom(-0.1, 0.1, 7);
        add_atom(10.0, 0.0, 6);
        add_atom(10.1, -0.1, 5);
        add_atom(9.9, 0.12, 7);
        const double lambda_g = 50.0;
        // Necessary cohabitation condition: dist^2 <= lambda_g * (1/|C|^2 +
        // 1/(|C||G|) + 1/|G|^2). The loosest case here allows dist <= ~2.6,
        // far below the ~10 bundle separation.
        Index total = 0;
        for (const auto& a : atoms) total += a.size;
        double loosest = 0.0;
        for (const auto& a : atoms) {
            const double m = static_cast<double>(a.size);
            const double s = static_cast<double>(total);
            loosest = std::max(loosest, lambda_g * (1.0 / (m * m) + 1.0 / (m * s) + 1.0 / (s * s)));
        }
        CHECK(loosest < 100.0 * 0.9);

        const GroupingResult r = regularized_set_kmeans(atoms, {lambda_g, 0.0, 100});
        REQUIRE(r.grouping.k() == 2);
        CHECK(r.grouping.assignment[0] == r.grouping.assignment[1]);
        CHECK(r.grouping.assignment[0] == r.grouping.assignment[2]);
        CHECK(r.grouping.assignment[3] == r.grouping.assignment[4]);
        CHECK(r.grouping.assignment[3] == r.grouping.assignment[5]);
        CHECK(r.grouping.assignment[0] != r.grouping.assignment[3]);

        // oracle enumeration of every 2-group assignment: the bundle split is
        // the best, and the solver found it
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_labels;
        for (int mask = 1; mask < 31; ++mask) {
            std::vector<int> labels(6, 0);
            for (int b = 0; b < 5; ++b)
                if (mask & (1 << b)) labels[static_cast<std::size_t>(b + 1)] = 1;
            const double e = group_energy_of_labels(atoms, labels, lambda_g);
            if (e < best) {
                best = e;
                best_labels = labels;
            }
        }
        CHECK(best_labels == std::vector<int>{0, 0, 0, 1, 1, 1});
        CHECK(close_rel(r.final_energy, best));
    }
    SUBCASE("distance bound at convergence") {
        RngStream rng(9);
        for (int rep = 0; rep < 20; ++rep) {
            auto atoms = random_atoms(rng, 12, 2, 8);
            const double lambda_g = rng.uniform(0.5, 30.0);
            const GroupingResult r = regularized_set_kmeans(atoms, {lambda_g, 0.0, 100});
            CHECK(r.converged);
            validate_grouping(atoms, r.grouping);
            for (const SweepStats& sweep : r.trace)
                CHECK(close_rel(sweep.tracked_energy, sweep.exact_energy, 1e-9));
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                const GroupSummary& g =
                    r.grouping.groups[static_cast<std::size_t>(r.grouping.assignment[a])];
                const double m = static_cast<double>(atoms[a].size);
                const double d2 = (g.centroid - atoms[a].centroid).squaredNorm();
                CHECK(d2 <= lambda_g / (m * m) * (1.0 + 1e-9) + 1e-12);
            }
        }
    }
    SUBCASE("group variance decomposition bound at convergence") {
        RngStream rng(10);
        // atoms carved from real points so group variance can be recomputed
        PointMatrix pts(240, 2);
        for (Index i = 0; i < pts.rows(); ++i) {
            const double cx = (i < 120) ? 0.0 : 6.0;
            pts(i, 0) = cx + 0.5 * rng.normal();
            pts(i, 1) = 0.5 * rng.normal();
        }
        const Dataset data{std::move(pts)};
        std::vector<ClusterSummary> atoms;
        std::vector<int> point_atom(240);
        for (int a = 0; a < 24; ++a) {
            atoms.push_back(cluster_stats(data.points.middleRows(a * 10, 10)));
            for (int i = 0; i < 10; ++i) point_atom[static_cast<std::size_t>(a * 10 + i)] = a;
        }
        const double lambda_g = 40.0;
        const GroupingResult r = regularized_set_kmeans(atoms, {lambda_g, 0.0, 100});
        for (int g = 0; g < r.grouping.k(); ++g) {
            const GroupSummary& group = r.grouping.groups[static_cast<std::size_t>(g)];
            // direct variance from raw points
            double direct = 0.0;
            for (Index p = 0; p < data.size(); ++p)
                if (r.grouping.assignment[static_cast<std::size_t>(
                        point_atom[static_cast<std::size_t>(p)])] == g)
                    direct += (data.point(p) - group.centroid).squaredNorm();
            direct /= static_cast<double>(group.size);
            // decomposition over member clusters
            double decomposed = 0.0;
            double bound = 0.0;
            for (int id : group.member_clusters) {
                const ClusterSummary& c = atoms[static_cast<std::size_t>(id)];
                const double m = static_cast<double>(c.size);
                decomposed +=
                    m * ((group.centroid - c.centroid).squaredNorm() + c.variance());
                bound += lambda_g / m + m * c.variance();
            }
            decomposed /= static_cast<double>(group.size);
            bound /= static_cast<double>(group.size);
            CHECK(close_rel(direct, decomposed));
            CHECK(direct <= bound * (1.0 + 1e-9));
        }
    }
}
