#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pac/types.hpp"
#include "test_util.hpp"

using namespace pac;
using namespace pac::testing;

TEST_CASE("global_energy on hand-evaluated instances") {
    SUBCASE("single point in its own cluster") {
        const Dataset data = make_dataset({{0.0, 0.0}});
        const Partition p = labels_to_partition(data, {0});
        const EnergyValue e = global_energy(data, p, 1.0);
        CHECK(e.regularization_term == doctest::Approx(1.0));
        CHECK(e.fitting_term == doctest::Approx(0.0));
        CHECK(e.total == doctest::Approx(1.0));
    }
    SUBCASE("two points, one cluster") {
        const Dataset data = make_dataset({{0.0, 0.0}, {2.0, 0.0}});
        const EnergyValue e = global_energy(data, labels_to_partition(data, {0, 0}), 1.0);
        CHECK(e.regularization_term == doctest::Approx(0.5));
        CHECK(e.fitting_term == doctest::Approx(2.0));
        CHECK(e.total == doctest::Approx(2.5));
    }
    SUBCASE("two singleton clusters") {
        const Dataset data = make_dataset({{0.0, 0.0}, {2.0, 0.0}});
        const EnergyValue e = global_energy(data, labels_to_partition(data, {0, 1}), 1.0);
        CHECK(e.regularization_term == doctest::Approx(2.0));
        CHECK(e.fitting_term == doctest::Approx(0.0));
        CHECK(e.total == doctest::Approx(2.0));
    }
    SUBCASE("empty cluster rejected") {
        const Dataset data = make_dataset({{0.0, 0.0}, {2.0, 0.0}});
        Partition p = labels_to_partition(data, {0, 0});
        p.member_lists.push_back({});
        p.clusters.push_back(p.clusters.front());
        CHECK_THROWS_AS(global_energy(data, p, 1.0), std::invalid_argument);
    }
}

TEST_CASE("cluster_stats") {
    SUBCASE("single point") {
        const Dataset data = make_dataset({{0.0, 0.0}});
        const ClusterSummary s = cluster_stats(data.points);
        CHECK(s.size == 1);
        CHECK(s.centroid(0) == doctest::Approx(0.0));
        CHECK(s.scatter == doctest::Approx(0.0));
        CHECK(s.radius_rho == doctest::Approx(0.0));
    }
    SUBCASE("two points") {
        const Dataset data = make_dataset({{0.0, 0.0}, {2.0, 0.0}});
        const ClusterSummary s = cluster_stats(data.points);
        CHECK(s.centroid(0) == doctest::Approx(1.0));
        CHECK(s.centroid(1) == doctest::Approx(0.0));
        CHECK(s.scatter == doctest::Approx(2.0));
        CHECK(s.radius_rho == doctest::Approx(1.0));
    }
    SUBCASE("identical points have zero spread") {
        const Dataset data = make_dataset({{1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0}});
        const ClusterSummary s = cluster_stats(data.points);
        CHECK(s.centroid(0) == doctest::Approx(1.0));
        CHECK(s.scatter == doctest::Approx(0.0));
        CHECK(s.radius_rho == doctest::Approx(0.0));
    }
    SUBCASE("empty list rejected") {
        PointMatrix empty(0, 2);
        CHECK_THROWS_AS(cluster_stats(Eigen::Ref<const PointMatrix>(empty)), std::invalid_argument);
    }
    SUBCASE("rho is bounded by sqrt of scatter") {
        RngStream rng(11);
        for (int rep = 0; rep < 50; ++rep) {
            const SmallInstance inst = random_instance(rng, 8, 1, 3);
            const ClusterSummary s = cluster_stats(inst.data.points);
            CHECK(s.radius_rho <= std::sqrt(s.scatter) + 1e-12);
        }
    }
}

TEST_CASE("summary_apply") {
    SUBCASE("add to empty") {
        ClusterSummary empty;
        empty.coord_sum = RowVec::Zero(2);
        empty.centroid = RowVec::Zero(2);
        RowVec x(2);
        x << 2.0, 0.0;
        const ClusterSummary s = summary_apply(empty, x, Apply::add);
        CHECK(s.size == 1);
        CHECK(s.centroid(0) == doctest::Approx(2.0));
        CHECK(s.rho_stale);
    }
    SUBCASE("add then remove restores") {
        const Dataset data = make_dataset({{0.5, -1.0}, {1.5, 2.0}, {-0.5, 0.25}});
        const ClusterSummary base = cluster_stats(data.points);
        RowVec x(2);
        x << 3.0, 4.0;
        const ClusterSummary back = summary_apply(summary_apply(base, x, Apply::add), x, Apply::remove);
        CHECK(back.size == base.size);
        CHECK(back.centroid(0) == doctest::Approx(base.centroid(0)));
        CHECK(back.centroid(1) == doctest::Approx(base.centroid(1)));
        CHECK(back.scatter == doctest::Approx(base.scatter));
    }
    SUBCASE("add matches cluster_stats") {
        const Dataset one = make_dataset({{0.0, 0.0}});
        const Dataset two = make_dataset({{0.0, 0.0}, {2.0, 0.0}});
        RowVec x(2);
        x << 2.0, 0.0;
        const ClusterSummary inc = summary_apply(cluster_stats(one.points), x, Apply::add);
        const ClusterSummary full = cluster_stats(two.points);
        CHECK(inc.size == full.size);
        CHECK(inc.centroid(0) == doctest::Approx(full.centroid(0)));
        CHECK(inc.scatter == doctest::Approx(full.scatter));
    }
    SUBCASE("remove from empty rejected") {
        ClusterSummary empty;
        empty.coord_sum = RowVec::Zero(2);
        empty.centroid = RowVec::Zero(2);
        RowVec x(2);
        x << 1.0, 1.0;
        CHECK_THROWS_AS(summary_apply(empty, x, Apply::remove), std::invalid_argument);
    }
}

TEST_CASE("summary_apply folding matches cluster_stats on random sets") {
    RngStream rng(7);
    for (int rep = 0; rep < 100; ++rep) {
        const SmallInstance inst = random_instance(rng, 8, 1, 3);
        ClusterSummary acc;
        acc.coord_sum = RowVec::Zero(inst.data.dim());
        acc.centroid = RowVec::Zero(inst.data.dim());
        for (Index i = 0; i < inst.data.size(); ++i)
            acc = summary_apply(acc, inst.data.point(i), Apply::add);
        const ClusterSummary full = cluster_stats(inst.data.points);
        CHECK(close_rel(acc.scatter, full.scatter, 1e-9));
        CHECK((acc.centroid - full.centroid).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("centroid sums are order independent to tolerance") {
    const Index n = 10000;
    RngStream rng(13);
    PointMatrix pts(n, 2);
    for (Index i = 0; i < n; ++i) {
        pts(i, 0) = rng.uniform(-5.0, 5.0);
        pts(i, 1) = rng.uniform(-5.0, 5.0);
    }
    Dataset data{std::move(pts)};
    ClusterSummary forward;
    forward.coord_sum = RowVec::Zero(2);
    forward.centroid = RowVec::Zero(2);
    for (Index i = 0; i < n; ++i) forward = summary_apply(forward, data.point(i), Apply::add);

    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    rng.shuffle(order);
    ClusterSummary permuted;
    permuted.coord_sum = RowVec::Zero(2);
    permuted.centroid = RowVec::Zero(2);
    for (Index i : order) permuted = summary_apply(permuted, data.point(i), Apply::add);

    CHECK((forward.centroid - permuted.centroid).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(close_rel(forward.scatter, permuted.scatter, 1e-7));
}

TEST_CASE("partition validation") {
    const Dataset data = make_dataset({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}});
    const Partition good = labels_to_partition(data, {0, 0, 1});
    CHECK_NOTHROW(validate_partition(data, good));

    Partition bad = good;
    bad.clusters[0].centroid(0) += 0.5;
    CHECK_THROWS_AS(validate_partition(data, bad), std::invalid_argument);

    Partition overlap = good;
    overlap.member_lists[1].push_back(0);
    CHECK_THROWS_AS(validate_partition(data, overlap), std::invalid_argument);
}

TEST_CASE("non-finite data rejected") {
    Dataset data = make_dataset({{0.0, 1.0}, {2.0, 3.0}});
    data.points(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate_dataset(data), NumericError);
}
