#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pac/datagen.hpp"
#include "test_util.hpp"

using namespace pac;
using namespace pac::testing;

TEST_CASE("gen_gaussian_mixture") {
    SUBCASE("zero covariance collapses onto the mean") {
        MixtureSpec spec;
        spec.seed = 4;
        MixtureSpec::Component comp;
        comp.mean = RowVec(2);
        comp.mean << 1.5, -2.0;
        comp.cov = PointMatrix::Zero(2, 2);
        comp.count = 50;
        spec.components.push_back(comp);
        const Dataset data = gen_gaussian_mixture(spec);
        REQUIRE(data.size() == 50);
        for (Index i = 0; i < data.size(); ++i) {
            CHECK(data.points(i, 0) == doctest::Approx(1.5));
            CHECK(data.points(i, 1) == doctest::Approx(-2.0));
        }
    }
    SUBCASE("component sample means land near the spec means") {
        MixtureSpec spec;
        spec.seed = 8;
        const std::vector<std::pair<double, double>> centers{
            {0.9, 0.1}, {0.1, 0.9}, {0.9, 0.4}, {0.5, 0.5}};
        for (auto [cx, cy] : centers) {
            MixtureSpec::Component comp;
            comp.mean = RowVec(2);
            comp.mean << cx, cy;
            comp.cov = PointMatrix::Identity(2, 2) * 0.05 * 0.05;
            comp.count = 2000;
            spec.components.push_back(comp);
        }
        const Dataset data = gen_gaussian_mixture(spec);
        Index row = 0;
        for (auto [cx, cy] : centers) {
            const RowVec mean = data.points.middleRows(row, 2000).colwise().mean();
            CHECK(std::abs(mean(0) - cx) < 0.05);
            CHECK(std::abs(mean(1) - cy) < 0.05);
            row += 2000;
        }
    }
    SUBCASE("full covariance shapes the sample") {
        MixtureSpec spec;
        spec.seed = 15;
        MixtureSpec::Component comp;
        comp.mean = RowVec::Zero(2);
        comp.cov = PointMatrix(2, 2);
        comp.cov << 1.0, 0.8, 0.8, 1.0;
        comp.count = 20000;
        spec.components.push_back(comp);
        const Dataset data = gen_gaussian_mixture(spec);
        const RowVec mean = data.points.colwise().mean();
        double cov_xy = 0.0;
        for (Index i = 0; i < data.size(); ++i)
            cov_xy += (data.points(i, 0) - mean(0)) * (data.points(i, 1) - mean(1));
        cov_xy /= static_cast<double>(data.size());
        CHECK(cov_xy == doctest::Approx(0.8).epsilon(0.05));
    }
    SUBCASE("seed reproducibility") {
        const Dataset a = gen_gaussian_mixture(canonical_fig2_mixture(7, 2000));
        const Dataset b = gen_gaussian_mixture(canonical_fig2_mixture(7, 2000));
        const Dataset c = gen_gaussian_mixture(canonical_fig2_mixture(8, 2000));
        CHECK(a.points == b.points);
        CHECK(a.points != c.points);
    }
    SUBCASE("indefinite covariance rejected") {
        MixtureSpec spec;
        MixtureSpec::Component comp;
        comp.mean = RowVec::Zero(2);
        comp.cov = PointMatrix(2, 2);
        comp.cov << 1.0, 0.0, 0.0, -0.5;
        comp.count = 10;
        spec.components.push_back(comp);
        CHECK_THROWS_AS(gen_gaussian_mixture(spec), std::invalid_argument);
    }
}

TEST_CASE("gen_concentric_rings") {
    SUBCASE("zero noise in polar space gives exact radii") {
        RingSpec spec;
        spec.radii = {1.0, 2.5};
        spec.counts = {40, 60};
        spec.radial_sigma = 0.0;
        spec.polar_output = true;
        spec.seed = 5;
        const Dataset data = gen_concentric_rings(spec);
        for (Index i = 0; i < 40; ++i) CHECK(data.points(i, 0) == doctest::Approx(1.0));
        for (Index i = 40; i < 100; ++i) CHECK(data.points(i, 0) == doctest::Approx(2.5));
        for (Index i = 0; i < 100; ++i) {
            CHECK(data.points(i, 1) >= 0.0);
            CHECK(data.points(i, 1) < 6.2832);
        }
    }
    SUBCASE("a Cartesian ring has its centroid near the origin, far from the points") {
        RingSpec spec;
        spec.radii = {3.0};
        spec.counts = {5000};
        spec.radial_sigma = 0.05;
        spec.polar_output = false;
        spec.seed = 6;
        const Dataset data = gen_concentric_rings(spec);
        const ClusterSummary s = cluster_stats(data.points);
        CHECK(s.centroid.norm() < 0.2);
        double min_dist = 1e9;
        for (Index i = 0; i < data.size(); ++i)
            min_dist = std::min(min_dist, (data.point(i) - s.centroid).norm());
        CHECK(min_dist > 2.0);
    }
    SUBCASE("canonical spec is valid and deterministic") {
        const RingSpec spec = canonical_rings(11, 5000);
        Index total = 0;
        for (Index c : spec.counts) total += c;
        CHECK(total == 5000);
        const Dataset a = gen_concentric_rings(spec);
        const Dataset b = gen_concentric_rings(spec);
        CHECK(a.points == b.points);
    }
    SUBCASE("non-increasing radii rejected") {
        RingSpec spec;
        spec.radii = {2.0, 1.0};
        spec.counts = {10, 10};
        CHECK_THROWS_AS(gen_concentric_rings(spec), std::invalid_argument);
    }
}

TEST_CASE("streaming arrival schedule") {
    const auto schedule = streaming_arrival_schedule(20, 2000, 3);
    REQUIRE(schedule.size() == 20);
    for (const auto& spec : schedule) {
        Index total = 0;
        for (const auto& comp : spec.components) total += comp.count;
        CHECK(total == 2000);
    }
    // early steps draw only from the first two sources
    CHECK(schedule[0].components.size() == 2);
    // late steps are dominated by the last source
    const auto& late = schedule[15];
    Index max_count = 0;
    for (const auto& comp : late.components) max_count = std::max(max_count, comp.count);
    CHECK(max_count >= 1600);
}
