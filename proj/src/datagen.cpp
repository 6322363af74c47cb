#include "pac/datagen.hpp"

#include "pac/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pac {

namespace {

PointMatrix sqrt_psd(const PointMatrix& cov) {
    if (cov.rows() != cov.cols()) throw std::invalid_argument("mixture: covariance must be square");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("mixture: covariance must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::VectorXd evals = solver.eigenvalues();
    const double scale = std::max(1.0, evals.cwiseAbs().maxCoeff());
    for (Index i = 0; i < evals.size(); ++i) {
        if (evals(i) < -1e-12 * scale)
            throw std::invalid_argument("mixture: covariance is not positive semi-definite");
        if (evals(i) < 0.0) evals(i) = 0.0;
    }
    return solver.eigenvectors() * evals.cwiseSqrt().asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

Dataset gen_gaussian_mixture(const MixtureSpec& spec) {
    if (spec.components.empty()) throw std::invalid_argument("mixture: no components");
    const Index dim = spec.components.front().mean.cols();
    Index total = 0;
    for (const auto& comp : spec.components) {
        if (comp.count < 1) throw std::invalid_argument("mixture: component count must be >= 1");
        if (comp.mean.cols() != dim) throw std::invalid_argument("mixture: dimension mismatch");
        total += comp.count;
    }
    RngStream rng(derive_seed(spec.seed, "mixture"));
    PointMatrix points(total, dim);
    Index row = 0;
    RowVec z(dim);
    for (const auto& comp : spec.components) {
        const PointMatrix transform = sqrt_psd(comp.cov);
        for (Index i = 0; i < comp.count; ++i, ++row) {
            for (Index d = 0; d < dim; ++d) z(d) = rng.normal();
            points.row(row) = comp.mean + z * transform.transpose();
        }
    }
    return Dataset(std::move(points));
}

Dataset gen_concentric_rings(const RingSpec& spec) {
    if (spec.radii.empty()) throw std::invalid_argument("rings: no radii");
    if (spec.radii.size() != spec.counts.size())
        throw std::invalid_argument("rings: radii/counts size mismatch");
    for (std::size_t i = 1; i < spec.radii.size(); ++i)
        if (spec.radii[i] <= spec.radii[i - 1])
            throw std::invalid_argument("rings: radii must be strictly increasing");
    Index total = 0;
    for (Index c : spec.counts) {
        if (c < 1) throw std::invalid_argument("rings: ring count must be >= 1");
        total += c;
    }
    RngStream rng(derive_seed(spec.seed, "rings"));
    PointMatrix points(total, 2);
    Index row = 0;
    for (std::size_t ring = 0; ring < spec.radii.size(); ++ring) {
        for (Index i = 0; i < spec.counts[ring]; ++i, ++row) {
            const double theta = rng.uniform(spec.theta_min, spec.theta_max);
            const double r = spec.radii[ring] + spec.radial_sigma * rng.normal();
            if (spec.polar_output) {
                points(row, 0) = r;
                points(row, 1) = theta;
            } else {
                points(row, 0) = r * std::cos(theta);
                points(row, 1) = r * std::sin(theta);
            }
        }
    }
    return Dataset(std::move(points));
}

namespace {

MixtureSpec::Component isotropic(double mx, double my, double sigma, Index count) {
    MixtureSpec::Component c;
    c.mean = RowVec(2);
    c.mean << mx, my;
    c.cov = PointMatrix::Identity(2, 2) * sigma * sigma;
    c.count = count;
    return c;
}

}  // namespace

MixtureSpec canonical_fig2_mixture(std::uint64_t seed, Index total_points) {
    // Three overlapping sources in the lower-left quadrant and one well
    // separated source; ambiguous between the 2- and 4-cluster readings.
    MixtureSpec spec;
    spec.seed = seed;
    const Index quarter = total_points / 4;
    const double sigma = 0.06;
    spec.components.push_back(isotropic(0.3000, 0.3000, sigma, quarter));
    spec.components.push_back(isotropic(0.5450, 0.3000, sigma, quarter));
    spec.components.push_back(isotropic(0.4225, 0.5122, sigma, quarter));
    spec.components.push_back(isotropic(0.8500, 0.8500, sigma, total_points - 3 * quarter));
    return spec;
}

RingSpec canonical_rings(std::uint64_t seed, Index total_points) {
    RingSpec spec;
    spec.seed = seed;
    spec.radii = {1.0, 2.0, 3.0};
    spec.radial_sigma = 0.1;
    spec.polar_output = true;
    const double total_r = 6.0;
    Index assigned = 0;
    for (double r : spec.radii) {
        const Index c = static_cast<Index>(static_cast<double>(total_points) * r / total_r);
        spec.counts.push_back(c);
        assigned += c;
    }
    spec.counts.back() += total_points - assigned;
    return spec;
}

std::vector<MixtureSpec> streaming_arrival_schedule(int steps, Index batch_size,
                                                    std::uint64_t seed) {
    if (steps < 1) throw std::invalid_argument("schedule: need at least one step");
    const double sigma = 0.06;
    std::vector<MixtureSpec> schedule;
    schedule.reserve(static_cast<std::size_t>(steps));
    for (int t = 1; t <= steps; ++t) {
        double wa, wb, wc;
        if (t <= 5) {
            wa = 0.5; wb = 0.5; wc = 0.0;
        } else if (t <= 10) {
            wa = 0.1; wb = 0.1; wc = 0.8;
        } else {
            wa = 0.02; wb = 0.03; wc = 0.05;
        }
        MixtureSpec spec;
        spec.seed = derive_seed(seed, "schedule", static_cast<std::uint64_t>(t));
        const Index na = static_cast<Index>(wa * static_cast<double>(batch_size));
        const Index nb = static_cast<Index>(wb * static_cast<double>(batch_size));
        const Index nc = static_cast<Index>(wc * static_cast<double>(batch_size));
        const Index nd = batch_size - na - nb - nc;
        if (na > 0) spec.components.push_back(isotropic(0.9, 0.1, sigma, na));
        if (nb > 0) spec.components.push_back(isotropic(0.1, 0.9, sigma, nb));
        if (nc > 0) spec.components.push_back(isotropic(0.9, 0.4, sigma, nc));
        if (nd > 0) spec.components.push_back(isotropic(0.5, 0.5, sigma, nd));
        schedule.push_back(std::move(spec));
    }
    return schedule;
}

}  // namespace pac
