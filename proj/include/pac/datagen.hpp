#pragma once

#include "pac/types.hpp"

#include <cstdint>
#include <vector>

namespace pac {

/// Gaussian mixture specification; covariances may be rank deficient
/// (a zero covariance degenerates to repeated means).
struct MixtureSpec {
    struct Component {
        RowVec mean;
        PointMatrix cov;  // d x d, symmetric positive semi-definite
        Index count = 0;
    };
    std::vector<Component> components;
    std::uint64_t seed = 0;
};

/// Concentric rings with radial Gaussian noise and uniform angles. Points are
/// emitted either in the Cartesian plane or directly as (r, theta) rows.
struct RingSpec {
    std::vector<double> radii;  // strictly increasing
    std::vector<Index> counts;  // per ring
    double radial_sigma = 0.1;
    double theta_min = 0.0;
    double theta_max = 6.283185307179586;
    bool polar_output = true;
    std::uint64_t seed = 0;
};

Dataset gen_gaussian_mixture(const MixtureSpec& spec);
Dataset gen_concentric_rings(const RingSpec& spec);

/// Four Gaussians in the unit square, three of them in close proximity; the
/// canonical mixture used by the poorly-separated 2-d experiments.
MixtureSpec canonical_fig2_mixture(std::uint64_t seed = 42, Index total_points = 200000);

/// Three rings at radii 1, 2, 3 with radial sigma 0.1, counts proportional
/// to circumference; clustered in the (r, theta) plane.
RingSpec canonical_rings(std::uint64_t seed = 42, Index total_points = 100000);

/// The four-source arrival schedule for the time-dependent experiments:
/// sources A and B first, then mostly C, then nearly all D.
/// Returns one mixture spec per time step.
std::vector<MixtureSpec> streaming_arrival_schedule(int steps, Index batch_size,
                                                    std::uint64_t seed);

}  // namespace pac
