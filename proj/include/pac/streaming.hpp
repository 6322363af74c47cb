#pragma once

#include "pac/pipeline.hpp"
#include "pac/types.hpp"

#include <iosfwd>
#include <string>

namespace pac {

/// Accumulated stream history: all data seen so far and the union of the
/// per-step parallel clusters, which stay frozen as the grouping atoms.
struct StreamState {
    Dataset accumulated;
    std::vector<ClusterSummary> atoms;
    std::vector<int> atom_of_point;
    Index first_batch_size = 0;
    int t = 0;
    PacConfig config;  // echo of the config in effect
    std::vector<double> lambda_g_history;
};

/// lambda_g^t = epsilon * (|X^t| / |C^t|)^2 * (|X^t| / |X^1|)^nu.
double lambda_g_time(double epsilon, Index x_t, Index c_t, Index x_1, double nu);

/// One time step: parallel clustering of the new batch only, then grouping
/// and refinement over all accumulated clusters and data.
PacResult stream_step(StreamState& state, const Dataset& new_batch, const PacConfig& config);

void state_save(const StreamState& state, std::ostream& out);
void state_save_file(const StreamState& state, const std::string& path);
StreamState state_load(std::istream& in);
StreamState state_load_file(const std::string& path);

}  // namespace pac
