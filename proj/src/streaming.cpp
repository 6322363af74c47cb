#include "pac/streaming.hpp"

#include "pac/rng.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>

namespace pac {

double lambda_g_time(double epsilon, Index x_t, Index c_t, Index x_1, double nu) {
    if (x_1 < 1) throw std::invalid_argument("lambda_g_time: first batch size must be >= 1");
    if (c_t < 1) throw std::invalid_argument("lambda_g_time: need at least one cluster");
    const double ratio = static_cast<double>(x_t) / static_cast<double>(c_t);
    const double growth = static_cast<double>(x_t) / static_cast<double>(x_1);
    return epsilon * ratio * ratio * std::pow(growth, nu);
}

PacResult stream_step(StreamState& state, const Dataset& new_batch, const PacConfig& config) {
    validate_dataset(new_batch);
    validate_config(config);
    if (state.t > 0 && new_batch.dim() != state.accumulated.dim())
        throw std::invalid_argument("stream_step: batch dimension does not match the state");

    const int t = state.t + 1;
    const Index old_n = state.t > 0 ? state.accumulated.size() : 0;

    // Parallel step on the new batch only, with the step's own split stream.
    const auto subsets =
        split_indices(new_batch.size(), config.n_threads, derive_seed(config.seed, "split",
                                                                      static_cast<std::uint64_t>(t)));
    ParallelPhase phase = run_parallel_phase(new_batch, subsets, config);

    // Append the batch and globalize the new clusters' point indices.
    PointMatrix merged(old_n + new_batch.size(), new_batch.dim());
    if (old_n > 0) merged.topRows(old_n) = state.accumulated.points;
    merged.bottomRows(new_batch.size()) = new_batch.points;
    state.accumulated = Dataset(std::move(merged));

    const int atom_base = static_cast<int>(state.atoms.size());
    for (auto& atom : phase.atoms) state.atoms.push_back(std::move(atom));
    state.atom_of_point.resize(static_cast<std::size_t>(state.accumulated.size()));
    for (Index i = 0; i < new_batch.size(); ++i)
        state.atom_of_point[static_cast<std::size_t>(old_n + i)] =
            atom_base + phase.atom_of_point[static_cast<std::size_t>(i)];

    if (t == 1) state.first_batch_size = new_batch.size();
    state.t = t;
    state.config = config;

    const double lambda_g =
        config.lambda_g_override > 0.0
            ? config.lambda_g_override
            : lambda_g_time(config.epsilon, state.accumulated.size(),
                            static_cast<Index>(state.atoms.size()), state.first_batch_size,
                            config.nu);
    state.lambda_g_history.push_back(lambda_g);

    PhaseTrace parallel_trace;
    parallel_trace.seconds = phase.seconds;
    parallel_trace.clusters = static_cast<int>(phase.atoms.size());
    return group_and_refine(state.accumulated, state.atoms, state.atom_of_point, lambda_g, config,
                            parallel_trace, std::move(phase.subset_cluster_counts),
                            phase.total_energy);
}

namespace {

constexpr char kMagic[8] = {'P', 'A', 'C', 'S', 'T', 'A', 'T', 'E'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
    T value;
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw IoError("state file: truncated");
    return value;
}

void write_vec(std::ostream& out, const RowVec& v) {
    write_pod<std::int64_t>(out, v.cols());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(sizeof(double)) * v.cols());
}

RowVec read_vec(std::istream& in) {
    const auto n = read_pod<std::int64_t>(in);
    if (n < 0 || n > (1 << 20)) throw IoError("state file: bad vector length");
    RowVec v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double)) * n);
    if (!in) throw IoError("state file: truncated");
    return v;
}

}  // namespace

void state_save(const StreamState& state, std::ostream& out) {
    out.write(kMagic, sizeof(kMagic));
    write_pod(out, kVersion);
    write_pod<std::int64_t>(out, state.accumulated.size());
    write_pod<std::int64_t>(out, state.t > 0 ? state.accumulated.dim() : 0);
    write_pod<std::int32_t>(out, state.t);
    write_pod<std::int64_t>(out, state.first_batch_size);

    write_pod<std::int32_t>(out, state.config.n_threads);
    write_pod(out, state.config.lambda_c);
    write_pod(out, state.config.epsilon);
    write_pod(out, state.config.nu);
    write_pod(out, state.config.tol);
    write_pod<std::int32_t>(out, state.config.iter_max);
    write_pod<std::uint64_t>(out, state.config.seed);
    write_pod(out, state.config.lambda_g_override);
    write_pod<std::int32_t>(out, state.config.max_workers);
    write_pod(out, state.config.audit_fraction);

    out.write(reinterpret_cast<const char*>(state.accumulated.points.data()),
              static_cast<std::streamsize>(sizeof(double)) * state.accumulated.points.size());
    for (int a : state.atom_of_point) write_pod<std::int32_t>(out, a);

    write_pod<std::int64_t>(out, static_cast<std::int64_t>(state.atoms.size()));
    for (const auto& atom : state.atoms) {
        write_pod<std::int64_t>(out, atom.size);
        write_vec(out, atom.coord_sum);
        write_vec(out, atom.centroid);
        write_pod(out, atom.scatter);
        write_pod(out, atom.radius_rho);
        write_pod<std::uint8_t>(out, atom.rho_stale ? 1 : 0);
    }
    write_pod<std::int64_t>(out, static_cast<std::int64_t>(state.lambda_g_history.size()));
    for (double l : state.lambda_g_history) write_pod(out, l);
    if (!out) throw IoError("state file: write failed");
}

StreamState state_load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("state file: bad magic");
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion) throw IoError("state file: unsupported version");

    StreamState state;
    const auto n = read_pod<std::int64_t>(in);
    const auto dim = read_pod<std::int64_t>(in);
    state.t = read_pod<std::int32_t>(in);
    state.first_batch_size = read_pod<std::int64_t>(in);
    if (n < 0 || dim < 0) throw IoError("state file: bad header");

    state.config.n_threads = read_pod<std::int32_t>(in);
    state.config.lambda_c = read_pod<double>(in);
    state.config.epsilon = read_pod<double>(in);
    state.config.nu = read_pod<double>(in);
    state.config.tol = read_pod<double>(in);
    state.config.iter_max = read_pod<std::int32_t>(in);
    state.config.seed = read_pod<std::uint64_t>(in);
    state.config.lambda_g_override = read_pod<double>(in);
    state.config.max_workers = read_pod<std::int32_t>(in);
    state.config.audit_fraction = read_pod<double>(in);

    PointMatrix pts(n, dim);
    in.read(reinterpret_cast<char*>(pts.data()),
            static_cast<std::streamsize>(sizeof(double)) * pts.size());
    if (!in) throw IoError("state file: truncated");
    state.accumulated = Dataset(std::move(pts));

    state.atom_of_point.resize(static_cast<std::size_t>(n));
    for (auto& a : state.atom_of_point) a = read_pod<std::int32_t>(in);

    const auto n_atoms = read_pod<std::int64_t>(in);
    if (n_atoms < 0) throw IoError("state file: bad atom count");
    state.atoms.resize(static_cast<std::size_t>(n_atoms));
    for (auto& atom : state.atoms) {
        atom.size = read_pod<std::int64_t>(in);
        atom.coord_sum = read_vec(in);
        atom.centroid = read_vec(in);
        atom.scatter = read_pod<double>(in);
        atom.radius_rho = read_pod<double>(in);
        atom.rho_stale = read_pod<std::uint8_t>(in) != 0;
    }
    const auto n_hist = read_pod<std::int64_t>(in);
    if (n_hist < 0) throw IoError("state file: bad history length");
    state.lambda_g_history.resize(static_cast<std::size_t>(n_hist));
    for (auto& l : state.lambda_g_history) l = read_pod<double>(in);
    return state;
}

void state_save_file(const StreamState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open state file for writing: " + path);
    state_save(state, out);
}

StreamState state_load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open state file: " + path);
    return state_load(in);
}

}  // namespace pac
