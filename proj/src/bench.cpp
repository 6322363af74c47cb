#include "pac/bench.hpp"

#include "pac/rng.hpp"

#include <cmath>

namespace pac {

namespace {

RowVec row_from_json(const nlohmann::json& j) {
    RowVec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j[i].get<double>();
    return v;
}

}  // namespace

MixtureSpec mixture_spec_from_json(const nlohmann::json& j) {
    MixtureSpec spec;
    spec.seed = j.value("seed", 0ull);
    if (!j.contains("components") || !j["components"].is_array() || j["components"].empty())
        throw IoError("mixture spec: missing components");
    for (const auto& comp_json : j["components"]) {
        MixtureSpec::Component comp;
        comp.mean = row_from_json(comp_json.at("mean"));
        const Index dim = comp.mean.cols();
        comp.count = comp_json.at("count").get<Index>();
        if (comp_json.contains("cov")) {
            const auto& cov = comp_json["cov"];
            comp.cov = PointMatrix(dim, dim);
            for (Index r = 0; r < dim; ++r)
                for (Index c = 0; c < dim; ++c)
                    comp.cov(r, c) = cov.at(static_cast<std::size_t>(r))
                                        .at(static_cast<std::size_t>(c))
                                        .get<double>();
        } else if (comp_json.contains("diag")) {
            comp.cov = PointMatrix::Zero(dim, dim);
            const auto& diag = comp_json["diag"];
            for (Index d = 0; d < dim; ++d)
                comp.cov(d, d) = diag.at(static_cast<std::size_t>(d)).get<double>();
        } else {
            const double sigma = comp_json.value("sigma", 0.0);
            comp.cov = PointMatrix::Identity(dim, dim) * sigma * sigma;
        }
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

RingSpec ring_spec_from_json(const nlohmann::json& j) {
    RingSpec spec;
    spec.seed = j.value("seed", 0ull);
    if (!j.contains("radii")) throw IoError("ring spec: missing radii");
    for (const auto& r : j["radii"]) spec.radii.push_back(r.get<double>());
    if (j.contains("counts")) {
        for (const auto& c : j["counts"]) spec.counts.push_back(c.get<Index>());
    } else if (j.contains("points")) {
        const auto total = j["points"].get<Index>();
        double total_r = 0.0;
        for (double r : spec.radii) total_r += r;
        Index assigned = 0;
        for (double r : spec.radii) {
            const Index c = static_cast<Index>(static_cast<double>(total) * r / total_r);
            spec.counts.push_back(c);
            assigned += c;
        }
        spec.counts.back() += total - assigned;
    } else {
        throw IoError("ring spec: need counts or points");
    }
    spec.radial_sigma = j.value("radial_sigma", 0.1);
    spec.theta_min = j.value("theta_min", 0.0);
    spec.theta_max = j.value("theta_max", 6.283185307179586);
    spec.polar_output = j.value("polar", true);
    return spec;
}

Dataset dataset_from_generator_json(const nlohmann::json& j) {
    if (j.contains("canonical")) {
        const std::string name = j["canonical"].get<std::string>();
        const auto seed = j.value("seed", 42ull);
        if (name == "fig2")
            return gen_gaussian_mixture(canonical_fig2_mixture(seed, j.value("points", Index{200000})));
        if (name == "rings")
            return gen_concentric_rings(canonical_rings(seed, j.value("points", Index{100000})));
        throw IoError("generator: unknown canonical dataset '" + name + "'");
    }
    const std::string type = j.value("type", "");
    if (type == "mixture") return gen_gaussian_mixture(mixture_spec_from_json(j));
    if (type == "rings") return gen_concentric_rings(ring_spec_from_json(j));
    throw IoError("generator: need canonical or type mixture|rings");
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec spec;
    spec.name = j.value("name", "scenario");
    if (!j.contains("generator")) throw IoError("scenario: missing generator");
    spec.generator = j["generator"];
    if (j.contains("pairs")) {
        for (const auto& p : j["pairs"])
            spec.cells.emplace_back(p.at("lambda_c").get<double>(), p.at("epsilon").get<double>());
    } else if (j.contains("grid")) {
        for (const auto& lc : j["grid"].at("lambda_c"))
            for (const auto& eps : j["grid"].at("epsilon"))
                spec.cells.emplace_back(lc.get<double>(), eps.get<double>());
    } else {
        throw IoError("scenario: need pairs or grid");
    }
    if (spec.cells.empty()) throw IoError("scenario: empty grid");
    spec.trials = j.value("trials", 1);
    spec.threads = j.value("threads", 16);
    spec.seed = j.value("seed", 0ull);
    spec.tol = j.value("tol", 0.0);
    spec.iter_max = j.value("iter_max", 100);
    if (spec.trials < 1) throw IoError("scenario: trials must be >= 1");
    return spec;
}

BenchReport run_benchmark(const ScenarioSpec& scenario) {
    const Dataset data = dataset_from_generator_json(scenario.generator);
    BenchReport report;
    report.scenario = scenario.name;
    report.n_points = data.size();

    for (std::size_t cell_idx = 0; cell_idx < scenario.cells.size(); ++cell_idx) {
        GridCell cell;
        cell.lambda_c = scenario.cells[cell_idx].first;
        cell.epsilon = scenario.cells[cell_idx].second;
        for (int trial = 0; trial < scenario.trials; ++trial) {
            PacConfig config;
            config.n_threads = scenario.threads;
            config.lambda_c = cell.lambda_c;
            config.epsilon = cell.epsilon;
            config.tol = scenario.tol;
            config.iter_max = scenario.iter_max;
            config.seed = derive_seed(scenario.seed, "trial",
                                      cell_idx * static_cast<std::size_t>(scenario.trials) +
                                          static_cast<std::size_t>(trial));
            const PacResult result = pac_fit(data, config);

            TrialRecord rec;
            rec.trial = trial;
            rec.seed = config.seed;
            rec.k = result.k;
            rec.lambda_g = result.lambda_g;
            rec.parallel_clusters = result.parallel_phase.clusters;
            rec.grouping_clusters = result.grouping_phase.clusters;
            rec.parallel_seconds = result.parallel_phase.seconds;
            rec.grouping_seconds = result.grouping_phase.seconds;
            rec.refinement_seconds = result.refinement_phase.seconds;
            for (const RefineSweep& sweep : result.refine_trace) {
                rec.refine_relative_energy.push_back(sweep.energy / result.pre_refine_energy);
                rec.refine_fraction_moved.push_back(static_cast<double>(sweep.points_moved) /
                                                    static_cast<double>(data.size()));
            }
            cell.records.push_back(std::move(rec));
        }
        double sum = 0.0;
        for (const auto& rec : cell.records) sum += rec.k;
        cell.mean_k = sum / static_cast<double>(cell.records.size());
        double var = 0.0;
        for (const auto& rec : cell.records) {
            const double d = rec.k - cell.mean_k;
            var += d * d;
        }
        cell.std_k = std::sqrt(var / static_cast<double>(cell.records.size()));
        report.cells.push_back(std::move(cell));
    }
    return report;
}

nlohmann::json report_to_json(const BenchReport& report) {
    nlohmann::json j;
    j["scenario"] = report.scenario;
    j["points"] = report.n_points;
    nlohmann::json cells = nlohmann::json::array();
    for (const GridCell& cell : report.cells) {
        nlohmann::json records = nlohmann::json::array();
        for (const TrialRecord& rec : cell.records)
            records.push_back({{"trial", rec.trial},
                               {"seed", rec.seed},
                               {"k", rec.k},
                               {"lambda_g", rec.lambda_g},
                               {"parallel_clusters", rec.parallel_clusters},
                               {"grouping_clusters", rec.grouping_clusters},
                               {"parallel_seconds", rec.parallel_seconds},
                               {"grouping_seconds", rec.grouping_seconds},
                               {"refinement_seconds", rec.refinement_seconds},
                               {"refine_relative_energy", rec.refine_relative_energy},
                               {"refine_fraction_moved", rec.refine_fraction_moved}});
        cells.push_back({{"lambda_c", cell.lambda_c},
                         {"epsilon", cell.epsilon},
                         {"mean_k", cell.mean_k},
                         {"std_k", cell.std_k},
                         {"trials", std::move(records)}});
    }
    j["cells"] = std::move(cells);
    return j;
}

}  // namespace pac
