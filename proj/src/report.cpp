#include "spectral_match/report.hpp"

#include <vector>

namespace spectral_match {

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json shape_json(const ShapeSummary& s) {
    return {{"vertices", s.vertices},
            {"faces", s.faces},
            {"eigenvalues", to_vector(s.eigenvalues)},
            {"theta_min", s.dimension.theta_min},
            {"theta_reached", s.dimension.reached},
            {"selected_k", s.dimension.k},
            {"solver_iterations", s.solver_iterations}};
}

}  // namespace

nlohmann::json to_json(const PipelineConfig& c) {
    nlohmann::json j;
    j["weighting"] = c.weighting.kind == WeightingKind::uniform ? "uniform" : "gaussian";
    j["sigma"] = c.weighting.sigma ? nlohmann::json(*c.weighting.sigma) : nlohmann::json(nullptr);
    j["k"] = c.k ? nlohmann::json(*c.k) : nlohmann::json(nullptr);
    j["theta"] = c.theta;
    j["embedding"] = to_string(c.embedding);
    j["sig_threshold"] = c.sig_threshold;
    j["pi_out"] = c.em.pi_out;
    j["em_tol"] = c.em.tol;
    j["em_max_iter"] = c.em.max_iterations;
    j["seed"] = c.seed;
    return j;
}

nlohmann::json to_json(const EigenAlignment& a) {
    return {{"permutation", a.permutation.mapping}, {"signs", a.signs}, {"scores", a.scores},
            {"kept", a.kept},                       {"dropped", a.dropped}, {"threshold", a.threshold}};
}

nlohmann::json to_json(const Correspondence& c) {
    return {{"iterations", c.iterations},
            {"converged", c.converged},
            {"final_sigma", c.params.sigma},
            {"log_likelihood", c.log_likelihood},
            {"log_likelihood_trace", c.likelihood_trace},
            {"observed_log_likelihood_trace", c.observed_trace},
            {"sigma_trace", c.sigma_trace},
            {"rank_deficient", c.params.rank_deficient},
            {"pi_in", c.params.pi_in},
            {"pi_out", c.params.pi_out},
            {"log_uniform_const", c.params.log_uniform_const},
            {"matches", c.map_matches.size()},
            {"unmatched", c.unmatched.size()}};
}

nlohmann::json to_json(const MatchResult& r, const PipelineConfig& config) {
    return {{"config", to_json(config)},
            {"k", r.k},
            {"shape_a", shape_json(r.a)},
            {"shape_b", shape_json(r.b)},
            {"alignment", to_json(r.alignment)},
            {"em", to_json(r.correspondence)},
            {"warnings", r.warnings}};
}

nlohmann::json to_json(const ErrorReport& r) {
    return {{"mean", r.mean},
            {"median", r.median},
            {"max", r.max},
            {"units", "percent of geodesic diameter"},
            {"diameter", r.diameter},
            {"matched", r.matched},
            {"unmatched", r.unmatched},
            {"correct", r.correct},
            {"ground_truth", r.ground_truth},
            {"exact_match_rate", r.exact_rate()}};
}

nlohmann::json to_json(const IsoResult& r) {
    return {{"permutation", r.permutation.mapping},
            {"sign_matrix", to_vector(r.sign_matrix)},
            {"residual", r.residual},
            {"exact", r.exact},
            {"degenerate_spectrum", r.degenerate_spectrum}};
}

}  // namespace spectral_match
