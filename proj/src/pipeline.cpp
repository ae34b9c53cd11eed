#include "spectral_match/pipeline.hpp"

#include <algorithm>
#include <utility>

#include "spectral_match/error.hpp"
#include "spectral_match/laplacian.hpp"
#include "spectral_match/spectral.hpp"

namespace spectral_match {

EmbeddingSetting embedding_setting_from_string(const std::string& name) {
    if (name == "sm1" || name == "commute_time") return EmbeddingSetting::sm1;
    if (name == "sm2" || name == "hypersphere") return EmbeddingSetting::sm2;
    throw Error("unknown embedding setting '" + name + "' (expected sm1 or sm2)");
}

std::string to_string(EmbeddingSetting setting) { return setting == EmbeddingSetting::sm1 ? "sm1" : "sm2"; }

void PipelineConfig::validate() const {
    if (weighting.sigma && !(*weighting.sigma > 0.0)) throw Error("--sigma must be positive");
    if (k && *k < 1) throw Error("--k must be >= 1");
    if (!(theta > 0.0 && theta < 1.0)) throw Error("--theta must lie in (0, 1)");
    if (!(sig_threshold >= -1.0 && sig_threshold <= 1.0)) throw Error("--sig-threshold must lie in [-1, 1]");
    if (!(em.pi_out >= 0.0 && em.pi_out < 1.0)) throw Error("--pi-out must lie in [0, 1)");
    if (!(em.tol > 0.0)) throw Error("--em-tol must be positive");
    if (em.max_iterations < 1) throw Error("--em-max-iter must be >= 1");
}

namespace {

template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what());
    }
}

struct Prepared {
    Graph graph;
    Spectrum spectrum;
};

Prepared prepare(const Mesh& mesh, const PipelineConfig& config, int pairs) {
    Prepared p;
    p.graph = stage("graph", [&] { return build_graph(mesh, config.weighting); });
    const LaplacianMatrix lap = stage("laplacian", [&] { return assemble(p.graph, LaplacianKind::combinatorial); });
    p.spectrum = stage("spectral", [&] {
        EigsOptions opts;
        opts.seed = config.seed;
        return eigs_smallest(lap, pairs, opts);
    });
    return p;
}

ShapeSummary summarize(const Mesh& mesh, const Spectrum& spectrum, const PipelineConfig& config) {
    ShapeSummary s;
    s.vertices = mesh.vertex_count();
    s.faces = mesh.face_count();
    s.eigenvalues = spectrum.eigenvalues.tail(spectrum.size() - 1);
    s.solver_iterations = spectrum.iterations;
    s.dimension = stage("embedding", [&] { return select_dimension(s.eigenvalues, s.vertices, config.theta); });
    return s;
}

Embedding embed(const Spectrum& spectrum, const std::vector<int>& pairs, EmbeddingSetting setting) {
    Embedding e = commute_time_embedding(spectrum, pairs);
    return setting == EmbeddingSetting::sm2 ? normalize_hypersphere(e) : e;
}

int pair_budget(int n_a, int n_b, const PipelineConfig& config) {
    const int cap = std::min(n_a, n_b) - 1;
    if (cap < 1) throw StageError("spectral", "meshes need at least two vertices");
    if (config.k) {
        if (*config.k > cap) {
            throw StageError("spectral", "--k " + std::to_string(*config.k) + " exceeds n-1 = " + std::to_string(cap));
        }
        return *config.k;
    }
    return std::min(kMaxDimension, cap);
}

}  // namespace

MatchResult run_match(const Mesh& mesh_a, const Mesh& mesh_b, const PipelineConfig& config) {
    stage("config", [&] { config.validate(); return 0; });
    stage("mesh", [&] { validate(mesh_a); validate(mesh_b); return 0; });
    const int budget = pair_budget(mesh_a.vertex_count(), mesh_b.vertex_count(), config);
    const Prepared pa = prepare(mesh_a, config, budget);
    const Prepared pb = prepare(mesh_b, config, budget);

    MatchResult result;
    result.a = summarize(mesh_a, pa.spectrum, config);
    result.b = summarize(mesh_b, pb.spectrum, config);
    if (config.k) {
        result.k = *config.k;
    } else {
        result.k = std::max(result.a.dimension.k, result.b.dimension.k);
        if (!result.a.dimension.reached || !result.b.dimension.reached) {
            result.warnings.push_back("theta target " + std::to_string(config.theta) + " not reached within K <= " +
                                      std::to_string(budget) + "; using K = " + std::to_string(result.k));
        }
    }
    const int k = result.k;

    result.alignment = stage("alignment", [&] {
        AlignOptions opts;
        opts.threshold = config.sig_threshold;
        return align_embeddings(pa.spectrum.eigenvectors.middleCols(1, k), pb.spectrum.eigenvectors.middleCols(1, k),
                                opts);
    });
    const EigenAlignment& al = result.alignment;
    std::vector<int> pairs_b;
    for (int kk : al.kept) pairs_b.push_back(al.permutation.mapping[kk]);

    const Embedding xa = stage("embedding", [&] { return embed(pa.spectrum, al.kept, config.embedding); });
    const Embedding xb = stage("embedding", [&] { return embed(pb.spectrum, pairs_b, config.embedding); });
    result.correspondence =
        stage("em_registration", [&] { return em_register(xa.coords, xb.coords, al.initial_transform(), config.em); });
    if (result.correspondence.params.rank_deficient) result.warnings.push_back("EM cross-covariance was rank deficient");
    if (!result.correspondence.converged) result.warnings.push_back("EM stopped at the iteration limit");
    return result;
}

namespace {

EmbedResult embed_graph(const Graph& graph, const PipelineConfig& config) {
    const int n = graph.n;
    const int budget = pair_budget(n, n, config);
    const LaplacianMatrix lap = stage("laplacian", [&] { return assemble(graph, LaplacianKind::combinatorial); });
    const Spectrum spectrum = stage("spectral", [&] {
        EigsOptions opts;
        opts.seed = config.seed;
        return eigs_smallest(lap, budget, opts);
    });
    EmbedResult out;
    out.volume = graph.volume;
    const Eigen::VectorXd nonnull = spectrum.eigenvalues.tail(spectrum.size() - 1);
    out.dimension = stage("embedding", [&] { return select_dimension(nonnull, n, config.theta); });
    const int k = config.k ? *config.k : out.dimension.k;
    std::vector<int> pairs(k);
    for (int i = 0; i < k; ++i) pairs[i] = i;
    out.embedding = stage("embedding", [&] { return embed(spectrum, pairs, config.embedding); });
    return out;
}

}  // namespace

EmbedResult run_embed(const Mesh& mesh, const PipelineConfig& config) {
    stage("config", [&] { config.validate(); return 0; });
    stage("mesh", [&] { validate(mesh); return 0; });
    const Graph graph = stage("graph", [&] { return build_graph(mesh, config.weighting); });
    return embed_graph(graph, config);
}

EmbedResult run_embed(const Graph& graph, const PipelineConfig& config) {
    stage("config", [&] { config.validate(); return 0; });
    return embed_graph(graph, config);
}

}  // namespace spectral_match
