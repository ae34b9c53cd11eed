#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spectral_match/alignment.hpp"
#include "spectral_match/em_registration.hpp"
#include "spectral_match/embedding.hpp"
#include "spectral_match/graph.hpp"
#include "spectral_match/mesh.hpp"

namespace spectral_match {

enum class EmbeddingSetting { sm1, sm2 };  // commute-time, hypersphere

EmbeddingSetting embedding_setting_from_string(const std::string& name);
std::string to_string(EmbeddingSetting setting);

inline constexpr int kMaxDimension = 50;

struct PipelineConfig {
    Weighting weighting = Weighting::gaussian();
    std::optional<int> k;  // fixed dimension; otherwise chosen from theta
    double theta = 0.95;
    EmbeddingSetting embedding = EmbeddingSetting::sm2;
    double sig_threshold = kDefaultSignatureThreshold;
    EmOptions em;
    std::uint64_t seed = 0x5eed;

    /// Throws on out-of-range values.
    void validate() const;
};

struct ShapeSummary {
    int vertices = 0;
    int faces = 0;
    Eigen::VectorXd eigenvalues;  // non-null, ascending
    DimensionChoice dimension;
    int solver_iterations = 0;
};

struct MatchResult {
    int k = 0;
    ShapeSummary a, b;
    EigenAlignment alignment;
    Correspondence correspondence;
    std::vector<std::string> warnings;
};

/// Graph, Laplacian, eigenpairs, dimension, alignment, embedding, EM. Errors are
/// rethrown as StageError tagged with the failing stage.
MatchResult run_match(const Mesh& mesh_a, const Mesh& mesh_b, const PipelineConfig& config);

/// Embedding of a single mesh with the chosen dimension and its theta table.
struct EmbedResult {
    Embedding embedding;
    DimensionChoice dimension;
    double volume = 0.0;
};

EmbedResult run_embed(const Mesh& mesh, const PipelineConfig& config);
/// Same, starting from a weighted graph (e.g. an adjacency triplet file).
EmbedResult run_embed(const Graph& graph, const PipelineConfig& config);

}  // namespace spectral_match
