#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "spectral_match/mesh.hpp"

namespace spectral_match {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Undirected weighted graph. Adjacency is symmetric with an empty diagonal.
struct Graph {
    int n = 0;
    SparseMatrix adjacency;
    Eigen::VectorXd degrees;
    double volume = 0.0;
};

struct WeightedEdge {
    int i;
    int j;
    double weight;
};

/// Builds a graph from an undirected edge list; duplicate edges are rejected.
Graph graph_from_edges(int n, const std::vector<WeightedEdge>& edges);

/// Graph from a dense symmetric non-negative matrix (diagonal ignored).
Graph graph_from_dense(const Eigen::MatrixXd& weights);

enum class WeightingKind { uniform, gaussian };

struct Weighting {
    WeightingKind kind = WeightingKind::gaussian;
    /// Gaussian scale. Unset means the mean mesh edge length.
    std::optional<double> sigma;

    static Weighting uniform() { return {WeightingKind::uniform, std::nullopt}; }
    static Weighting gaussian(std::optional<double> s = std::nullopt) { return {WeightingKind::gaussian, s}; }
};

/// Edge graph of a triangle mesh. w_ij = 1 (uniform) or exp(-|v_i - v_j|^2 / sigma^2).
/// Throws DisconnectedGraphError when the 1-skeleton has several components.
Graph build_graph(const Mesh& mesh, const Weighting& weighting);

/// Connected components ordered by their smallest vertex; each component sorted.
std::vector<std::vector<int>> connected_components(const Graph& graph);

/// Recomputes degrees and volume and checks symmetry / zero diagonal / non-negativity.
bool check_graph_invariants(const Graph& graph, double rel_tol = 1e-12);

}  // namespace spectral_match
