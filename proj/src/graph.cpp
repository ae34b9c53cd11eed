#include "spectral_match/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

Graph finish_graph(int n, std::vector<Eigen::Triplet<double>>& triplets) {
    Graph graph;
    graph.n = n;
    graph.adjacency.resize(n, n);
    graph.adjacency.setFromTriplets(triplets.begin(), triplets.end());
    graph.adjacency.makeCompressed();
    graph.degrees = Eigen::VectorXd::Zero(n);
    for (int col = 0; col < graph.adjacency.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(graph.adjacency, col); it; ++it) {
            graph.degrees[it.row()] += it.value();
        }
    }
    graph.volume = graph.degrees.sum();
    return graph;
}

}  // namespace

Graph graph_from_edges(int n, const std::vector<WeightedEdge>& edges) {
    if (n <= 0) throw Error("graph needs at least one vertex");
    std::vector<std::array<int, 2>> seen;
    seen.reserve(edges.size());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(2 * edges.size());
    for (const auto& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw Error("edge endpoint out of range");
        if (e.i == e.j) throw Error("self loops are not allowed");
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw Error("edge weights must be finite and >= 0");
        seen.push_back({std::min(e.i, e.j), std::max(e.i, e.j)});
        triplets.emplace_back(e.i, e.j, e.weight);
        triplets.emplace_back(e.j, e.i, e.weight);
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) throw Error("duplicate edge");
    return finish_graph(n, triplets);
}

Graph graph_from_dense(const Eigen::MatrixXd& weights) {
    if (weights.rows() != weights.cols()) throw Error("weight matrix must be square");
    const int n = static_cast<int>(weights.rows());
    std::vector<WeightedEdge> edges;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < j; ++i) {
            if (weights(i, j) != weights(j, i)) throw Error("weight matrix must be symmetric");
            if (weights(i, j) != 0.0) edges.push_back({i, j, weights(i, j)});
        }
    }
    return graph_from_edges(n, edges);
}

Graph build_graph(const Mesh& mesh, const Weighting& weighting) {
    validate(mesh);
    const auto edges = mesh_edges(mesh);
    double sigma = 1.0;
    if (weighting.kind == WeightingKind::gaussian) {
        sigma = weighting.sigma.value_or(mean_edge_length(mesh));
        if (!(sigma > 0.0) || !std::isfinite(sigma)) throw Error("gaussian sigma must be positive");
    }
    std::vector<WeightedEdge> weighted;
    weighted.reserve(edges.size());
    for (const auto& e : edges) {
        double w = 1.0;
        if (weighting.kind == WeightingKind::gaussian) {
            const double dist2 = (mesh.vertices[e[0]] - mesh.vertices[e[1]]).squaredNorm();
            w = std::exp(-dist2 / (sigma * sigma));
        }
        weighted.push_back({e[0], e[1], w});
    }
    Graph graph = graph_from_edges(mesh.vertex_count(), weighted);
    const auto components = connected_components(graph);
    if (components.size() > 1) throw DisconnectedGraphError(components.size());
    return graph;
}

std::vector<std::vector<int>> connected_components(const Graph& graph) {
    std::vector<int> label(graph.n, -1);
    std::vector<std::vector<int>> components;
    for (int start = 0; start < graph.n; ++start) {
        if (label[start] >= 0) continue;
        const int id = static_cast<int>(components.size());
        components.emplace_back();
        std::queue<int> frontier;
        frontier.push(start);
        label[start] = id;
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop();
            components[id].push_back(v);
            for (SparseMatrix::InnerIterator it(graph.adjacency, v); it; ++it) {
                const int u = static_cast<int>(it.row());
                if (label[u] < 0) {
                    label[u] = id;
                    frontier.push(u);
                }
            }
        }
        std::sort(components[id].begin(), components[id].end());
    }
    return components;
}

bool check_graph_invariants(const Graph& graph, double rel_tol) {
    const SparseMatrix& w = graph.adjacency;
    if (w.rows() != graph.n || w.cols() != graph.n) return false;
    const SparseMatrix wt = w.transpose();
    if ((w - wt).norm() != 0.0) return false;
    Eigen::VectorXd degrees = Eigen::VectorXd::Zero(graph.n);
    for (int col = 0; col < w.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(w, col); it; ++it) {
            if (it.row() == it.col() && it.value() != 0.0) return false;
            if (it.value() < 0.0) return false;
            degrees[it.row()] += it.value();
        }
    }
    const double scale = std::max(1.0, degrees.cwiseAbs().maxCoeff());
    if ((degrees - graph.degrees).cwiseAbs().maxCoeff() > rel_tol * scale) return false;
    const double volume = degrees.sum();
    return std::abs(volume - graph.volume) <= rel_tol * std::max(1.0, std::abs(volume));
}

}  // namespace spectral_match
