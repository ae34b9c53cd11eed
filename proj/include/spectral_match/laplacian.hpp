#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Core>

#include "spectral_match/graph.hpp"

namespace spectral_match {

enum class LaplacianKind { combinatorial, normalized, random_walk };

std::string to_string(LaplacianKind kind);

/// L = D - W, normalized D^-1/2 L D^-1/2, or random walk D^-1 L.
struct LaplacianMatrix {
    LaplacianKind kind = LaplacianKind::combinatorial;
    SparseMatrix matrix;
    Eigen::VectorXd degrees;

    int size() const { return static_cast<int>(matrix.rows()); }
    bool is_symmetric_kind() const { return kind != LaplacianKind::random_walk; }
};

LaplacianMatrix assemble(const Graph& graph, LaplacianKind kind);

/// Rescales between kinds with the degree relations, e.g. normalized to
/// random walk as D^-1/2 L~ D^1/2.
LaplacianMatrix convert(const LaplacianMatrix& lap, LaplacianKind target);

/// The vector spanning the known null space: 1/sqrt(n) for combinatorial,
/// D^1/2 1 normalized for the normalized kind.
Eigen::VectorXd null_vector(const LaplacianMatrix& lap);

/// Max absolute column sum.
double norm1(const SparseMatrix& matrix);

/// `row col value` lines, 17 significant digits, preceded by a `# size n` comment.
void write_triplets(std::ostream& out, const SparseMatrix& matrix);
void write_triplets(const std::filesystem::path& path, const SparseMatrix& matrix);

/// Reads the triplet format. Size comes from `# size n` if present, else max index + 1.
SparseMatrix read_triplets(std::istream& in, const std::string& source = "<triplets>");
SparseMatrix read_triplets(const std::filesystem::path& path);

}  // namespace spectral_match
