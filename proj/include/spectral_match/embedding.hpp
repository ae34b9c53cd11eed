#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "spectral_match/spectral.hpp"

namespace spectral_match {

enum class EmbeddingKind { raw_laplacian, commute_time, hypersphere };

/// K x n coordinates; column j is vertex j.
struct Embedding {
    Eigen::MatrixXd coords;
    EmbeddingKind kind = EmbeddingKind::commute_time;
    /// lambda_2 ... lambda_{K+1} of the source spectrum.
    Eigen::VectorXd eigenvalues;

    int dim() const { return static_cast<int>(coords.rows()); }
    int vertex_count() const { return static_cast<int>(coords.cols()); }
};

/// Row k is u_{k+1}^T (null pair skipped).
Embedding raw_laplacian_embedding(const Spectrum& spectrum, int k);

/// X = Lambda^-1/2 U^T over the first K non-null pairs of a combinatorial spectrum.
Embedding commute_time_embedding(const Spectrum& spectrum, int k);

/// Same, restricted to the listed non-null pair indices (0-based over lambda_2...).
Embedding commute_time_embedding(const Spectrum& spectrum, const std::vector<int>& pairs);

/// Vol(G) * sum_{k>=2} (u_ik - u_jk)^2 / lambda_k over every non-null pair held by
/// the spectrum. Exact commute time when the spectrum is complete.
double commute_time_distance(const Spectrum& spectrum, int i, int j, double volume);

/// Truncated version: Vol(G) * |x_i - x_j|^2 in a commute-time embedding.
double commute_time_distance(const Embedding& embedding, int i, int j, double volume);

struct DimensionChoice {
    int k = 0;
    /// theta_min(K) for K = 1..M.
    std::vector<double> theta_min;
    /// False when no K <= M reached the target; k is then M.
    bool reached = false;
};

/// theta_min(K) = sum_{2}^{K+1} 1/lambda / (sum_{2}^{K} 1/lambda + (n-K)/lambda_{K+1}).
double theta_min(const Eigen::VectorXd& nonnull_eigenvalues, int n, int k);

/// Smallest K with theta_min(K) >= target.
DimensionChoice select_dimension(const Eigen::VectorXd& nonnull_eigenvalues, int n,
                                 double theta_target = 0.95);

/// Scales every column to unit length. Throws on a zero column.
Embedding normalize_hypersphere(const Embedding& embedding);

struct EmbeddingStats {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;  // (1/n) X X^T
};

EmbeddingStats embedding_stats(const Embedding& embedding);

/// K rows of n values, 17 significant digits.
void write_embedding(std::ostream& out, const Embedding& embedding);

}  // namespace spectral_match
