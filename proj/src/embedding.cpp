#include "spectral_match/embedding.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

void require_pairs(const Spectrum& spectrum, int k) {
    if (k < 1) throw Error("embedding dimension must be >= 1");
    if (spectrum.size() < k + 1) {
        throw Error("spectrum holds " + std::to_string(spectrum.size() - 1) +
                    " non-null pairs, embedding needs " + std::to_string(k));
    }
}

}  // namespace

Embedding raw_laplacian_embedding(const Spectrum& spectrum, int k) {
    require_pairs(spectrum, k);
    Embedding e;
    e.kind = EmbeddingKind::raw_laplacian;
    e.coords = spectrum.eigenvectors.middleCols(1, k).transpose();
    e.eigenvalues = spectrum.eigenvalues.segment(1, k);
    return e;
}

Embedding commute_time_embedding(const Spectrum& spectrum, const std::vector<int>& pairs) {
    if (spectrum.source_kind != LaplacianKind::combinatorial) {
        throw Error("commute-time embedding needs a combinatorial spectrum");
    }
    Embedding e;
    e.kind = EmbeddingKind::commute_time;
    e.coords.resize(static_cast<Eigen::Index>(pairs.size()), spectrum.vertex_count());
    e.eigenvalues.resize(static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t r = 0; r < pairs.size(); ++r) {
        const int p = pairs[r] + 1;
        if (pairs[r] < 0 || p >= spectrum.size()) throw Error("embedding pair index out of range");
        const double lambda = spectrum.eigenvalues[p];
        if (!(lambda > 0.0)) throw Error("commute-time embedding needs positive eigenvalues");
        e.eigenvalues[static_cast<Eigen::Index>(r)] = lambda;
        e.coords.row(static_cast<Eigen::Index>(r)) = spectrum.eigenvectors.col(p).transpose() / std::sqrt(lambda);
    }
    return e;
}

Embedding commute_time_embedding(const Spectrum& spectrum, int k) {
    require_pairs(spectrum, k);
    std::vector<int> pairs(k);
    for (int i = 0; i < k; ++i) pairs[i] = i;
    return commute_time_embedding(spectrum, pairs);
}

double commute_time_distance(const Spectrum& spectrum, int i, int j, double volume) {
    const int n = spectrum.vertex_count();
    if (i < 0 || j < 0 || i >= n || j >= n) throw Error("vertex index out of range");
    if (i == j) return 0.0;
    double sum = 0.0;
    for (Eigen::Index k = 1; k < spectrum.size(); ++k) {
        const double diff = spectrum.eigenvectors(i, k) - spectrum.eigenvectors(j, k);
        sum += diff * diff / spectrum.eigenvalues[k];
    }
    return volume * sum;
}

double commute_time_distance(const Embedding& embedding, int i, int j, double volume) {
    const int n = embedding.vertex_count();
    if (i < 0 || j < 0 || i >= n || j >= n) throw Error("vertex index out of range");
    if (i == j) return 0.0;
    return volume * (embedding.coords.col(i) - embedding.coords.col(j)).squaredNorm();
}

double theta_min(const Eigen::VectorXd& nonnull_eigenvalues, int n, int k) {
    if (k < 1 || k > nonnull_eigenvalues.size()) throw Error("theta_min: K out of range");
    const Eigen::VectorXd inv = nonnull_eigenvalues.head(k).cwiseInverse();
    const double numerator = inv.sum();
    const double denominator = inv.head(k - 1).sum() + static_cast<double>(n - k) * inv[k - 1];
    return numerator / denominator;
}

DimensionChoice select_dimension(const Eigen::VectorXd& nonnull_eigenvalues, int n, double theta_target) {
    if (nonnull_eigenvalues.size() < 1) throw Error("select_dimension: no non-null eigenvalues");
    if (!(theta_target > 0.0 && theta_target < 1.0)) throw Error("select_dimension: target must lie in (0,1)");
    DimensionChoice choice;
    const int m = static_cast<int>(nonnull_eigenvalues.size());
    for (int k = 1; k <= m; ++k) {
        const double value = theta_min(nonnull_eigenvalues, n, k);
        choice.theta_min.push_back(value);
        if (!choice.reached && value >= theta_target) {
            choice.reached = true;
            choice.k = k;
        }
    }
    if (!choice.reached) choice.k = m;
    return choice;
}

Embedding normalize_hypersphere(const Embedding& embedding) {
    Embedding out = embedding;
    out.kind = EmbeddingKind::hypersphere;
    for (Eigen::Index j = 0; j < out.coords.cols(); ++j) {
        const double norm = out.coords.col(j).norm();
        if (!(norm > 0.0)) throw Error("zero-norm embedding column at vertex " + std::to_string(j));
        out.coords.col(j) /= norm;
    }
    return out;
}

EmbeddingStats embedding_stats(const Embedding& embedding) {
    const double n = static_cast<double>(embedding.vertex_count());
    EmbeddingStats stats;
    stats.mean = embedding.coords.rowwise().sum() / n;
    stats.covariance = embedding.coords * embedding.coords.transpose() / n;
    return stats;
}

void write_embedding(std::ostream& out, const Embedding& embedding) {
    out << std::setprecision(17);
    for (Eigen::Index r = 0; r < embedding.coords.rows(); ++r) {
        for (Eigen::Index c = 0; c < embedding.coords.cols(); ++c) {
            if (c) out << ' ';
            out << embedding.coords(r, c);
        }
        out << '\n';
    }
}

}  // namespace spectral_match
