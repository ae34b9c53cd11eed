#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spectral_match/graph.hpp"
#include "spectral_match/laplacian.hpp"

namespace spectral_match {

/// Ascending eigenpairs. For Laplacian spectra column 0 is the null mode.
struct Spectrum {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // n x pairs, orthonormal columns
    Eigen::VectorXd residuals;     // |A u - lambda u| per pair
    LaplacianKind source_kind = LaplacianKind::combinatorial;
    /// Pair k is flagged when its gap to a neighbouring eigenvalue is below
    /// 1e-6 * (largest computed eigenvalue).
    std::vector<bool> near_degenerate;
    int iterations = 0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
    int vertex_count() const { return static_cast<int>(eigenvectors.rows()); }
};

struct EigsOptions {
    /// Residual tolerance; default 1e-8 * |L|_1.
    std::optional<double> tol;
    /// Cap on filter sweeps; default 50 (K+1) ceil(log2 n).
    std::optional<int> max_iterations;
    std::uint64_t seed = 0x5eed;
    int filter_degree = 24;
};

/// The K+1 algebraically smallest eigenpairs of a symmetric Laplacian, the null
/// pair first. Uses Chebyshev-filtered subspace iteration with the known null
/// vector deflated, block size >= K+3 and seeded start vectors. Every
/// eigenvector is sign-canonicalized (largest-magnitude entry positive).
Spectrum eigs_smallest(const LaplacianMatrix& lap, int k, const EigsOptions& options = {});

/// Full dense eigendecomposition of a symmetric matrix (n <= 2000), ascending.
Spectrum dense_eig(const Eigen::MatrixXd& a);

inline constexpr int kDenseEigLimit = 2000;

/// Flips each column so that its largest-magnitude entry is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors);

struct PropertyCheck {
    std::string name;
    bool passed;
    double value;  // observed worst-case quantity
    double bound;  // threshold it was compared against
};

struct SpectralReport {
    std::vector<PropertyCheck> checks;

    bool all_passed() const;
    const PropertyCheck* find(const std::string& name) const;
};

/// Checks zero-sum / |u_ik| < 1 / mean 0 / variance 1/n and the 2 max d_i bound
/// for combinatorial spectra; gamma <= 2 and sum_i d_i^1/2 u_ik = 0 for
/// normalized spectra.
SpectralReport check_spectral_properties(const Spectrum& spectrum, const Graph& graph,
                                         double tol = 1e-8);

/// One `lambda residual` line per pair, then the eigenvector block column-major.
void write_spectrum(std::ostream& out, const Spectrum& spectrum);
void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum);

}  // namespace spectral_match
