#include "spectral_match/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "spectral_match/error.hpp"

namespace spectral_match {

void canonicalize_signs(Eigen::MatrixXd& vectors) {
    for (Eigen::Index col = 0; col < vectors.cols(); ++col) {
        Eigen::Index best = 0;
        vectors.col(col).cwiseAbs().maxCoeff(&best);
        if (vectors(best, col) < 0.0) vectors.col(col) *= -1.0;
    }
}

namespace {

Eigen::VectorXd residual_norms(const SparseMatrix& a, const Eigen::MatrixXd& vectors,
                               const Eigen::VectorXd& values) {
    const Eigen::MatrixXd av = a * vectors;
    Eigen::VectorXd out(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        out[k] = (av.col(k) - values[k] * vectors.col(k)).norm();
    }
    return out;
}

std::vector<bool> flag_near_degenerate(const Eigen::VectorXd& values, int first) {
    const auto count = values.size();
    std::vector<bool> flags(count, false);
    if (count == 0) return flags;
    const double threshold = 1e-6 * std::abs(values[count - 1]);
    for (Eigen::Index k = first; k + 1 < count; ++k) {
        if (k + 1 >= first && values[k + 1] - values[k] < threshold) {
            flags[k] = true;
            flags[k + 1] = true;
        }
    }
    return flags;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& block) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(block);
    return qr.householderQ() * Eigen::MatrixXd::Identity(block.rows(), block.cols());
}

void project_out(Eigen::MatrixXd& block, const Eigen::VectorXd& z) {
    block.noalias() -= z * (z.transpose() * block);
}

/// Degree-`degree` Chebyshev filter damping [cutoff, upper] and scaled to be 1
/// at `lower`.
Eigen::MatrixXd chebyshev_filter(const SparseMatrix& a, const Eigen::MatrixXd& x0, int degree,
                                 double lower, double cutoff, double upper) {
    const double e = (upper - cutoff) / 2.0;
    const double c = (upper + cutoff) / 2.0;
    double sigma = e / (lower - c);
    const double sigma1 = sigma;
    const double tau = 2.0 / sigma1;
    Eigen::MatrixXd x = x0;
    Eigen::MatrixXd y = (a * x - c * x) * (sigma1 / e);
    for (int i = 2; i <= degree; ++i) {
        const double sigma2 = 1.0 / (tau - sigma);
        Eigen::MatrixXd next = (a * y - c * y) * (2.0 * sigma2 / e) - (sigma * sigma2) * x;
        x = std::move(y);
        y = std::move(next);
        sigma = sigma2;
    }
    return y;
}

struct RitzPairs {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

RitzPairs rayleigh_ritz(const SparseMatrix& a, const Eigen::MatrixXd& basis) {
    const Eigen::MatrixXd ab = a * basis;
    Eigen::MatrixXd h = basis.transpose() * ab;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    return {basis * eig.eigenvectors(), eig.eigenvalues()};
}

void throw_if_disconnected(const Eigen::VectorXd& nonnull_values, double tol) {
    int zeros = 0;
    for (Eigen::Index k = 0; k < nonnull_values.size(); ++k) {
        if (std::abs(nonnull_values[k]) <= tol) ++zeros;
    }
    if (zeros > 0) throw DisconnectedGraphError(static_cast<std::size_t>(zeros) + 1);
}

}  // namespace

Spectrum dense_eig(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw Error("dense_eig: matrix must be square");
    if (a.rows() > kDenseEigLimit) {
        throw Error("dense_eig: size " + std::to_string(a.rows()) + " exceeds limit " +
                    std::to_string(kDenseEigLimit));
    }
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success) throw Error("dense_eig: decomposition failed");
    Spectrum s;
    s.eigenvalues = eig.eigenvalues();
    s.eigenvectors = eig.eigenvectors();
    canonicalize_signs(s.eigenvectors);
    s.residuals.resize(s.eigenvalues.size());
    const Eigen::MatrixXd au = sym * s.eigenvectors;
    for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
        s.residuals[k] = (au.col(k) - s.eigenvalues[k] * s.eigenvectors.col(k)).norm();
    }
    s.near_degenerate = flag_near_degenerate(s.eigenvalues, 0);
    return s;
}

Spectrum eigs_smallest(const LaplacianMatrix& lap, int k, const EigsOptions& options) {
    if (!lap.is_symmetric_kind()) throw Error("eigs_smallest: random-walk Laplacian is not symmetric");
    const int n = lap.size();
    if (k < 1 || k + 1 > n) {
        throw Error("eigs_smallest: need 1 <= K and K+1 <= n (K=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
    }
    const SparseMatrix& a = lap.matrix;
    const Eigen::VectorXd z = null_vector(lap);
    const double norm = norm1(a);
    const double tol = options.tol.value_or(1e-8 * norm);
    const int log2n = static_cast<int>(std::ceil(std::log2(static_cast<double>(std::max(n, 2)))));
    const int max_iterations = options.max_iterations.value_or(50 * (k + 1) * log2n);
    const int block = std::min(n - 1, k + std::max(3, k / 4 + 2));

    Spectrum s;
    s.source_kind = lap.kind;

    if (2 * block > n - 1 || block < k + 3) {
        // Small problems: the dense route already meets every postcondition.
        Spectrum full = dense_eig(Eigen::MatrixXd(a));
        throw_if_disconnected(full.eigenvalues.segment(1, k), tol);
        s.eigenvalues = full.eigenvalues.head(k + 1);
        s.eigenvectors = full.eigenvectors.leftCols(k + 1);
        s.residuals = full.residuals.head(k + 1);
        s.near_degenerate = flag_near_degenerate(s.eigenvalues, 1);
        return s;
    }

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd basis(n, block);
    for (Eigen::Index j = 0; j < basis.cols(); ++j) {
        for (Eigen::Index i = 0; i < basis.rows(); ++i) basis(i, j) = normal(rng);
    }
    project_out(basis, z);
    basis = orthonormalize(basis);
    RitzPairs ritz = rayleigh_ritz(a, basis);

    // Gershgorin: the spectrum lies in [0, |L|_1].
    const double upper = norm;
    int sweeps = 0;
    Eigen::VectorXd residuals;
    while (true) {
        residuals = residual_norms(a, ritz.vectors.leftCols(k), ritz.values.head(k));
        if (residuals.maxCoeff() <= tol) break;
        if (sweeps >= max_iterations) {
            throw ConvergenceError("eigs_smallest: no convergence after " + std::to_string(sweeps) +
                                       " filter sweeps",
                                   std::vector<double>(residuals.data(), residuals.data() + residuals.size()));
        }
        const double cutoff = ritz.values[block - 1];
        if (!(cutoff < upper)) break;  // block spans the whole spectrum
        Eigen::MatrixXd filtered = chebyshev_filter(a, ritz.vectors, options.filter_degree, 0.0, cutoff, upper);
        project_out(filtered, z);
        basis = orthonormalize(filtered);
        ritz = rayleigh_ritz(a, basis);
        ++sweeps;
    }

    throw_if_disconnected(ritz.values.head(k), tol);

    s.eigenvalues.resize(k + 1);
    s.eigenvectors.resize(n, k + 1);
    s.eigenvalues[0] = z.dot(a * z);
    s.eigenvectors.col(0) = z;
    s.eigenvalues.tail(k) = ritz.values.head(k);
    s.eigenvectors.rightCols(k) = ritz.vectors.leftCols(k);
    canonicalize_signs(s.eigenvectors);
    s.residuals = residual_norms(a, s.eigenvectors, s.eigenvalues);
    s.near_degenerate = flag_near_degenerate(s.eigenvalues, 1);
    s.iterations = sweeps;
    return s;
}

bool SpectralReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

const PropertyCheck* SpectralReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

SpectralReport check_spectral_properties(const Spectrum& spectrum, const Graph& graph, double tol) {
    SpectralReport report;
    const auto n = spectrum.vertex_count();
    const auto pairs = spectrum.size();
    const Eigen::MatrixXd& u = spectrum.eigenvectors;
    const double dn = static_cast<double>(n);

    if (spectrum.source_kind == LaplacianKind::combinatorial) {
        double worst_sum = 0.0;
        double worst_entry = 0.0;
        double worst_mean = 0.0;
        double worst_variance = 0.0;
        for (Eigen::Index k = 1; k < pairs; ++k) {
            const double sum = u.col(k).sum();
            const double mean = sum / dn;
            const double variance = (u.col(k).array() - mean).square().sum() / dn;
            worst_sum = std::max(worst_sum, std::abs(sum));
            worst_entry = std::max(worst_entry, u.col(k).cwiseAbs().maxCoeff());
            worst_mean = std::max(worst_mean, std::abs(mean));
            worst_variance = std::max(worst_variance, std::abs(variance - 1.0 / dn));
        }
        report.checks.push_back({"zero_sum", worst_sum <= tol, worst_sum, tol});
        report.checks.push_back({"entries_below_one", worst_entry < 1.0, worst_entry, 1.0});
        report.checks.push_back({"mean_zero", worst_mean <= tol, worst_mean, tol});
        report.checks.push_back({"variance_one_over_n", worst_variance <= tol, worst_variance, tol});
        const double bound = 2.0 * graph.degrees.maxCoeff();
        const double largest = pairs > 0 ? spectrum.eigenvalues.maxCoeff() : 0.0;
        report.checks.push_back({"eigenvalue_bound", largest <= bound * (1.0 + tol), largest, bound});
    } else if (spectrum.source_kind == LaplacianKind::normalized) {
        const double largest = pairs > 0 ? spectrum.eigenvalues.maxCoeff() : 0.0;
        report.checks.push_back({"normalized_eigenvalue_bound", largest <= 2.0 + tol, largest, 2.0});
        const Eigen::VectorXd sqrt_d = graph.degrees.cwiseSqrt();
        double worst = 0.0;
        for (Eigen::Index k = 1; k < pairs; ++k) worst = std::max(worst, std::abs(sqrt_d.dot(u.col(k))));
        const double bound = tol * std::max(1.0, sqrt_d.norm());
        report.checks.push_back({"weighted_zero_sum", worst <= bound, worst, bound});
    }
    return report;
}

void write_spectrum(std::ostream& out, const Spectrum& spectrum) {
    out << std::setprecision(17);
    out << "# pairs " << spectrum.size() << " n " << spectrum.vertex_count() << '\n';
    for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
        out << spectrum.eigenvalues[k] << ' ' << spectrum.residuals[k] << '\n';
    }
    for (Eigen::Index k = 0; k < spectrum.eigenvectors.cols(); ++k) {
        for (Eigen::Index i = 0; i < spectrum.eigenvectors.rows(); ++i) {
            out << spectrum.eigenvectors(i, k) << '\n';
        }
    }
}

void write_spectrum(const std::filesystem::path& path, const Spectrum& spectrum) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_spectrum(out, spectrum);
}

}  // namespace spectral_match
