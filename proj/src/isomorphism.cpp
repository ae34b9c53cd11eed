#include "spectral_match/isomorphism.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include <Eigen/Eigenvalues>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

constexpr double kGapTol = 1e-8;

void require_square_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) throw Error("matrices must be square");
    if (a.rows() != b.rows()) throw Error("matrices must have the same size");
    const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
        (b - b.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw Error("matrices must be symmetric");
    }
}

bool has_simple_spectrum(const Eigen::VectorXd& values) {
    for (Eigen::Index i = 1; i < values.size(); ++i) {
        if (values[i] - values[i - 1] <= kGapTol) return false;
    }
    return true;
}

Eigen::MatrixXd permuted(const Eigen::MatrixXd& b, const PermutationMatrix& p) {
    const int n = p.size();
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = b(p.mapping[i], p.mapping[j]);
    return out;
}

Eigen::VectorXd recover_signs(const Eigen::MatrixXd& ua, const Eigen::MatrixXd& ub, const PermutationMatrix& p) {
    const Eigen::Index n = ua.rows();
    Eigen::VectorXd signs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double dot = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) dot += ua(i, k) * ub(p.mapping[i], k);
        signs[k] = dot >= 0.0 ? 1.0 : -1.0;
    }
    return signs;
}

void hill_climb(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, PermutationMatrix& p, int max_moves) {
    const int n = p.size();
    double best = (a - permuted(b, p)).squaredNorm();
    for (int move = 0; move < max_moves; ++move) {
        double best_gain = 0.0;
        int bi = -1, bj = -1;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                std::swap(p.mapping[i], p.mapping[j]);
                const double value = (a - permuted(b, p)).squaredNorm();
                std::swap(p.mapping[i], p.mapping[j]);
                if (best - value > best_gain) {
                    best_gain = best - value;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (bi < 0) break;
        std::swap(p.mapping[bi], p.mapping[bj]);
        best -= best_gain;
    }
}

}  // namespace

double isomorphism_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const PermutationMatrix& p) {
    return frobenius_norm(a - permuted(b, p));
}

std::optional<IsoResult> exact_spectral_isomorphism(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    require_square_pair(a, b);
    const int n = static_cast<int>(a.rows());
    if (n > kExactIsoLimit) {
        throw Error("exact isomorphism enumerates 2^n sign matrices; n = " + std::to_string(n) +
                    " exceeds the limit of " + std::to_string(kExactIsoLimit));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a), eb(b);
    const Eigen::VectorXd& alpha = ea.eigenvalues();
    const Eigen::VectorXd& beta = eb.eigenvalues();
    if (!has_simple_spectrum(alpha) || !has_simple_spectrum(beta)) {
        throw DegenerateSpectrumError("exact isomorphism needs distinct eigenvalues (gap > 1e-8)");
    }
    const double norm_a = frobenius_norm(a);
    const double spectrum_tol = 1e-8 * std::max(1.0, norm_a);
    if ((alpha - beta).cwiseAbs().maxCoeff() > spectrum_tol) return std::nullopt;

    const Eigen::MatrixXd& ua = ea.eigenvectors();
    const Eigen::MatrixXd& ub = eb.eigenvectors();
    const double accept = 1e-8 * norm_a;
    Eigen::VectorXd s(n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int k = 0; k < n; ++k) s[k] = (mask >> k) & 1u ? -1.0 : 1.0;
        const Eigen::MatrixXd candidate = ua * s.asDiagonal() * ub.transpose();
        PermutationMatrix p;
        p.mapping.assign(n, -1);
        bool valid = true;
        for (int i = 0; i < n && valid; ++i) {
            for (int j = 0; j < n; ++j) {
                const double x = candidate(i, j);
                if (std::abs(x - 1.0) <= 1e-6) {
                    if (p.mapping[i] >= 0) {
                        valid = false;
                        break;
                    }
                    p.mapping[i] = j;
                } else if (std::abs(x) > 1e-6) {
                    valid = false;
                    break;
                }
            }
            if (p.mapping[i] < 0) valid = false;
        }
        if (!valid || !p.is_valid()) continue;
        const double residual = isomorphism_residual(a, b, p);
        if (residual <= accept) return IsoResult{std::move(p), s, residual, true, false};
    }
    return std::nullopt;
}

IsoResult umeyama_match(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const UmeyamaOptions& options) {
    require_square_pair(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(a), eb(b);
    const Eigen::MatrixXd& ua = ea.eigenvectors();
    const Eigen::MatrixXd& ub = eb.eigenvectors();
    const Eigen::MatrixXd similarity = ua.cwiseAbs() * ub.cwiseAbs().transpose();

    IsoResult result;
    result.degenerate_spectrum = !has_simple_spectrum(ea.eigenvalues()) || !has_simple_spectrum(eb.eigenvalues());
    result.permutation = hungarian(similarity, AssignmentSense::max);
    if (options.hill_climb) hill_climb(a, b, result.permutation, options.max_moves);
    result.sign_matrix = recover_signs(ua, ub, result.permutation);
    result.residual = isomorphism_residual(a, b, result.permutation);
    result.exact = result.residual <= 1e-8 * frobenius_norm(a);
    return result;
}

HoffmanWielandt hoffman_wielandt_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    require_square_pair(a, b);
    const Eigen::VectorXd alpha = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues();
    const Eigen::VectorXd beta = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b, Eigen::EigenvaluesOnly).eigenvalues();
    return {(alpha - beta).squaredNorm(), (a - b).squaredNorm()};
}

}  // namespace spectral_match
