#pragma once

#include <optional>
#include <utility>

#include <Eigen/Core>

#include "spectral_match/matutil.hpp"

namespace spectral_match {

/// Matching of two dense symmetric matrices under A_A = P A_B P^T.
/// permutation.mapping[i] is the B vertex matched to A vertex i.
struct IsoResult {
    PermutationMatrix permutation;
    Eigen::VectorXd sign_matrix;  // diagonal of S, entries +-1
    double residual = 0.0;        // |A_A - P A_B P^T|_F
    bool exact = false;
    bool degenerate_spectrum = false;
};

inline constexpr int kExactIsoLimit = 12;

/// Enumerates the 2^n sign matrices S, forms U_A S U_B^T and returns the first
/// candidate that rounds to a permutation and reproduces A_A. nullopt when the
/// spectra differ or no candidate survives.
std::optional<IsoResult> exact_spectral_isomorphism(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

struct UmeyamaOptions {
    bool hill_climb = false;
    int max_moves = 1000;
};

/// Hungarian (max) on |U_A| |U_B|^T, signs from u_Ak^T P u_Bk.
IsoResult umeyama_match(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const UmeyamaOptions& options = {});

struct HoffmanWielandt {
    double lower_bound;         // sum (alpha_i - beta_i)^2, both ascending
    double frobenius_distance;  // |A_A - A_B|_F^2
};

HoffmanWielandt hoffman_wielandt_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// |A_A - P A_B P^T|_F.
double isomorphism_residual(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const PermutationMatrix& p);

}  // namespace spectral_match
