#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "spectral_match/matutil.hpp"

namespace spectral_match {

struct EigenSignature {
    Eigen::VectorXd bin_edges;  // B+1 ascending
    Eigen::VectorXd mass;       // B entries summing to 1
    int source_index = -1;

    int bins() const { return static_cast<int>(mass.size()); }
};

inline constexpr int kDefaultBins = 100;
inline constexpr double kDefaultSignatureThreshold = 0.7;

/// Histogram of the components of u over [-a, a] with B equal bins. Binning is
/// done on |u_i| so that eigensignature(-u) is exactly the mirror of
/// eigensignature(u). Zeros straddle the two central bins when B is even.
/// half_range <= 0 means a = max_i |u_i|.
EigenSignature eigensignature(const Eigen::VectorXd& u, int bins = kDefaultBins, double half_range = 0.0,
                              int source_index = -1);

/// Mass vector reversed (the signature of -u).
EigenSignature mirrored(const EigenSignature& h);

/// 3.5 sigma_k / n^{1/3} with sigma_k = 1/n, i.e. 3.5 / n^{4/3}.
double scott_bin_width(int n);
/// (max u - min u) / scott_bin_width(n).
double scott_bin_count(const Eigen::VectorXd& u);

/// Pearson correlation of the mass vectors. With a constant mass vector the
/// correlation is undefined: returns 1 when both are identical, else 0.
double histogram_similarity(const EigenSignature& h1, const EigenSignature& h2);

struct EigenAlignment {
    /// Over all K indices: u_k (shape A) is paired with u'_{perm.mapping[k]} (shape B).
    PermutationMatrix permutation;
    /// s_k for every k in 0..K-1.
    std::vector<int> signs;
    /// Indices k (shape A) with score >= threshold, ascending.
    std::vector<int> kept;
    std::vector<int> dropped;
    /// a_{k, pi(k)} for every k.
    std::vector<double> scores;
    /// Full K x K table a_kl.
    Eigen::MatrixXd similarity;
    double threshold = kDefaultSignatureThreshold;

    /// R0 = S_K P_K restricted to the kept set, in the kept-set ordering; this is
    /// the diagonal of kept signs once shape B's dimensions are re-ordered by pi.
    Eigen::MatrixXd initial_transform() const;
    /// Full K x K signed permutation with R(pi(k), k) = s_k, mapping A coordinates
    /// onto B's.
    Eigen::MatrixXd signed_permutation() const;
};

struct AlignOptions {
    double threshold = kDefaultSignatureThreshold;
    int bins = kDefaultBins;
};

/// Algorithm: a_kl = max(C(H u_k, H u'_l), C(H u_k, H -u'_l)), b_kl the sign
/// achieving it; Hungarian (max) on a; drop pairs below the threshold. Throws
/// when nothing survives.
EigenAlignment align_embeddings(const Eigen::MatrixXd& u, const Eigen::MatrixXd& u_prime,
                                const AlignOptions& options = {});

/// Matched pairs, signs, scores and dropped indices as text.
void write_alignment_report(std::ostream& out, const EigenAlignment& alignment);

}  // namespace spectral_match
