#include "spectral_match/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

/// Bins the components of u into `mass` (unnormalized), binning on |x|.
void accumulate(const Eigen::VectorXd& u, double a, Eigen::VectorXd& mass) {
    const int bins = static_cast<int>(mass.size());
    const double width = 2.0 * a / bins;
    const bool even = bins % 2 == 0;
    const int half = bins / 2;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double x = u[i];
        const double q = std::abs(x) / width;
        if (even) {
            if (x == 0.0) {
                mass[half - 1] += 0.5;
                mass[half] += 0.5;
                continue;
            }
            const int offset = std::min(static_cast<int>(q), half - 1);
            mass[x > 0.0 ? half + offset : half - 1 - offset] += 1.0;
        } else {
            const int offset = std::min(static_cast<int>(q + 0.5), half);
            mass[x >= 0.0 ? half + offset : half - offset] += 1.0;
        }
    }
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    const Eigen::ArrayXd dx = x.array() - x.mean();
    const Eigen::ArrayXd dy = y.array() - y.mean();
    const double vx = dx.square().sum();
    const double vy = dy.square().sum();
    if (vx <= 0.0 || vy <= 0.0) return x == y ? 1.0 : 0.0;
    return std::clamp((dx * dy).sum() / std::sqrt(vx * vy), -1.0, 1.0);
}

Eigen::VectorXd binned(const Eigen::VectorXd& u, int bins, double a) {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(bins);
    accumulate(u, a, mass);
    return mass / static_cast<double>(u.size());
}

}  // namespace

EigenSignature eigensignature(const Eigen::VectorXd& u, int bins, double half_range, int source_index) {
    if (u.size() < 2) throw Error("eigensignature needs at least 2 components");
    if (bins < 1) throw Error("eigensignature needs at least one bin");
    double a = half_range > 0.0 ? half_range : u.cwiseAbs().maxCoeff();
    if (!(a > 0.0)) a = 1.0;
    if (u.cwiseAbs().maxCoeff() > a) throw Error("eigensignature: components exceed the histogram range");
    EigenSignature h;
    h.source_index = source_index;
    h.bin_edges = Eigen::VectorXd::LinSpaced(bins + 1, -a, a);
    h.mass = binned(u, bins, a);
    return h;
}

EigenSignature mirrored(const EigenSignature& h) {
    EigenSignature out = h;
    out.mass = h.mass.reverse();
    return out;
}

double scott_bin_width(int n) {
    if (n < 1) throw Error("scott_bin_width: n must be positive");
    return 3.5 / std::pow(static_cast<double>(n), 4.0 / 3.0);
}

double scott_bin_count(const Eigen::VectorXd& u) {
    return (u.maxCoeff() - u.minCoeff()) / scott_bin_width(static_cast<int>(u.size()));
}

double histogram_similarity(const EigenSignature& h1, const EigenSignature& h2) {
    if (h1.mass.size() != h2.mass.size() || h1.bin_edges.size() != h2.bin_edges.size() ||
        h1.bin_edges != h2.bin_edges) {
        throw Error("histogram_similarity: signatures do not share bins");
    }
    return pearson(h1.mass, h2.mass);
}

Eigen::MatrixXd EigenAlignment::initial_transform() const {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = signs[kept[i]];
    return r;
}

Eigen::MatrixXd EigenAlignment::signed_permutation() const {
    const int k = permutation.size();
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) r(permutation.mapping[i], i) = signs[i];
    return r;
}

EigenAlignment align_embeddings(const Eigen::MatrixXd& u, const Eigen::MatrixXd& u_prime, const AlignOptions& options) {
    if (u.cols() != u_prime.cols()) throw Error("align_embeddings: both blocks need the same number of eigenvectors");
    if (u.cols() < 1) throw Error("align_embeddings: empty eigenvector block");
    if (u.rows() < 2 || u_prime.rows() < 2) throw Error("align_embeddings: eigenvectors need at least 2 components");
    const int k = static_cast<int>(u.cols());
    const int bins = options.bins;

    const Eigen::VectorXd max_a = u.cwiseAbs().colwise().maxCoeff().transpose();
    const Eigen::VectorXd max_b = u_prime.cwiseAbs().colwise().maxCoeff().transpose();

    EigenAlignment out;
    out.threshold = options.threshold;
    out.similarity.resize(k, k);
    Eigen::MatrixXi sign_table(k, k);
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            double a = std::max(max_a[r], max_b[c]);
            if (!(a > 0.0)) a = 1.0;
            const Eigen::VectorXd h = binned(u.col(r), bins, a);
            const Eigen::VectorXd h_prime = binned(u_prime.col(c), bins, a);
            const double plus = pearson(h, h_prime);
            const double minus = pearson(h, h_prime.reverse());
            out.similarity(r, c) = std::max(plus, minus);
            sign_table(r, c) = plus >= minus ? 1 : -1;
        }
    }
    out.permutation = hungarian(out.similarity, AssignmentSense::max);
    out.signs.resize(k);
    out.scores.resize(k);
    for (int r = 0; r < k; ++r) {
        const int c = out.permutation.mapping[r];
        out.signs[r] = sign_table(r, c);
        out.scores[r] = out.similarity(r, c);
        (out.scores[r] >= options.threshold ? out.kept : out.dropped).push_back(r);
    }
    if (out.kept.empty()) {
        throw Error("no eigenvector pair reaches the signature threshold " + std::to_string(options.threshold) +
                    " (shapes too dissimilar or K too large)");
    }
    return out;
}

void write_alignment_report(std::ostream& out, const EigenAlignment& alignment) {
    out << "# k\tpi(k)\tsign\tscore\tstatus\n" << std::setprecision(6);
    for (int k = 0; k < alignment.permutation.size(); ++k) {
        const bool kept = std::binary_search(alignment.kept.begin(), alignment.kept.end(), k);
        out << k << '\t' << alignment.permutation.mapping[k] << '\t' << (alignment.signs[k] > 0 ? "+1" : "-1") << '\t'
            << alignment.scores[k] << '\t' << (kept ? "kept" : "dropped") << '\n';
    }
    out << "# kept " << alignment.kept.size() << " dropped " << alignment.dropped.size() << " threshold "
        << alignment.threshold << '\n';
}

}  // namespace spectral_match
