#include "spectral_match/matutil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/LU>

#include "spectral_match/error.hpp"

namespace spectral_match {

PermutationMatrix PermutationMatrix::identity(int n) {
    PermutationMatrix p;
    p.mapping.resize(n);
    std::iota(p.mapping.begin(), p.mapping.end(), 0);
    return p;
}

Eigen::MatrixXd PermutationMatrix::dense() const {
    const int n = size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, mapping[i]) = 1.0;
    return m;
}

PermutationMatrix PermutationMatrix::inverse() const {
    PermutationMatrix inv;
    inv.mapping.resize(mapping.size());
    for (int i = 0; i < size(); ++i) inv.mapping[mapping[i]] = i;
    return inv;
}

bool PermutationMatrix::is_valid() const {
    std::vector<char> seen(mapping.size(), 0);
    for (int c : mapping) {
        if (c < 0 || c >= size() || seen[c]) return false;
        seen[c] = 1;
    }
    return true;
}

double frobenius_norm(const Eigen::MatrixXd& a) {
    // Scaled accumulation guards against overflow for large entries.
    const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    return scale * std::sqrt((a / scale).squaredNorm());
}

PermutationMatrix hungarian(const Eigen::MatrixXd& cost, AssignmentSense sense) {
    if (cost.rows() != cost.cols()) throw Error("hungarian: cost matrix must be square");
    const int n = static_cast<int>(cost.rows());
    if (!cost.allFinite()) throw Error("hungarian: cost matrix has non-finite entries");
    if (n == 0) return {};
    const double sign = sense == AssignmentSense::min ? 1.0 : -1.0;
    const double inf = std::numeric_limits<double>::infinity();

    // 1-based potentials; column 0 is the virtual source.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (int row = 1; row <= n; ++row) {
        match[0] = row;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = sign * cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    PermutationMatrix p;
    p.mapping.assign(n, -1);
    for (int j = 1; j <= n; ++j) p.mapping[match[j] - 1] = j - 1;
    return p;
}

double assignment_cost(const Eigen::MatrixXd& cost, const PermutationMatrix& p) {
    double total = 0.0;
    for (int i = 0; i < p.size(); ++i) total += cost(i, p.mapping[i]);
    return total;
}

bool is_permutation(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) return false;
    const auto n = a.rows();
    std::vector<int> col_count(n, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        int ones = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double x = a(i, j);
            if (x == 1.0) {
                ++ones;
                ++col_count[j];
            } else if (x != 0.0) {
                return false;
            }
        }
        if (ones != 1) return false;
    }
    return std::all_of(col_count.begin(), col_count.end(), [](int c) { return c == 1; });
}

bool is_doubly_stochastic(const Eigen::MatrixXd& a, double tol) {
    if (a.rows() != a.cols() || a.rows() == 0) return false;
    if ((a.array() < -tol).any()) return false;
    const Eigen::VectorXd rows = a.rowwise().sum();
    const Eigen::RowVectorXd cols = a.colwise().sum();
    return (rows.array() - 1.0).abs().maxCoeff() <= tol && (cols.array() - 1.0).abs().maxCoeff() <= tol;
}

Eigen::MatrixXd birkhoff_reconstruct(const std::vector<BirkhoffTerm>& terms, int n) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (const auto& term : terms) {
        for (int i = 0; i < n; ++i) x(i, term.permutation.mapping[i]) += term.weight;
    }
    return x;
}

namespace {

/// Removes affinely dependent terms until at most `limit` remain. Reconstruction
/// and total weight are preserved exactly in exact arithmetic.
void caratheodory_reduce(std::vector<BirkhoffTerm>& terms, int n, std::size_t limit) {
    while (terms.size() > limit) {
        const auto count = static_cast<Eigen::Index>(terms.size());
        Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n * n + 1, count);
        for (Eigen::Index t = 0; t < count; ++t) {
            for (int i = 0; i < n; ++i) system(i * n + terms[t].permutation.mapping[i], t) = 1.0;
            system(n * n, t) = 1.0;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
        const Eigen::MatrixXd kernel = lu.kernel();
        if (kernel.cols() == 0 || kernel.col(0).cwiseAbs().maxCoeff() == 0.0) break;
        Eigen::VectorXd c = kernel.col(0);
        if (c.maxCoeff() <= 0.0) c = -c;
        double step = std::numeric_limits<double>::infinity();
        Eigen::Index drop = -1;
        for (Eigen::Index t = 0; t < count; ++t) {
            if (c[t] > 0.0 && terms[t].weight / c[t] < step) {
                step = terms[t].weight / c[t];
                drop = t;
            }
        }
        for (Eigen::Index t = 0; t < count; ++t) terms[t].weight -= step * c[t];
        terms.erase(terms.begin() + drop);
        std::erase_if(terms, [](const BirkhoffTerm& term) { return term.weight <= 0.0; });
    }
}

}  // namespace

std::vector<BirkhoffTerm> birkhoff_decompose(const Eigen::MatrixXd& x, double tol) {
    if (!is_doubly_stochastic(x, tol)) throw Error("birkhoff_decompose: input is not doubly stochastic");
    const int n = static_cast<int>(x.rows());
    Eigen::MatrixXd rest = x;
    std::vector<BirkhoffTerm> terms;
    // Each step zeroes at least one entry, so n^2 steps always suffice.
    for (int step = 0; step <= n * n && rest.maxCoeff() > tol; ++step) {
        const Eigen::MatrixXd support_cost = (rest.array() > tol).select(Eigen::MatrixXd::Zero(n, n), 1.0);
        PermutationMatrix p = hungarian(support_cost, AssignmentSense::min);
        if (assignment_cost(support_cost, p) > 0.0) {
            throw Error("birkhoff_decompose: no permutation inside the positive support "
                        "(input is not doubly stochastic within tolerance)");
        }
        double weight = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) weight = std::min(weight, rest(i, p.mapping[i]));
        for (int i = 0; i < n; ++i) rest(i, p.mapping[i]) -= weight;
        terms.push_back({weight, std::move(p)});
    }
    const std::size_t limit = static_cast<std::size_t>((n - 1) * (n - 1) + 1);
    caratheodory_reduce(terms, n, limit);
    return terms;
}

}  // namespace spectral_match
