#pragma once

#include <vector>

#include <Eigen/Core>

namespace spectral_match {

/// Permutation stored as a mapping: row i has its 1 in column mapping[i].
struct PermutationMatrix {
    std::vector<int> mapping;

    static PermutationMatrix identity(int n);

    int size() const { return static_cast<int>(mapping.size()); }
    Eigen::MatrixXd dense() const;
    PermutationMatrix inverse() const;
    bool is_valid() const;

    friend bool operator==(const PermutationMatrix&, const PermutationMatrix&) = default;
};

double frobenius_norm(const Eigen::MatrixXd& a);

enum class AssignmentSense { min, max };

/// O(n^3) shortest-augmenting-path Hungarian method on a square cost matrix.
/// Ties resolve toward the lowest row, then the lowest column.
PermutationMatrix hungarian(const Eigen::MatrixXd& cost, AssignmentSense sense);

/// Sum of cost(i, mapping[i]).
double assignment_cost(const Eigen::MatrixXd& cost, const PermutationMatrix& p);

bool is_permutation(const Eigen::MatrixXd& a);
bool is_doubly_stochastic(const Eigen::MatrixXd& a, double tol);

struct BirkhoffTerm {
    double weight;
    PermutationMatrix permutation;
};

/// Greedy Birkhoff-von Neumann decomposition. Each step finds a permutation inside
/// the strictly positive support and peels off its smallest matched entry; a
/// Caratheodory pass then caps the term count at (n-1)^2 + 1.
std::vector<BirkhoffTerm> birkhoff_decompose(const Eigen::MatrixXd& x, double tol = 1e-9);

Eigen::MatrixXd birkhoff_reconstruct(const std::vector<BirkhoffTerm>& terms, int n);

}  // namespace spectral_match
