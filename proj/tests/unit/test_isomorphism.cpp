#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "oracles.hpp"
#include "spectral_match/error.hpp"
#include "spectral_match/isomorphism.hpp"

using namespace spectral_match;

namespace {

Eigen::MatrixXd distinct_spectrum_graph(int n, std::mt19937_64& rng) {
    for (;;) {
        Eigen::MatrixXd a = oracle::random_graph(n, rng, 0.4);
        if (oracle::min_eigengap(a) > 1e-3) return a;
    }
}

// Minimum of |A - P B P^T|_F over all n! permutations.
std::pair<std::vector<int>, double> brute_force_iso(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    auto p = oracle::identity_perm(static_cast<int>(a.rows()));
    std::vector<int> best_p = p;
    double best = 1e300;
    do {
        const Eigen::MatrixXd pm = oracle::perm_matrix(p);
        const double r = (a - pm * b * pm.transpose()).norm();
        if (r < best) {
            best = r;
            best_p = p;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return {best_p, best};
}

}  // namespace

TEST_SUITE("isomorphism") {
    TEST_CASE("exact recovery of a known permutation, n = 6") {
        std::mt19937_64 rng(31);
        const Eigen::MatrixXd b = distinct_spectrum_graph(6, rng);
        const auto p0 = oracle::random_perm(6, rng);
        const Eigen::MatrixXd pm = oracle::perm_matrix(p0);
        const Eigen::MatrixXd a = pm * b * pm.transpose();
        const auto r = exact_spectral_isomorphism(a, b);
        REQUIRE(r.has_value());
        CHECK(r->permutation.mapping == p0);
        CHECK(r->exact);
        CHECK(r->residual <= 1e-8 * a.norm());
        CHECK(brute_force_iso(a, b).second == doctest::Approx(0.0));

        const IsoResult u = umeyama_match(a, b);
        CHECK(u.permutation.mapping == p0);
        CHECK(u.exact);
    }

    TEST_CASE("identical matrices give the identity") {
        std::mt19937_64 rng(32);
        const Eigen::MatrixXd a = distinct_spectrum_graph(7, rng);
        const auto r = exact_spectral_isomorphism(a, a);
        REQUIRE(r.has_value());
        CHECK(r->permutation == PermutationMatrix::identity(7));
        CHECK(r->residual == doctest::Approx(0.0));
        const IsoResult u = umeyama_match(a, a);
        CHECK(u.permutation == PermutationMatrix::identity(7));
        CHECK(u.residual < 1e-12);
    }

    TEST_CASE("different spectra give none") {
        std::mt19937_64 rng(33);
        const Eigen::MatrixXd a = distinct_spectrum_graph(5, rng);
        Eigen::MatrixXd b = a;
        b(0, 1) += 0.5;
        b(1, 0) += 0.5;
        CHECK_FALSE(exact_spectral_isomorphism(a, b).has_value());
    }

    TEST_CASE("degenerate spectrum and size limit") {
        const Eigen::MatrixXd k4 = Eigen::MatrixXd::Ones(4, 4) - Eigen::MatrixXd::Identity(4, 4);
        CHECK_THROWS_AS(exact_spectral_isomorphism(k4, k4), DegenerateSpectrumError);
        CHECK(umeyama_match(k4, k4).degenerate_spectrum);
        std::mt19937_64 rng(34);
        const Eigen::MatrixXd big = oracle::random_graph(13, rng);
        CHECK_THROWS_AS(exact_spectral_isomorphism(big, big), Error);
    }

    TEST_CASE("umeyama on a perturbed isomorphic pair") {
        std::mt19937_64 rng(35);
        const Eigen::MatrixXd b = distinct_spectrum_graph(6, rng);
        const auto p0 = oracle::random_perm(6, rng);
        const Eigen::MatrixXd pm = oracle::perm_matrix(p0);
        Eigen::MatrixXd e = oracle::random_symmetric(6, rng);
        e *= 1e-3 / e.norm();
        const Eigen::MatrixXd a = pm * b * pm.transpose() + e;
        const IsoResult u = umeyama_match(a, b);
        CHECK(u.permutation.mapping == p0);
        CHECK(u.residual <= 3e-3);
        const auto brute = brute_force_iso(a, b);
        CHECK(brute.first == p0);
        CHECK(u.residual == doctest::Approx(brute.second).epsilon(1e-12));
    }

    TEST_CASE("hoffman-wielandt examples") {
        std::mt19937_64 rng(36);
        const Eigen::MatrixXd a = oracle::random_symmetric(5, rng);
        const auto same = hoffman_wielandt_gap(a, a);
        CHECK(same.lower_bound == doctest::Approx(0.0));
        CHECK(same.frobenius_distance == doctest::Approx(0.0));

        const Eigen::MatrixXd d1 = Eigen::Vector2d(0, 1).asDiagonal();
        const Eigen::MatrixXd d2 = Eigen::Vector2d(0, 2).asDiagonal();
        const auto eq = hoffman_wielandt_gap(d1, d2);
        CHECK(eq.lower_bound == doctest::Approx(1.0));
        CHECK(eq.frobenius_distance == doctest::Approx(1.0));
    }

    TEST_CASE("hoffman-wielandt inequality on random pairs") {
        std::mt19937_64 rng(37);
        for (int t = 0; t < 200; ++t) {
            const int n = 2 + static_cast<int>(rng() % 9);
            const Eigen::MatrixXd a = oracle::random_symmetric(n, rng), b = oracle::random_symmetric(n, rng);
            const auto hw = hoffman_wielandt_gap(a, b);
            // Independent evaluation from sorted eigenvalues.
            const Eigen::VectorXd ea = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
            const Eigen::VectorXd eb = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b).eigenvalues();
            CHECK(hw.lower_bound == doctest::Approx((ea - eb).squaredNorm()).epsilon(1e-10));
            CHECK(hw.frobenius_distance == doctest::Approx((a - b).squaredNorm()).epsilon(1e-12));
            CHECK(hw.lower_bound <= hw.frobenius_distance * (1 + 1e-9));
        }
    }

    TEST_CASE("umeyama equality: Q* = U_A S U_B^T attains the spectral bound") {
        std::mt19937_64 rng(38);
        for (int t = 0; t < 20; ++t) {
            const Eigen::MatrixXd a = oracle::random_symmetric(6, rng), b = oracle::random_symmetric(6, rng);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sa(a), sb(b);
            Eigen::VectorXd s(6);
            for (int i = 0; i < 6; ++i) s[i] = (rng() & 1) ? 1.0 : -1.0;
            const Eigen::MatrixXd q = sa.eigenvectors() * s.asDiagonal() * sb.eigenvectors().transpose();
            const double lhs = (a - q * b * q.transpose()).squaredNorm();
            CHECK(lhs == doctest::Approx((sa.eigenvalues() - sb.eigenvalues()).squaredNorm()).epsilon(1e-6));
        }
    }

    TEST_CASE("residual helper follows A_A = P A_B P^T") {
        std::mt19937_64 rng(39);
        const Eigen::MatrixXd b = oracle::random_graph(5, rng);
        const auto p0 = oracle::random_perm(5, rng);
        const Eigen::MatrixXd pm = oracle::perm_matrix(p0);
        CHECK(isomorphism_residual(pm * b * pm.transpose(), b, PermutationMatrix{p0}) < 1e-14);
    }
}
