#include <cmath>

#include <Eigen/Eigenvalues>

#include "doctest.h"

#include "oracles.hpp"
#include "spectral_match/error.hpp"
#include "spectral_match/shapes.hpp"
#include "spectral_match/spectral.hpp"

using namespace spectral_match;

namespace {

Graph p3() { return graph_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

// |cos| between two vectors.
double alignment(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

}  // namespace

TEST_SUITE("spectral") {
    TEST_CASE("P3 eigenvalues") {
        const Spectrum s = eigs_smallest(assemble(p3(), LaplacianKind::combinatorial), 2);
        CHECK(s.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.eigenvalues[2] == doctest::Approx(3.0).epsilon(1e-12));
    }

    TEST_CASE("K2 eigenvalues") {
        const Spectrum s = eigs_smallest(assemble(graph_from_edges(2, {{0, 1, 1.0}}), LaplacianKind::combinatorial), 1);
        CHECK(std::abs(s.eigenvalues[0]) < 1e-14);
        CHECK(s.eigenvalues[1] == doctest::Approx(2.0));
    }

    TEST_CASE("dense_eig examples") {
        const Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
        const Spectrum s = dense_eig(d);
        CHECK(s.eigenvalues.isApprox(Eigen::Vector3d(1, 2, 3)));

        const Spectrum p = dense_eig(Eigen::MatrixXd(assemble(p3(), LaplacianKind::combinatorial).matrix));
        CHECK(alignment(p.eigenvectors.col(1), Eigen::Vector3d(1, 0, -1)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(alignment(p.eigenvectors.col(2), Eigen::Vector3d(1, -2, 1)) == doctest::Approx(1.0).epsilon(1e-12));

        std::mt19937_64 rng(4);
        const Eigen::MatrixXd a = oracle::random_symmetric(30, rng);
        const Spectrum r = dense_eig(a);
        const Eigen::MatrixXd rec = r.eigenvectors * r.eigenvalues.asDiagonal() * r.eigenvectors.transpose();
        CHECK((rec - a).norm() <= 1e-8 * a.norm());
    }

    TEST_CASE("null eigenvector is parallel to the ones vector") {
        const Mesh m = make_sphere({.rings = 12, .segments = 15});
        const Spectrum s = eigs_smallest(assemble(build_graph(m, Weighting::gaussian()), LaplacianKind::combinatorial), 10);
        CHECK(alignment(s.eigenvectors.col(0), Eigen::VectorXd::Ones(m.vertex_count())) > 1 - 1e-6);
    }

    TEST_CASE("iterative solver matches the dense oracle on a mesh") {
        const Mesh m = make_torus({.major_steps = 16, .minor_steps = 10});
        const Graph g = build_graph(m, Weighting::gaussian());
        const auto lap = assemble(g, LaplacianKind::combinatorial);
        const int k = 12;
        const Spectrum s = eigs_smallest(lap, k);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(lap.matrix));
        for (int i = 0; i <= k; ++i) {
            CHECK(std::abs(s.eigenvalues[i] - es.eigenvalues()[i]) <= 1e-8 * es.eigenvalues().maxCoeff());
        }
        const Eigen::MatrixXd gram = s.eigenvectors.transpose() * s.eigenvectors;
        CHECK((gram - Eigen::MatrixXd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() < 1e-10);
        for (int i = 0; i <= k; ++i) {
            const Eigen::VectorXd r = Eigen::MatrixXd(lap.matrix) * s.eigenvectors.col(i) - s.eigenvalues[i] * s.eigenvectors.col(i);
            CHECK(r.norm() <= 1e-8 * 4 * g.degrees.maxCoeff());
        }
    }

    TEST_CASE("eigenvectors are sign canonicalized") {
        const Mesh m = make_sphere({.rings = 10, .segments = 11});
        const Spectrum s = eigs_smallest(assemble(build_graph(m, Weighting::gaussian()), LaplacianKind::combinatorial), 6);
        for (int k = 0; k < s.size(); ++k) {
            Eigen::Index idx;
            s.eigenvectors.col(k).cwiseAbs().maxCoeff(&idx);
            CHECK(s.eigenvectors(idx, k) > 0.0);
        }
    }

    TEST_CASE("solver is deterministic for a fixed seed") {
        const Mesh m = make_sphere({.rings = 16, .segments = 20});
        const auto lap = assemble(build_graph(m, Weighting::gaussian()), LaplacianKind::combinatorial);
        const Spectrum a = eigs_smallest(lap, 8), b = eigs_smallest(lap, 8);
        CHECK(a.eigenvalues == b.eigenvalues);
        CHECK(a.eigenvectors == b.eigenvectors);
    }

    TEST_CASE("disconnected graph is detected") {
        const Graph g = graph_from_edges(4, {{0, 1, 1.0}, {2, 3, 1.0}});
        CHECK_THROWS_AS(eigs_smallest(assemble(g, LaplacianKind::combinatorial), 2), DisconnectedGraphError);
    }

    TEST_CASE("random-walk Laplacian is refused") {
        CHECK_THROWS_AS(eigs_smallest(assemble(p3(), LaplacianKind::random_walk), 1), Error);
    }

    TEST_CASE("spectral properties on P3") {
        const Graph g = p3();
        const Spectrum s = eigs_smallest(assemble(g, LaplacianKind::combinatorial), 2);
        const SpectralReport rep = check_spectral_properties(s, g);
        CHECK(rep.all_passed());
        CHECK(s.eigenvalues.maxCoeff() <= 2 * g.degrees.maxCoeff());
    }

    TEST_CASE("K2 normalized spectrum sits on the gamma <= 2 bound") {
        const Graph g = graph_from_edges(2, {{0, 1, 1.0}});
        const Spectrum s = dense_eig(Eigen::MatrixXd(assemble(g, LaplacianKind::normalized).matrix));
        Spectrum tagged = s;
        tagged.source_kind = LaplacianKind::normalized;
        CHECK(s.eigenvalues[1] == doctest::Approx(2.0));
        CHECK(check_spectral_properties(tagged, g).all_passed());
    }

    TEST_CASE("spectral properties on a random connected graph, n = 50") {
        std::mt19937_64 rng(8);
        const Graph g = graph_from_dense(oracle::random_graph(50, rng, 0.1));
        const Spectrum s = dense_eig(Eigen::MatrixXd(assemble(g, LaplacianKind::combinatorial).matrix));
        CHECK(check_spectral_properties(s, g).all_passed());
    }
}
