#include "spectral_match/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "spectral_match/alignment.hpp"
#include "spectral_match/em_registration.hpp"
#include "spectral_match/embedding.hpp"
#include "spectral_match/evaluation.hpp"
#include "spectral_match/isomorphism.hpp"
#include "spectral_match/laplacian.hpp"
#include "spectral_match/matutil.hpp"
#include "spectral_match/pipeline.hpp"
#include "spectral_match/shapes.hpp"
#include "spectral_match/spectral.hpp"

namespace spectral_match {

namespace {

Graph path3() { return graph_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}); }

Eigen::MatrixXd random_connected_weights(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> w(0.5, 2.0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
        a(i, j) = a(j, i) = w(rng);
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a(i, j) == 0.0 && std::bernoulli_distribution(0.4)(rng)) a(i, j) = a(j, i) = w(rng);
    return a;
}

PermutationMatrix random_permutation(int n, std::mt19937_64& rng) {
    PermutationMatrix p = PermutationMatrix::identity(n);
    std::shuffle(p.mapping.begin(), p.mapping.end(), rng);
    return p;
}

bool check_p3_spectrum() {
    const Spectrum s = eigs_smallest(assemble(path3(), LaplacianKind::combinatorial), 2);
    return std::abs(s.eigenvalues[0]) < 1e-10 && std::abs(s.eigenvalues[1] - 1.0) < 1e-10 &&
           std::abs(s.eigenvalues[2] - 3.0) < 1e-10;
}

bool check_p3_commute_time() {
    const Graph g = path3();
    const Spectrum s = eigs_smallest(assemble(g, LaplacianKind::combinatorial), 2);
    return std::abs(commute_time_distance(s, 0, 1, g.volume) - 4.0) < 1e-9 &&
           std::abs(commute_time_distance(s, 0, 2, g.volume) - 8.0) < 1e-9;
}

bool check_p3_theta() {
    Eigen::VectorXd lambda(2);
    lambda << 1.0, 3.0;
    return std::abs(theta_min(lambda, 3, 1) - 0.5) < 1e-15;
}

bool check_spectrum_invariants() {
    SphereParams sp;
    sp.rings = 10;
    sp.segments = 12;
    const Mesh mesh = make_sphere(sp);
    const Graph g = build_graph(mesh, Weighting::gaussian());
    const Spectrum s = eigs_smallest(assemble(g, LaplacianKind::combinatorial), 8);
    return check_spectral_properties(s, g).all_passed();
}

bool check_hungarian() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd c(5, 5);
        for (int i = 0; i < 25; ++i) c(i / 5, i % 5) = u(rng);
        std::vector<int> perm(5);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double total = 0.0;
            for (int i = 0; i < 5; ++i) total += c(i, perm[i]);
            best = std::min(best, total);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (std::abs(assignment_cost(c, hungarian(c, AssignmentSense::min)) - best) > 1e-12) return false;
    }
    return true;
}

bool check_birkhoff() {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 4;
        Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
        std::vector<double> weights(6);
        for (double& w : weights) w = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double w : weights) x += (w / total) * random_permutation(n, rng).dense();
        const auto terms = birkhoff_decompose(x);
        if (terms.size() > static_cast<std::size_t>((n - 1) * (n - 1) + 1)) return false;
        if ((birkhoff_reconstruct(terms, n) - x).cwiseAbs().maxCoeff() > 1e-8) return false;
    }
    return true;
}

bool check_exact_isomorphism() {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd b = random_connected_weights(6, rng);
    const PermutationMatrix p0 = random_permutation(6, rng);
    const Eigen::MatrixXd a = p0.dense() * b * p0.dense().transpose();
    const auto exact = exact_spectral_isomorphism(a, b);
    const IsoResult ume = umeyama_match(a, b);
    return exact && exact->permutation == p0 && ume.exact && ume.permutation == p0;
}

bool check_hoffman_wielandt() {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::MatrixXd a(6, 6), b(6, 6);
        for (int i = 0; i < 36; ++i) {
            a(i / 6, i % 6) = g(rng);
            b(i / 6, i % 6) = g(rng);
        }
        a = 0.5 * (a + a.transpose()).eval();
        b = 0.5 * (b + b.transpose()).eval();
        const auto hw = hoffman_wielandt_gap(a, b);
        if (hw.lower_bound > hw.frobenius_distance * (1.0 + 1e-9)) return false;
    }
    return true;
}

bool check_signature_mirror() {
    std::mt19937_64 rng(9);
    std::exponential_distribution<double> e(1.0);
    Eigen::VectorXd u(500);
    for (Eigen::Index i = 0; i < u.size(); ++i) u[i] = e(rng);
    u.array() -= u.mean();
    const EigenSignature h = eigensignature(u);
    const EigenSignature hm = eigensignature(-u);
    return hm.mass == h.mass.reverse() && histogram_similarity(h, h) == 1.0 &&
           histogram_similarity(h, hm) < 1.0;
}

bool check_em_identity() {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> g;
    Eigen::MatrixXd x(3, 40);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
    const Correspondence c = em_register(x, x, Eigen::MatrixXd::Identity(3, 3));
    if (c.map_matches.size() != 40) return false;
    return std::all_of(c.map_matches.begin(), c.map_matches.end(), [](const Match& m) { return m.i == m.j; });
}

bool check_geodesics() {
    SphereParams sp;
    sp.rings = 8;
    sp.segments = 10;
    const Mesh mesh = make_sphere(sp);
    const GeodesicGraph graph(mesh);
    std::vector<std::vector<double>> d;
    for (int v = 0; v < mesh.vertex_count(); ++v) d.push_back(graph.distances_from(v));
    for (int a = 0; a < mesh.vertex_count(); ++a)
        for (int b = 0; b < mesh.vertex_count(); ++b) {
            if (std::abs(d[a][b] - d[b][a]) > 1e-12) return false;
            for (int c = 0; c < mesh.vertex_count(); c += 7)
                if (d[a][b] > d[a][c] + d[c][b] + 1e-12) return false;
        }
    return true;
}

bool check_mesh_roundtrip() {
    SphereParams sp;
    sp.rings = 5;
    sp.segments = 6;
    const Mesh mesh = make_sphere(sp);
    std::stringstream off;
    write_off(off, mesh);
    const Mesh back = read_off(off);
    return back.faces == mesh.faces && back.vertices == mesh.vertices;
}

bool check_isometry_pipeline() {
    SphereParams sp;
    sp.rings = 14;
    sp.segments = 18;
    sp.bumps = 4;
    const Mesh mesh = make_sphere(sp);
    const SynthResult syn = synth_transform(mesh, {SynthKind::isometry_relabel, 0.0}, 21);
    const MatchResult r = run_match(mesh, syn.mesh, PipelineConfig{});
    const ErrorReport rep = registration_error(r.correspondence.map_matches, syn.gt, mesh);
    return rep.exact_rate() == 1.0 && rep.mean == 0.0;
}

}  // namespace

int run_selftest(std::ostream& out) {
    const std::vector<std::pair<std::string, bool (*)()>> checks = {
        {"p3_spectrum", check_p3_spectrum},
        {"p3_commute_time", check_p3_commute_time},
        {"p3_theta_min", check_p3_theta},
        {"spectral_properties", check_spectrum_invariants},
        {"hungarian_brute_force", check_hungarian},
        {"birkhoff_reconstruction", check_birkhoff},
        {"exact_isomorphism", check_exact_isomorphism},
        {"hoffman_wielandt", check_hoffman_wielandt},
        {"eigensignature_mirror", check_signature_mirror},
        {"em_identity", check_em_identity},
        {"geodesic_metric", check_geodesics},
        {"off_roundtrip", check_mesh_roundtrip},
        {"isometry_pipeline", check_isometry_pipeline},
    };
    int failures = 0;
    for (const auto& [name, check] : checks) {
        bool ok = false;
        std::string detail;
        try {
            ok = check();
        } catch (const std::exception& e) {
            detail = std::string(" (") + e.what() + ")";
        }
        out << (ok ? "PASS " : "FAIL ") << name << detail << '\n';
        failures += !ok;
    }
    out << (failures ? "selftest: " + std::to_string(failures) + " failure(s)" : std::string("selftest: all passed"))
        << '\n';
    return failures;
}

}  // namespace spectral_match
