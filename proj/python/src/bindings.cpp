#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spectral_match/error.hpp"
#include "spectral_match/evaluation.hpp"
#include "spectral_match/isomorphism.hpp"
#include "spectral_match/matutil.hpp"
#include "spectral_match/pipeline.hpp"
#include "spectral_match/report.hpp"
#include "spectral_match/selftest.hpp"
#include "spectral_match/shapes.hpp"

namespace py = pybind11;
namespace sm = spectral_match;

namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

sm::Mesh mesh_from_arrays(const RowMatrixXd& vertices, const RowMatrixXi& faces) {
    if (vertices.cols() != 3 || faces.cols() != 3) throw sm::Error("vertices and faces must have three columns");
    sm::Mesh m;
    for (Eigen::Index i = 0; i < vertices.rows(); ++i) m.vertices.emplace_back(vertices.row(i).transpose());
    for (Eigen::Index f = 0; f < faces.rows(); ++f) m.faces.push_back({faces(f, 0), faces(f, 1), faces(f, 2)});
    sm::validate(m);
    return m;
}

RowMatrixXd vertex_array(const sm::Mesh& m) {
    RowMatrixXd v(m.vertex_count(), 3);
    for (int i = 0; i < m.vertex_count(); ++i) v.row(i) = m.vertices[i].transpose();
    return v;
}

RowMatrixXi face_array(const sm::Mesh& m) {
    RowMatrixXi f(m.face_count(), 3);
    for (int i = 0; i < m.face_count(); ++i) f.row(i) << m.faces[i][0], m.faces[i][1], m.faces[i][2];
    return f;
}

sm::PipelineConfig make_config(const std::string& weighting, std::optional<double> sigma, std::optional<int> k,
                               double theta, const std::string& embedding, double sig_threshold, double pi_out,
                               double em_tol, int em_max_iter, std::uint64_t seed) {
    sm::PipelineConfig c;
    try {
        if (weighting == "uniform") {
            c.weighting = sm::Weighting::uniform();
        } else if (weighting == "gaussian") {
            c.weighting = sm::Weighting::gaussian(sigma);
        } else {
            throw sm::Error("weighting must be 'uniform' or 'gaussian'");
        }
        c.k = k;
        c.theta = theta;
        c.embedding = sm::embedding_setting_from_string(embedding);
        c.sig_threshold = sig_threshold;
        c.em.pi_out = pi_out;
        c.em.tol = em_tol;
        c.em.max_iterations = em_max_iter;
        c.seed = seed;
        c.validate();
    } catch (const sm::Error& e) {
        throw sm::StageError("config", e.what());
    }
    return c;
}

py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Eigen::MatrixXi matches_array(const std::vector<sm::Match>& matches) {
    Eigen::MatrixXi out(static_cast<Eigen::Index>(matches.size()), 2);
    for (std::size_t t = 0; t < matches.size(); ++t) out.row(static_cast<Eigen::Index>(t)) << matches[t].j, matches[t].i;
    return out;
}

std::vector<sm::Match> matches_from_array(const Eigen::MatrixXi& a) {
    if (a.cols() != 2) throw sm::Error("matches must be an (m, 2) array of (j, i)");
    std::vector<sm::Match> out;
    for (Eigen::Index r = 0; r < a.rows(); ++r) out.push_back({a(r, 0), a(r, 1), 1.0});
    return out;
}

sm::GroundTruth gt_from_array(const Eigen::MatrixXi& a) {
    if (a.cols() != 2) throw sm::Error("ground truth must be an (m, 2) array of (j, i)");
    sm::GroundTruth gt;
    for (Eigen::Index r = 0; r < a.rows(); ++r) gt.pairs.emplace_back(a(r, 0), a(r, 1));
    return gt;
}

#define CONFIG_ARGS                                                                                              \
    py::arg("weighting") = "gaussian", py::arg("sigma") = py::none(), py::arg("k") = py::none(),                \
        py::arg("theta") = 0.95, py::arg("embedding") = "sm2",                                                  \
        py::arg("sig_threshold") = sm::kDefaultSignatureThreshold, py::arg("pi_out") = 0.01,                    \
        py::arg("em_tol") = 1e-6, py::arg("em_max_iter") = 100, py::arg("seed") = 0x5eed

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spectral shape matching core";

    auto base = py::register_exception<sm::Error>(m, "Error");
    py::register_exception<sm::StageError>(m, "StageError", base.ptr());

    py::class_<sm::Mesh>(m, "Mesh")
        .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("faces"))
        .def_property_readonly("vertices", &vertex_array)
        .def_property_readonly("faces", &face_array)
        .def_property_readonly("vertex_count", &sm::Mesh::vertex_count)
        .def_property_readonly("face_count", &sm::Mesh::face_count)
        .def("save", [](const sm::Mesh& mesh, const std::string& path) {
            sm::save_mesh(path, mesh, sm::format_from_path(path));
        });

    m.def("load_mesh", [](const std::string& path) { return sm::load_mesh(path); }, py::arg("path"));

    m.def(
        "make_sphere",
        [](int rings, int segments, int bumps, std::uint64_t seed) {
            sm::SphereParams p;
            p.rings = rings;
            p.segments = segments;
            p.bumps = bumps;
            p.seed = seed;
            return sm::make_sphere(p);
        },
        py::arg("rings") = 30, py::arg("segments") = 40, py::arg("bumps") = 0, py::arg("seed") = 1);
    m.def(
        "make_torus",
        [](int major_steps, int minor_steps, std::uint64_t seed) {
            sm::TorusParams p;
            p.major_steps = major_steps;
            p.minor_steps = minor_steps;
            p.seed = seed;
            return sm::make_torus(p);
        },
        py::arg("major_steps") = 48, py::arg("minor_steps") = 24, py::arg("seed") = 1);
    m.def(
        "make_cylinder",
        [](int rings, int segments, double bend_angle, std::uint64_t seed) {
            sm::CylinderParams p;
            p.rings = rings;
            p.segments = segments;
            p.bend_angle = bend_angle;
            p.seed = seed;
            return sm::make_articulated_cylinder(p);
        },
        py::arg("rings") = 50, py::arg("segments") = 30, py::arg("bend_angle") = 1.0, py::arg("seed") = 1);

    m.def(
        "synth",
        [](const sm::Mesh& mesh, const std::string& kind, double param, std::uint64_t seed) {
            const sm::SynthResult r = sm::synth_transform(mesh, {sm::synth_kind_from_string(kind), param}, seed);
            return py::make_tuple(r.mesh, matches_array([&] {
                std::vector<sm::Match> v;
                for (const auto& [j, i] : r.gt.pairs) v.push_back({j, i, 1.0});
                return v;
            }()));
        },
        py::arg("mesh"), py::arg("kind"), py::arg("param") = 0.0, py::arg("seed") = 0x5eed,
        "Returns (mesh, ground_truth) with ground_truth rows (j_new, i_original).");

    m.def(
        "match",
        [](const sm::Mesh& a, const sm::Mesh& b, const std::string& weighting, std::optional<double> sigma,
           std::optional<int> k, double theta, const std::string& embedding, double sig_threshold, double pi_out,
           double em_tol, int em_max_iter, std::uint64_t seed) {
            const auto config =
                make_config(weighting, sigma, k, theta, embedding, sig_threshold, pi_out, em_tol, em_max_iter, seed);
            sm::MatchResult r;
            {
                py::gil_scoped_release release;
                r = sm::run_match(a, b, config);
            }
            py::dict out;
            out["matches"] = matches_array(r.correspondence.map_matches);
            Eigen::VectorXd post(static_cast<Eigen::Index>(r.correspondence.map_matches.size()));
            for (std::size_t t = 0; t < r.correspondence.map_matches.size(); ++t)
                post[static_cast<Eigen::Index>(t)] = r.correspondence.map_matches[t].posterior;
            out["posterior"] = post;
            out["unmatched"] = r.correspondence.unmatched;
            out["report"] = to_py(sm::to_json(r, config));
            return out;
        },
        py::arg("mesh_a"), py::arg("mesh_b"), CONFIG_ARGS,
        "Dense correspondence of mesh_b onto mesh_a. 'matches' rows are (j in B, i in A).");

    m.def(
        "embed",
        [](const sm::Mesh& mesh, const std::string& weighting, std::optional<double> sigma, std::optional<int> k,
           double theta, const std::string& embedding, double sig_threshold, double pi_out, double em_tol,
           int em_max_iter, std::uint64_t seed) {
            const auto r = sm::run_embed(
                mesh, make_config(weighting, sigma, k, theta, embedding, sig_threshold, pi_out, em_tol, em_max_iter, seed));
            return py::make_tuple(r.embedding.coords, r.dimension.theta_min);
        },
        py::arg("mesh"), CONFIG_ARGS, "Returns (K x n coordinates, theta_min table).");
    m.def(
        "embed_graph",
        [](const Eigen::MatrixXd& adjacency, std::optional<int> k, double theta, const std::string& embedding) {
            const auto c = make_config("gaussian", std::nullopt, k, theta, embedding, sm::kDefaultSignatureThreshold,
                                       0.01, 1e-6, 100, 0x5eed);
            const auto r = sm::run_embed(sm::graph_from_dense(adjacency), c);
            return py::make_tuple(r.embedding.coords, r.dimension.theta_min);
        },
        py::arg("adjacency"), py::arg("k") = py::none(), py::arg("theta") = 0.95, py::arg("embedding") = "sm2");

    m.def(
        "registration_error",
        [](const Eigen::MatrixXi& matches, const Eigen::MatrixXi& gt, const sm::Mesh& mesh_a) {
            return to_py(sm::to_json(sm::registration_error(matches_from_array(matches), gt_from_array(gt), mesh_a)));
        },
        py::arg("matches"), py::arg("ground_truth"), py::arg("mesh_a"));

    m.def(
        "hungarian",
        [](const Eigen::MatrixXd& cost, bool maximize) {
            return sm::hungarian(cost, maximize ? sm::AssignmentSense::max : sm::AssignmentSense::min).mapping;
        },
        py::arg("cost"), py::arg("maximize") = false);
    m.def(
        "birkhoff",
        [](const Eigen::MatrixXd& x, double tol) {
            py::list out;
            for (const auto& t : sm::birkhoff_decompose(x, tol)) out.append(py::make_tuple(t.weight, t.permutation.mapping));
            return out;
        },
        py::arg("x"), py::arg("tol") = 1e-9);
    m.def(
        "exact_isomorphism",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) -> py::object {
            const auto r = sm::exact_spectral_isomorphism(a, b);
            return r ? to_py(sm::to_json(*r)) : py::none();
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "umeyama",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, bool hill_climb) {
            sm::UmeyamaOptions o;
            o.hill_climb = hill_climb;
            return to_py(sm::to_json(sm::umeyama_match(a, b, o)));
        },
        py::arg("a"), py::arg("b"), py::arg("hill_climb") = false);

    m.def("selftest", [] {
        std::ostringstream out;
        const int failures = sm::run_selftest(out);
        return py::make_tuple(failures, out.str());
    });
}
