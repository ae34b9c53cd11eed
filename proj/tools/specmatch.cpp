#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "spectral_match/error.hpp"
#include "spectral_match/evaluation.hpp"
#include "spectral_match/isomorphism.hpp"
#include "spectral_match/laplacian.hpp"
#include "spectral_match/pipeline.hpp"
#include "spectral_match/report.hpp"
#include "spectral_match/selftest.hpp"
#include "spectral_match/shapes.hpp"

namespace sm = spectral_match;
namespace fs = std::filesystem;

namespace {

struct ConfigFlags {
    std::string weighting = "gaussian";
    std::optional<double> sigma;
    std::optional<int> k;
    double theta = 0.95;
    std::string embedding = "sm2";
    double sig_threshold = sm::kDefaultSignatureThreshold;
    double pi_out = 0.01;
    double em_tol = 1e-6;
    int em_max_iter = 100;
    std::uint64_t seed = 0x5eed;

    void attach(CLI::App* app) {
        app->add_option("--weighting", weighting, "Edge weights")->check(CLI::IsMember({"uniform", "gaussian"}));
        app->add_option("--sigma", sigma, "Gaussian scale (default: mean edge length)");
        app->add_option("--k", k, "Fixed embedding dimension (default: chosen from --theta)");
        app->add_option("--theta", theta, "Target retained commute-time fraction");
        app->add_option("--embedding", embedding, "sm1 = commute time, sm2 = hypersphere")
            ->check(CLI::IsMember({"sm1", "sm2"}));
        app->add_option("--sig-threshold", sig_threshold, "Eigensignature similarity threshold");
        app->add_option("--pi-out", pi_out, "Outlier mixing weight");
        app->add_option("--em-tol", em_tol, "Relative EM stopping tolerance");
        app->add_option("--em-max-iter", em_max_iter, "EM iteration limit");
        app->add_option("--seed", seed, "Seed for every random choice");
    }

    sm::PipelineConfig build() const {
        sm::PipelineConfig c;
        c.weighting = weighting == "uniform" ? sm::Weighting::uniform() : sm::Weighting::gaussian(sigma);
        if (weighting == "uniform" && sigma) throw sm::StageError("config", "--sigma only applies to gaussian weighting");
        c.k = k;
        c.theta = theta;
        c.embedding = sm::embedding_setting_from_string(embedding);
        c.sig_threshold = sig_threshold;
        c.em.pi_out = pi_out;
        c.em.tol = em_tol;
        c.em.max_iterations = em_max_iter;
        c.seed = seed;
        try {
            c.validate();
        } catch (const sm::Error& e) {
            throw sm::StageError("config", e.what());
        }
        return c;
    }
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw sm::Error("cannot open " + path.string() + " for writing");
    return out;
}

template <typename F>
void write_to(const std::string& path, F&& body) {
    if (path.empty() || path == "-") {
        body(std::cout);
    } else {
        std::ofstream out = open_out(path);
        body(out);
    }
}

sm::Mesh load(const std::string& path) {
    try {
        return sm::load_mesh(path);
    } catch (const sm::StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw sm::StageError("mesh", e.what());
    }
}

sm::Mesh make_shape(const std::string& shape, std::uint64_t seed) {
    if (shape == "sphere") {
        sm::SphereParams p;
        p.seed = seed;
        return sm::make_sphere(p);
    }
    if (shape == "blob") {
        sm::SphereParams p;
        p.bumps = 6;
        p.seed = seed;
        return sm::make_sphere(p);
    }
    if (shape == "torus") {
        sm::TorusParams p;
        p.seed = seed;
        return sm::make_torus(p);
    }
    sm::CylinderParams p;
    p.seed = seed;
    return sm::make_articulated_cylinder(p);
}

void print_theta_table(std::ostream& out, const sm::DimensionChoice& d) {
    out << "# K\ttheta_min\n" << std::setprecision(17);
    for (std::size_t k = 0; k < d.theta_min.size(); ++k) out << (k + 1) << '\t' << d.theta_min[k] << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral shape matching: embed, align, register and evaluate triangle meshes"};
    app.require_subcommand(1);

    // match
    auto* match = app.add_subcommand("match", "Dense correspondence from shape B onto shape A");
    ConfigFlags match_flags;
    std::string mesh_a, mesh_b, match_out, match_report, match_align;
    match->add_option("mesh_a", mesh_a, "Reference mesh (.off/.ply)")->required()->check(CLI::ExistingFile);
    match->add_option("mesh_b", mesh_b, "Mesh to register (.off/.ply)")->required()->check(CLI::ExistingFile);
    match->add_option("-o,--out", match_out, "Correspondence TSV (default: stdout)");
    match->add_option("--report", match_report, "JSON run report");
    match->add_option("--alignment", match_align, "Eigenvector alignment TSV");
    match_flags.attach(match);

    // embed
    auto* embed = app.add_subcommand("embed", "Spectral embedding of one mesh or graph");
    ConfigFlags embed_flags;
    std::string embed_mesh, embed_adj, embed_out, embed_theta;
    auto* embed_mesh_opt = embed->add_option("mesh", embed_mesh, "Mesh (.off/.ply)")->check(CLI::ExistingFile);
    embed->add_option("--adjacency", embed_adj, "Weighted adjacency as a sparse triplet file")
        ->check(CLI::ExistingFile)
        ->excludes(embed_mesh_opt);
    embed->add_option("-o,--out", embed_out, "K x n matrix (default: stdout)");
    embed->add_option("--theta-out", embed_theta, "theta_min table (default: stderr)");
    embed_flags.attach(embed);

    // eval
    auto* eval = app.add_subcommand("eval", "Geodesic error of a correspondence against ground truth");
    std::string eval_a, eval_b, eval_corr, eval_gt, eval_csv;
    int eval_sources = 20;
    std::uint64_t eval_seed = 0;
    eval->add_option("mesh_a", eval_a, "Reference mesh")->required()->check(CLI::ExistingFile);
    eval->add_option("mesh_b", eval_b, "Registered mesh")->required()->check(CLI::ExistingFile);
    eval->add_option("correspondence", eval_corr, "Correspondence TSV")->required()->check(CLI::ExistingFile);
    eval->add_option("ground_truth", eval_gt, "Ground-truth TSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--csv", eval_csv, "Per-vertex error CSV");
    eval->add_option("--diameter-sources", eval_sources, "Sources for the diameter estimate");
    eval->add_option("--seed", eval_seed, "Seed for diameter sources");

    // synth
    auto* synth = app.add_subcommand(
        "synth",
        "Synthetic transform with ground truth.\n"
        "Strength levels L = 1..5: noise 0.05 L (x mean edge), holes 0.01 L (face fraction),\n"
        "sampling 1 - 0.1 L (kept vertex fraction), local_scale 1 + 0.1 L (scale factor).");
    std::string synth_shape, synth_mesh, synth_class = "isometry", synth_out, synth_gt, synth_base;
    std::optional<int> synth_level;
    std::optional<double> synth_param;
    std::uint64_t synth_seed = 0x5eed;
    auto* shape_opt = synth->add_option("--shape", synth_shape, "Built-in shape")
                          ->check(CLI::IsMember({"sphere", "blob", "torus", "cylinder"}));
    synth->add_option("--mesh", synth_mesh, "Input mesh")->check(CLI::ExistingFile)->excludes(shape_opt);
    synth->add_option("--class", synth_class, "Transform class")
        ->check(CLI::IsMember({"isometry", "isometry_relabel", "noise", "holes", "sampling", "local_scale"}));
    auto* level_opt = synth->add_option("--strength", synth_level, "Strength level 1..5")->check(CLI::Range(1, 5));
    synth->add_option("--param", synth_param, "Raw transform parameter")->excludes(level_opt);
    synth->add_option("--seed", synth_seed, "Seed for shape and transform");
    synth->add_option("-o,--out", synth_out, "Transformed mesh")->required();
    synth->add_option("--gt", synth_gt, "Ground-truth TSV")->required();
    synth->add_option("--base-out", synth_base, "Also write the untransformed mesh");

    // isolab
    auto* isolab = app.add_subcommand("isolab", "Exact and Umeyama matching of two weighted graphs");
    std::string iso_a, iso_b, iso_method = "both";
    bool iso_hill = false;
    isolab->add_option("matrix_a", iso_a, "Sparse triplet matrix")->required()->check(CLI::ExistingFile);
    isolab->add_option("matrix_b", iso_b, "Sparse triplet matrix")->required()->check(CLI::ExistingFile);
    isolab->add_option("--method", iso_method, "Which matcher")->check(CLI::IsMember({"exact", "umeyama", "both"}));
    isolab->add_flag("--hill-climb", iso_hill, "Refine Umeyama with transposition moves");

    auto* selftest = app.add_subcommand("selftest", "Invariant suite on built-in fixtures");

    CLI11_PARSE(app, argc, argv);

    try {
        if (match->parsed()) {
            const sm::PipelineConfig config = match_flags.build();
            const sm::Mesh a = load(mesh_a);
            const sm::Mesh b = load(mesh_b);
            const sm::MatchResult r = sm::run_match(a, b, config);
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
            write_to(match_out, [&](std::ostream& o) { sm::write_correspondence_tsv(o, r.correspondence); });
            if (!match_report.empty()) open_out(match_report) << sm::to_json(r, config).dump(2) << '\n';
            if (!match_align.empty()) {
                std::ofstream o = open_out(match_align);
                sm::write_alignment_report(o, r.alignment);
            }
        } else if (embed->parsed()) {
            const sm::PipelineConfig config = embed_flags.build();
            sm::EmbedResult r;
            if (!embed_adj.empty()) {
                const sm::Graph g = [&] {
                    try {
                        return sm::graph_from_dense(Eigen::MatrixXd(sm::read_triplets(fs::path(embed_adj))));
                    } catch (const std::exception& e) {
                        throw sm::StageError("graph", e.what());
                    }
                }();
                r = sm::run_embed(g, config);
            } else if (!embed_mesh.empty()) {
                r = sm::run_embed(load(embed_mesh), config);
            } else {
                throw sm::StageError("config", "embed needs a mesh or --adjacency");
            }
            write_to(embed_out, [&](std::ostream& o) { sm::write_embedding(o, r.embedding); });
            if (embed_theta.empty()) {
                print_theta_table(std::cerr, r.dimension);
            } else {
                std::ofstream o = open_out(embed_theta);
                print_theta_table(o, r.dimension);
            }
        } else if (eval->parsed()) {
            const sm::Mesh a = load(eval_a);
            load(eval_b);
            std::ifstream corr_in(eval_corr);
            const auto matches = sm::read_correspondence_tsv(corr_in, eval_corr);
            const sm::GroundTruth gt = sm::read_ground_truth(fs::path(eval_gt));
            sm::ErrorOptions opts;
            opts.diameter_sources = eval_sources;
            opts.seed = eval_seed;
            const sm::ErrorReport rep = sm::registration_error(matches, gt, a, opts);
            std::cout << sm::to_json(rep).dump(2) << '\n';
            if (!eval_csv.empty()) {
                std::ofstream o = open_out(eval_csv);
                sm::write_error_csv(o, rep);
            }
        } else if (synth->parsed()) {
            if (synth_shape.empty() && synth_mesh.empty()) throw sm::Error("synth needs --shape or --mesh");
            const sm::Mesh base = synth_mesh.empty() ? make_shape(synth_shape, synth_seed) : load(synth_mesh);
            const sm::SynthKind kind = sm::synth_kind_from_string(synth_class);
            sm::SynthSpec spec{kind, 0.0};
            if (synth_param) {
                spec.param = *synth_param;
            } else if (kind != sm::SynthKind::isometry_relabel) {
                spec = sm::synth_spec_for_level(kind, synth_level.value_or(1));
            }
            const sm::SynthResult s = sm::synth_transform(base, spec, synth_seed);
            sm::save_mesh(synth_out, s.mesh, sm::format_from_path(synth_out));
            std::ofstream g = open_out(synth_gt);
            sm::write_ground_truth(g, s.gt);
            if (!synth_base.empty()) sm::save_mesh(synth_base, base, sm::format_from_path(synth_base));
        } else if (isolab->parsed()) {
            const Eigen::MatrixXd a(sm::read_triplets(fs::path(iso_a)));
            const Eigen::MatrixXd b(sm::read_triplets(fs::path(iso_b)));
            nlohmann::json out;
            if (iso_method != "umeyama") {
                try {
                    const auto exact = sm::exact_spectral_isomorphism(a, b);
                    out["exact"] = exact ? sm::to_json(*exact) : nlohmann::json(nullptr);
                } catch (const sm::DegenerateSpectrumError& e) {
                    out["exact"] = {{"error", e.what()}};
                }
            }
            if (iso_method != "exact") {
                sm::UmeyamaOptions opts;
                opts.hill_climb = iso_hill;
                out["umeyama"] = sm::to_json(sm::umeyama_match(a, b, opts));
            }
            const auto hw = sm::hoffman_wielandt_gap(a, b);
            out["hoffman_wielandt"] = {{"lower_bound", hw.lower_bound}, {"frobenius_distance_sq", hw.frobenius_distance}};
            std::cout << out.dump(2) << '\n';
        } else if (selftest->parsed()) {
            return sm::run_selftest(std::cout) == 0 ? 0 : 1;
        }
    } catch (const sm::StageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
