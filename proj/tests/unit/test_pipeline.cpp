#include <sstream>

#include "doctest.h"

#include "spectral_match/error.hpp"
#include "spectral_match/evaluation.hpp"
#include "spectral_match/pipeline.hpp"
#include "spectral_match/report.hpp"
#include "spectral_match/selftest.hpp"
#include "spectral_match/shapes.hpp"

using namespace spectral_match;

namespace {

Mesh small_blob() {
    SphereParams p;
    p.rings = 18;
    p.segments = 24;
    p.bumps = 5;
    return make_sphere(p);
}

Mesh tetra() {
    Mesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    m.faces = {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
    return m;
}

}  // namespace

TEST_SUITE("pipeline") {
    TEST_CASE("mesh against itself gives the identity") {
        const Mesh m = small_blob();
        const MatchResult r = run_match(m, m, PipelineConfig{});
        REQUIRE(r.correspondence.map_matches.size() == static_cast<std::size_t>(m.vertex_count()));
        for (const Match& x : r.correspondence.map_matches) CHECK(x.i == x.j);
        CHECK(r.alignment.kept.size() == static_cast<std::size_t>(r.k));
    }

    TEST_CASE("isometric relabelling is matched under SM1 and SM2") {
        const Mesh m = small_blob();
        const SynthResult s = synth_transform(m, {SynthKind::isometry_relabel, 0.0}, 3);
        for (EmbeddingSetting e : {EmbeddingSetting::sm1, EmbeddingSetting::sm2}) {
            PipelineConfig c;
            c.embedding = e;
            const MatchResult r = run_match(m, s.mesh, c);
            const ErrorReport rep = registration_error(r.correspondence.map_matches, s.gt, m);
            CHECK(rep.exact_rate() >= 0.99);
            CHECK(rep.mean == 0.0);
        }
    }

    TEST_CASE("dissimilar tiny mesh fails in the alignment stage") {
        PipelineConfig c;
        c.k = 3;
        try {
            run_match(small_blob(), tetra(), c);
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "alignment");
        }
    }

    TEST_CASE("stage labels on bad input") {
        PipelineConfig bad;
        bad.theta = 1.5;
        try {
            run_match(tetra(), tetra(), bad);
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "config");
        }
        Mesh split;
        split.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {5, 0, 0}, {6, 0, 0}, {5, 1, 0}};
        split.faces = {{0, 1, 2}, {3, 4, 5}};
        try {
            run_match(split, split, PipelineConfig{});
            FAIL("expected a stage error");
        } catch (const StageError& e) {
            CHECK(e.stage() == "graph");
        }
    }

    TEST_CASE("runs are byte-identical for identical inputs and seed") {
        const Mesh m = small_blob();
        const SynthResult s = synth_transform(m, {SynthKind::noise, 0.05}, 4);
        const PipelineConfig c;
        std::ostringstream a, b, ja, jb;
        const MatchResult r1 = run_match(m, s.mesh, c), r2 = run_match(m, s.mesh, c);
        write_correspondence_tsv(a, r1.correspondence);
        write_correspondence_tsv(b, r2.correspondence);
        CHECK(a.str() == b.str());
        CHECK(to_json(r1, c).dump() == to_json(r2, c).dump());
    }

    TEST_CASE("report records intermediate statistics") {
        const Mesh m = small_blob();
        const PipelineConfig c;
        const MatchResult r = run_match(m, m, c);
        const auto j = to_json(r, c);
        CHECK(j["k"] == r.k);
        CHECK(j.contains("alignment"));
        CHECK(j["em"]["iterations"] == r.correspondence.iterations);
        CHECK(j["shape_a"]["vertices"] == m.vertex_count());
    }

    TEST_CASE("graph embedding of P3 reproduces the commute-time coordinates") {
        PipelineConfig c;
        c.embedding = EmbeddingSetting::sm1;
        c.k = 2;
        const EmbedResult r = run_embed(graph_from_edges(3, {{0, 1, 1.0}, {1, 2, 1.0}}), c);
        CHECK(r.embedding.coords.rows() == 2);
        CHECK(std::abs(r.embedding.coords(0, 0)) == doctest::Approx(1 / std::sqrt(2.0)));
        CHECK(std::abs(r.embedding.coords(1, 1)) == doctest::Approx(2 / std::sqrt(18.0)));
        CHECK(r.dimension.theta_min[0] == 0.5);
    }

    TEST_CASE("built-in selftest passes") {
        std::ostringstream out;
        CHECK(run_selftest(out) == 0);
    }
}
