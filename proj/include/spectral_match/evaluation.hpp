#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "spectral_match/em_registration.hpp"
#include "spectral_match/mesh.hpp"

namespace spectral_match {

/// Shortest paths over the mesh edge graph, weighted by Euclidean edge length.
class GeodesicGraph {
public:
    /// Throws DisconnectedGraphError when the edge graph is disconnected.
    explicit GeodesicGraph(const Mesh& mesh);

    int vertex_count() const { return static_cast<int>(offsets_.size()) - 1; }
    std::vector<double> distances_from(int source) const;

private:
    std::vector<int> offsets_;
    std::vector<int> targets_;
    std::vector<double> lengths_;
};

std::vector<double> geodesic_distances(const Mesh& mesh, int source);

/// Max eccentricity over `sources` seeded random source vertices.
double geodesic_diameter(const GeodesicGraph& graph, int sources = 20, std::uint64_t seed = 0);

/// pairs[t] = (vertex j of shape B, true vertex i of shape A).
struct GroundTruth {
    std::vector<std::pair<int, int>> pairs;
};

void write_ground_truth(std::ostream& out, const GroundTruth& gt);
GroundTruth read_ground_truth(std::istream& in, const std::string& source = "<gt>");
GroundTruth read_ground_truth(const std::filesystem::path& path);

struct VertexError {
    int j;
    int matched;
    int truth;
    double error;  // percent of the geodesic diameter
};

struct ErrorReport {
    std::vector<VertexError> per_vertex;
    double mean = 0.0;
    double median = 0.0;
    double max = 0.0;
    double diameter = 0.0;
    int matched = 0;     // MAP matches that have a ground-truth entry
    int unmatched = 0;   // ground-truth vertices without a MAP match
    int correct = 0;
    int ground_truth = 0;

    double exact_rate() const { return ground_truth ? static_cast<double>(correct) / ground_truth : 0.0; }
};

struct ErrorOptions {
    int diameter_sources = 20;
    std::uint64_t seed = 0;
};

/// Geodesic distance on mesh A between each matched vertex and its true
/// counterpart, as a percentage of mesh A's geodesic diameter.
ErrorReport registration_error(const std::vector<Match>& matches, const GroundTruth& gt, const Mesh& mesh_a,
                               const ErrorOptions& options = {});

void write_error_csv(std::ostream& out, const ErrorReport& report);

enum class SynthKind { isometry_relabel, noise, holes, sampling, local_scale };

struct SynthSpec {
    SynthKind kind = SynthKind::isometry_relabel;
    /// noise: displacement std as a fraction of the mean edge length; holes:
    /// fraction of faces removed; sampling: fraction of vertices kept;
    /// local_scale: regional scale factor.
    double param = 0.0;
};

SynthKind synth_kind_from_string(const std::string& name);
std::string to_string(SynthKind kind);

/// Strength level 1..5: noise 0.05 L, holes 0.01 L, sampling 1 - 0.1 L,
/// local_scale 1 + 0.1 L.
SynthSpec synth_spec_for_level(SynthKind kind, int level);

struct SynthResult {
    Mesh mesh;
    GroundTruth gt;  // new vertex -> original vertex
};

/// Throws when the transform would disconnect the mesh.
SynthResult synth_transform(const Mesh& mesh, const SynthSpec& spec, std::uint64_t seed);

}  // namespace spectral_match
