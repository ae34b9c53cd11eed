#include "spectral_match/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Geometry>

#include "spectral_match/error.hpp"

namespace spectral_match {

GeodesicGraph::GeodesicGraph(const Mesh& mesh) {
    const int n = mesh.vertex_count();
    if (n == 0) throw Error("geodesics need a non-empty mesh");
    const auto edges = mesh_edges(mesh);
    std::vector<int> degree(n, 0);
    for (const auto& e : edges) {
        ++degree[e[0]];
        ++degree[e[1]];
    }
    offsets_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) offsets_[v + 1] = offsets_[v] + degree[v];
    targets_.resize(offsets_[n]);
    lengths_.resize(offsets_[n]);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges) {
        const double len = (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm();
        targets_[fill[e[0]]] = e[1];
        lengths_[fill[e[0]]++] = len;
        targets_[fill[e[1]]] = e[0];
        lengths_[fill[e[1]]++] = len;
    }
    // Component count via union-find.
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (const auto& e : edges) parent[find(e[0])] = find(e[1]);
    std::size_t components = 0;
    for (int v = 0; v < n; ++v) components += find(v) == v;
    if (components > 1) throw DisconnectedGraphError(components);
}

std::vector<double> GeodesicGraph::distances_from(int source) const {
    const int n = vertex_count();
    if (source < 0 || source >= n) throw Error("geodesic source out of range");
    std::vector<double> dist(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (int e = offsets_[v]; e < offsets_[v + 1]; ++e) {
            const double cand = d + lengths_[e];
            if (cand < dist[targets_[e]]) {
                dist[targets_[e]] = cand;
                heap.emplace(cand, targets_[e]);
            }
        }
    }
    return dist;
}

std::vector<double> geodesic_distances(const Mesh& mesh, int source) {
    return GeodesicGraph(mesh).distances_from(source);
}

double geodesic_diameter(const GeodesicGraph& graph, int sources, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, graph.vertex_count() - 1);
    double diameter = 0.0;
    for (int s = 0; s < std::max(1, sources); ++s) {
        const auto dist = graph.distances_from(pick(rng));
        diameter = std::max(diameter, *std::max_element(dist.begin(), dist.end()));
    }
    return diameter;
}

void write_ground_truth(std::ostream& out, const GroundTruth& gt) {
    for (const auto& [j, i] : gt.pairs) out << j << '\t' << i << '\n';
}

GroundTruth read_ground_truth(std::istream& in, const std::string& source) {
    GroundTruth gt;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        int j = 0, i = 0;
        if (!(fields >> j >> i)) throw ParseError(source, line_no, "expected `j<TAB>i`");
        if (j < 0 || i < 0) throw ParseError(source, line_no, "negative vertex index");
        gt.pairs.emplace_back(j, i);
    }
    return gt;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_ground_truth(in, path.string());
}

ErrorReport registration_error(const std::vector<Match>& matches, const GroundTruth& gt, const Mesh& mesh_a,
                               const ErrorOptions& options) {
    const GeodesicGraph graph(mesh_a);
    const int n = graph.vertex_count();
    std::map<int, int> truth;
    for (const auto& [j, i] : gt.pairs) {
        if (i < 0 || i >= n) throw Error("ground truth refers to vertex " + std::to_string(i) + " outside mesh A");
        truth[j] = i;
    }

    ErrorReport report;
    report.ground_truth = static_cast<int>(truth.size());
    std::map<int, std::vector<std::size_t>> wrong_by_truth;
    for (const Match& m : matches) {
        if (m.i < 0) continue;
        const auto it = truth.find(m.j);
        if (it == truth.end()) continue;
        if (m.i >= n) throw Error("match refers to vertex " + std::to_string(m.i) + " outside mesh A");
        report.per_vertex.push_back({m.j, m.i, it->second, 0.0});
        if (m.i == it->second) {
            ++report.correct;
        } else {
            wrong_by_truth[it->second].push_back(report.per_vertex.size() - 1);
        }
    }
    if (report.per_vertex.empty()) throw Error("no MAP matches to evaluate against the ground truth");
    report.matched = static_cast<int>(report.per_vertex.size());
    report.unmatched = report.ground_truth - report.matched;
    report.diameter = geodesic_diameter(graph, options.diameter_sources, options.seed);

    for (const auto& [source, slots] : wrong_by_truth) {
        const auto dist = graph.distances_from(source);
        for (std::size_t slot : slots) {
            VertexError& ve = report.per_vertex[slot];
            ve.error = 100.0 * dist[ve.matched] / report.diameter;
        }
    }
    std::vector<double> values;
    values.reserve(report.per_vertex.size());
    for (const auto& ve : report.per_vertex) values.push_back(ve.error);
    report.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    report.max = *std::max_element(values.begin(), values.end());
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    report.median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    return report;
}

void write_error_csv(std::ostream& out, const ErrorReport& report) {
    out << "j,matched,truth,error_percent\n";
    char buf[64];
    for (const auto& ve : report.per_vertex) {
        std::snprintf(buf, sizeof buf, "%.17g", ve.error);
        out << ve.j << ',' << ve.matched << ',' << ve.truth << ',' << buf << '\n';
    }
}

SynthKind synth_kind_from_string(const std::string& name) {
    if (name == "isometry" || name == "isometry_relabel") return SynthKind::isometry_relabel;
    if (name == "noise") return SynthKind::noise;
    if (name == "holes") return SynthKind::holes;
    if (name == "sampling") return SynthKind::sampling;
    if (name == "local_scale") return SynthKind::local_scale;
    throw Error("unknown transform class '" + name + "'");
}

std::string to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::isometry_relabel: return "isometry_relabel";
        case SynthKind::noise: return "noise";
        case SynthKind::holes: return "holes";
        case SynthKind::sampling: return "sampling";
        case SynthKind::local_scale: return "local_scale";
    }
    return "?";
}

SynthSpec synth_spec_for_level(SynthKind kind, int level) {
    if (level < 1 || level > 5) throw Error("strength level must be in 1..5");
    switch (kind) {
        case SynthKind::isometry_relabel: return {kind, 0.0};
        case SynthKind::noise: return {kind, 0.05 * level};
        case SynthKind::holes: return {kind, 0.01 * level};
        case SynthKind::sampling: return {kind, 1.0 - 0.1 * level};
        case SynthKind::local_scale: return {kind, 1.0 + 0.1 * level};
    }
    return {kind, 0.0};
}

namespace {

using Rng = std::mt19937_64;

/// Drops vertices without faces; gt maps new index to old.
SynthResult compact(const std::vector<Eigen::Vector3d>& positions, const std::vector<std::array<int, 3>>& faces) {
    std::vector<int> remap(positions.size(), -1);
    for (const auto& f : faces)
        for (int v : f) remap[v] = 0;
    SynthResult out;
    for (std::size_t v = 0; v < positions.size(); ++v) {
        if (remap[v] < 0) continue;
        remap[v] = static_cast<int>(out.mesh.vertices.size());
        out.mesh.vertices.push_back(positions[v]);
        out.gt.pairs.emplace_back(remap[v], static_cast<int>(v));
    }
    for (const auto& f : faces) out.mesh.faces.push_back({remap[f[0]], remap[f[1]], remap[f[2]]});
    return out;
}

void require_connected(const Mesh& mesh, const std::string& what) {
    try {
        GeodesicGraph check(mesh);
    } catch (const DisconnectedGraphError& e) {
        throw Error(what + " would disconnect the mesh (" + std::to_string(e.components()) + " components)");
    }
}

SynthResult relabel(const Mesh& mesh, Rng& rng) {
    const int n = mesh.vertex_count();
    std::vector<int> perm(n);  // new j holds old perm[j]
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<int> inverse(n);
    for (int j = 0; j < n; ++j) inverse[perm[j]] = j;
    SynthResult out;
    out.mesh.vertices.resize(n);
    for (int j = 0; j < n; ++j) {
        out.mesh.vertices[j] = mesh.vertices[perm[j]];
        out.gt.pairs.emplace_back(j, perm[j]);
    }
    for (const auto& f : mesh.faces) out.mesh.faces.push_back({inverse[f[0]], inverse[f[1]], inverse[f[2]]});
    return out;
}

SynthResult identity_result(Mesh mesh) {
    SynthResult out;
    for (int v = 0; v < mesh.vertex_count(); ++v) out.gt.pairs.emplace_back(v, v);
    out.mesh = std::move(mesh);
    return out;
}

SynthResult add_noise(const Mesh& mesh, double eps, Rng& rng) {
    if (eps < 0.0) throw Error("noise strength must be non-negative");
    Mesh out = mesh;
    if (eps > 0.0) {
        std::normal_distribution<double> gauss(0.0, eps * mean_edge_length(mesh));
        for (auto& p : out.vertices) p += Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
    }
    return identity_result(std::move(out));
}

SynthResult local_scale(const Mesh& mesh, double s, Rng& rng) {
    if (!(s > 0.0)) throw Error("local scale factor must be positive");
    Eigen::Vector3d lo = mesh.vertices.front(), hi = lo;
    for (const auto& p : mesh.vertices) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double radius = 0.25 * (hi - lo).norm();
    const Eigen::Vector3d centre = mesh.vertices[std::uniform_int_distribution<int>(0, mesh.vertex_count() - 1)(rng)];
    Mesh out = mesh;
    for (auto& p : out.vertices) {
        const double d = (p - centre).norm();
        if (d >= radius) continue;
        const double t = 1.0 - (d / radius) * (d / radius);
        p = centre + (1.0 + (s - 1.0) * t * t) * (p - centre);
    }
    return identity_result(std::move(out));
}

SynthResult punch_holes(const Mesh& mesh, double fraction, Rng& rng) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw Error("hole fraction must lie in [0, 1)");
    const int face_count = mesh.face_count();
    const int target = static_cast<int>(std::lround(fraction * face_count));
    std::map<std::pair<int, int>, std::vector<int>> edge_faces;
    for (int f = 0; f < face_count; ++f) {
        for (int e = 0; e < 3; ++e) {
            const int a = mesh.faces[f][e], b = mesh.faces[f][(e + 1) % 3];
            edge_faces[{std::min(a, b), std::max(a, b)}].push_back(f);
        }
    }
    std::vector<std::vector<int>> adjacent(face_count);
    for (const auto& [edge, fs] : edge_faces)
        for (int f : fs)
            for (int g : fs)
                if (f != g) adjacent[f].push_back(g);

    const int patch = 12;
    std::vector<char> removed(face_count, 0);
    int count = 0;
    std::uniform_int_distribution<int> pick(0, face_count - 1);
    for (int attempt = 0; count < target && attempt < 100 * face_count; ++attempt) {
        const int seed_face = pick(rng);
        if (removed[seed_face]) continue;
        std::queue<int> frontier;
        frontier.push(seed_face);
        removed[seed_face] = 1;
        int grown = 1;
        ++count;
        while (!frontier.empty() && grown < patch && count < target) {
            const int f = frontier.front();
            frontier.pop();
            for (int g : adjacent[f]) {
                if (removed[g] || grown >= patch || count >= target) continue;
                removed[g] = 1;
                ++grown;
                ++count;
                frontier.push(g);
            }
        }
    }
    std::vector<std::array<int, 3>> kept;
    for (int f = 0; f < face_count; ++f)
        if (!removed[f]) kept.push_back(mesh.faces[f]);
    SynthResult out = compact(mesh.vertices, kept);
    require_connected(out.mesh, "holes transform");
    return out;
}

/// Random half-edge collapses v -> u of interior vertices; u keeps its position.
class Decimator {
public:
    explicit Decimator(const Mesh& mesh) : pos_(mesh.vertices), faces_(mesh.faces), face_alive_(mesh.faces.size(), 1) {
        incident_.resize(pos_.size());
        for (int f = 0; f < static_cast<int>(faces_.size()); ++f)
            for (int v : faces_[f]) incident_[v].push_back(f);
        alive_.assign(pos_.size(), 1);
        alive_count_ = static_cast<int>(pos_.size());
    }

    void run(int target, Rng& rng) {
        while (alive_count_ > target) {
            std::vector<int> order;
            for (int v = 0; v < static_cast<int>(pos_.size()); ++v)
                if (alive_[v]) order.push_back(v);
            std::shuffle(order.begin(), order.end(), rng);
            bool progress = false;
            for (int v : order) {
                if (alive_count_ <= target) break;
                if (!alive_[v]) continue;
                const std::set<int> around = neighbours(v);
                std::vector<int> candidates(around.begin(), around.end());
                std::shuffle(candidates.begin(), candidates.end(), rng);
                for (int u : candidates) {
                    if (try_collapse(v, u)) {
                        progress = true;
                        break;
                    }
                }
            }
            if (!progress) throw Error("sampling transform cannot reach the requested vertex count");
        }
    }

    SynthResult result() const {
        std::vector<std::array<int, 3>> kept;
        for (std::size_t f = 0; f < faces_.size(); ++f)
            if (face_alive_[f]) kept.push_back(faces_[f]);
        return compact(pos_, kept);
    }

private:
    std::set<int> neighbours(int v) const {
        std::set<int> out;
        for (int f : incident_[v])
            for (int w : faces_[f])
                if (w != v) out.insert(w);
        return out;
    }

    bool is_boundary(int v) const {
        std::map<int, int> count;
        for (int f : incident_[v])
            for (int w : faces_[f])
                if (w != v) ++count[w];
        return std::any_of(count.begin(), count.end(), [](const auto& kv) { return kv.second != 2; });
    }

    bool try_collapse(int v, int u) {
        if (is_boundary(v)) return false;
        std::vector<int> shared;
        for (int f : incident_[v])
            if (std::find(faces_[f].begin(), faces_[f].end(), u) != faces_[f].end()) shared.push_back(f);
        if (shared.size() != 2) return false;
        std::set<int> opposite;
        for (int f : shared)
            for (int w : faces_[f])
                if (w != u && w != v) opposite.insert(w);
        const auto nv = neighbours(v), nu = neighbours(u);
        std::vector<int> common;
        std::set_intersection(nv.begin(), nv.end(), nu.begin(), nu.end(), std::back_inserter(common));
        if (common.size() != 2 || std::set<int>(common.begin(), common.end()) != opposite) return false;
        for (int o : opposite)
            if (neighbours(o).size() <= 3) return false;
        if (nv.size() <= 3 && nu.size() <= 3) return false;
        for (int f : incident_[v]) {
            if (std::find(shared.begin(), shared.end(), f) != shared.end()) continue;
            auto tri = faces_[f];
            const Eigen::Vector3d before = normal(tri);
            for (int& w : tri)
                if (w == v) w = u;
            const Eigen::Vector3d after = normal(tri);
            if (!(before.dot(after) > 0.0) || after.norm() <= 1e-12 * before.norm()) return false;
        }
        for (int f : shared) {
            face_alive_[f] = 0;
            for (int w : faces_[f]) {
                if (w == v) continue;
                auto& list = incident_[w];
                list.erase(std::remove(list.begin(), list.end(), f), list.end());
            }
        }
        for (int f : incident_[v]) {
            if (!face_alive_[f]) continue;
            for (int& w : faces_[f])
                if (w == v) w = u;
            incident_[u].push_back(f);
        }
        incident_[v].clear();
        alive_[v] = 0;
        --alive_count_;
        return true;
    }

    Eigen::Vector3d normal(const std::array<int, 3>& f) const {
        return (pos_[f[1]] - pos_[f[0]]).cross(pos_[f[2]] - pos_[f[0]]);
    }

    std::vector<Eigen::Vector3d> pos_;
    std::vector<std::array<int, 3>> faces_;
    std::vector<char> face_alive_;
    std::vector<std::vector<int>> incident_;
    std::vector<char> alive_;
    int alive_count_ = 0;
};

SynthResult resample(const Mesh& mesh, double ratio, Rng& rng) {
    if (!(ratio > 0.0 && ratio <= 1.0)) throw Error("sampling ratio must lie in (0, 1]");
    const int target = std::max(4, static_cast<int>(std::lround(ratio * mesh.vertex_count())));
    Decimator decimator(mesh);
    decimator.run(target, rng);
    SynthResult out = decimator.result();
    require_connected(out.mesh, "sampling transform");
    return out;
}

}  // namespace

SynthResult synth_transform(const Mesh& mesh, const SynthSpec& spec, std::uint64_t seed) {
    validate(mesh);
    if (mesh.vertex_count() == 0) throw Error("cannot transform an empty mesh");
    Rng rng(seed);
    switch (spec.kind) {
        case SynthKind::isometry_relabel: return relabel(mesh, rng);
        case SynthKind::noise: return add_noise(mesh, spec.param, rng);
        case SynthKind::holes: return punch_holes(mesh, spec.param, rng);
        case SynthKind::sampling: return resample(mesh, spec.param, rng);
        case SynthKind::local_scale: return local_scale(mesh, spec.param, rng);
    }
    throw Error("unknown transform class");
}

}  // namespace spectral_match
