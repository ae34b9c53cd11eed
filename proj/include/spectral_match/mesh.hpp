#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spectral_match {

enum class MeshFormat { off, ply_ascii };

/// Triangle mesh: positions plus vertex-index triples.
struct Mesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

/// Throws DegenerateFaceError or Error when the mesh invariants do not hold
/// (n >= 3, indices in range, no repeated index inside a face).
void validate(const Mesh& mesh);

/// Picks the format from the extension (.off / .ply).
MeshFormat format_from_path(const std::filesystem::path& path);

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format);
Mesh load_mesh(const std::filesystem::path& path);

/// Stream readers; `source` only labels error messages.
Mesh read_off(std::istream& in, const std::string& source = "<off>");
Mesh read_ply_ascii(std::istream& in, const std::string& source = "<ply>");

void write_off(std::ostream& out, const Mesh& mesh);
void write_ply_ascii(std::ostream& out, const Mesh& mesh);
void save_mesh(const std::filesystem::path& path, const Mesh& mesh, MeshFormat format);

/// Unique undirected edges (i < j), sorted lexicographically.
std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh);

double mean_edge_length(const Mesh& mesh);

}  // namespace spectral_match
