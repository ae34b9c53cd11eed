#include "spectral_match/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split_tokens(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) break;
        std::size_t end = pos;
        while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
        tokens.push_back(text.substr(pos, end - pos));
        pos = end;
    }
    return tokens;
}

/// Reads every line, keeps the storage alive and tokenizes. `comment` strips
/// from that character to end of line when non-zero.
class LineReader {
public:
    LineReader(std::istream& in, char comment) {
        std::string text;
        std::size_t number = 0;
        while (std::getline(in, text)) {
            ++number;
            if (comment != '\0') {
                if (auto hash = text.find(comment); hash != std::string::npos) text.resize(hash);
            }
            storage_.push_back(std::move(text));
            numbers_.push_back(number);
        }
        last_line_ = number;
        lines_.reserve(storage_.size());
        for (std::size_t i = 0; i < storage_.size(); ++i) {
            auto tokens = split_tokens(storage_[i]);
            if (!tokens.empty()) lines_.push_back({numbers_[i], std::move(tokens)});
        }
    }

    bool done() const { return cursor_ >= lines_.size(); }
    const Line& next() { return lines_[cursor_++]; }
    std::size_t eof_line() const { return last_line_ + 1; }

private:
    std::vector<std::string> storage_;
    std::vector<std::size_t> numbers_;
    std::vector<Line> lines_;
    std::size_t cursor_ = 0;
    std::size_t last_line_ = 0;
};

template <typename T>
bool parse_number(std::string_view token, T& value) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (!token.empty() && token.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    return ec == std::errc() && ptr == last;
}

double require_double(const std::string& source, const Line& line, std::size_t index) {
    double value = 0.0;
    if (index >= line.tokens.size() || !parse_number(line.tokens[index], value)) {
        throw ParseError(source, line.number, "expected a number");
    }
    return value;
}

long long require_integer(const std::string& source, const Line& line, std::size_t index) {
    long long value = 0;
    if (index < line.tokens.size() && parse_number(line.tokens[index], value)) return value;
    // ASCII PLY writers sometimes emit integers as "3.0".
    double real = 0.0;
    if (index < line.tokens.size() && parse_number(line.tokens[index], real) &&
        real == static_cast<double>(static_cast<long long>(real))) {
        return static_cast<long long>(real);
    }
    throw ParseError(source, line.number, "expected an integer");
}

std::array<int, 3> triangle_from(const std::string& source, const Line& line, long long count,
                                 std::size_t first_index, long long vertex_count) {
    if (count != 3) {
        throw ParseError(source, line.number,
                         "only triangular faces are supported (face has " +
                             std::to_string(count) + " vertices)");
    }
    std::array<int, 3> face{};
    for (int c = 0; c < 3; ++c) {
        const long long index = require_integer(source, line, first_index + c);
        if (index < 0 || index >= vertex_count) {
            throw ParseError(source, line.number,
                             "face index " + std::to_string(index) + " out of range");
        }
        face[c] = static_cast<int>(index);
    }
    return face;
}

}  // namespace

void validate(const Mesh& mesh) {
    const int n = mesh.vertex_count();
    if (n < 3) throw Error("mesh needs at least 3 vertices, got " + std::to_string(n));
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        for (int index : face) {
            if (index < 0 || index >= n) {
                throw DegenerateFaceError(f, "face " + std::to_string(f) + " references vertex " +
                                                 std::to_string(index) + " outside [0, " +
                                                 std::to_string(n) + ")");
            }
        }
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) {
            throw DegenerateFaceError(f, "degenerate face " + std::to_string(f) + " (" +
                                             std::to_string(face[0]) + " " +
                                             std::to_string(face[1]) + " " +
                                             std::to_string(face[2]) + ")");
        }
    }
}

Mesh read_off(std::istream& in, const std::string& source) {
    LineReader reader(in, '#');
    if (reader.done()) throw ParseError(source, reader.eof_line(), "empty file");

    const Line* header = &reader.next();
    std::size_t count_offset = 0;
    const std::string_view keyword = header->tokens.front();
    if (keyword != "OFF") {
        throw ParseError(source, header->number, "missing OFF header");
    }
    if (header->tokens.size() > 1) {
        count_offset = 1;  // "OFF nv nf ne" on a single line
    } else {
        if (reader.done()) throw ParseError(source, reader.eof_line(), "missing element counts");
        header = &reader.next();
    }
    if (header->tokens.size() < count_offset + 2) {
        throw ParseError(source, header->number, "expected vertex and face counts");
    }
    const long long nv = require_integer(source, *header, count_offset);
    const long long nf = require_integer(source, *header, count_offset + 1);
    if (nv < 0 || nf < 0) throw ParseError(source, header->number, "negative element count");

    Mesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long long v = 0; v < nv; ++v) {
        if (reader.done()) {
            throw ParseError(source, reader.eof_line(),
                             "unexpected end of file: header declares " + std::to_string(nv) +
                                 " vertices, found " + std::to_string(v));
        }
        const Line& line = reader.next();
        if (line.tokens.size() < 3) throw ParseError(source, line.number, "vertex needs 3 coordinates");
        mesh.vertices.emplace_back(require_double(source, line, 0), require_double(source, line, 1),
                                   require_double(source, line, 2));
    }
    mesh.faces.reserve(static_cast<std::size_t>(nf));
    for (long long f = 0; f < nf; ++f) {
        if (reader.done()) {
            throw ParseError(source, reader.eof_line(),
                             "unexpected end of file: header declares " + std::to_string(nf) +
                                 " faces, found " + std::to_string(f));
        }
        const Line& line = reader.next();
        const long long count = require_integer(source, line, 0);
        if (static_cast<long long>(line.tokens.size()) < count + 1) {
            throw ParseError(source, line.number, "face lists fewer indices than its count");
        }
        mesh.faces.push_back(triangle_from(source, line, count, 1, nv));
    }
    validate(mesh);
    return mesh;
}

namespace {

struct PlyProperty {
    std::string name;
    bool is_list = false;
};

struct PlyElement {
    std::string name;
    long long count = 0;
    std::vector<PlyProperty> properties;
};

}  // namespace

Mesh read_ply_ascii(std::istream& in, const std::string& source) {
    LineReader reader(in, '\0');
    if (reader.done() || reader.next().tokens.front() != "ply") {
        throw ParseError(source, 1, "missing 'ply' magic");
    }

    std::vector<PlyElement> elements;
    bool have_format = false;
    bool header_closed = false;
    while (!reader.done()) {
        const Line& line = reader.next();
        const std::string_view keyword = line.tokens.front();
        if (keyword == "end_header") {
            header_closed = true;
            break;
        }
        if (keyword == "comment" || keyword == "obj_info") continue;
        if (keyword == "format") {
            if (line.tokens.size() < 2 || line.tokens[1] != "ascii") {
                throw ParseError(source, line.number, "only ASCII PLY is supported");
            }
            have_format = true;
        } else if (keyword == "element") {
            if (line.tokens.size() != 3) throw ParseError(source, line.number, "malformed element line");
            PlyElement element;
            element.name = std::string(line.tokens[1]);
            element.count = require_integer(source, line, 2);
            if (element.count < 0) throw ParseError(source, line.number, "negative element count");
            elements.push_back(std::move(element));
        } else if (keyword == "property") {
            if (elements.empty()) throw ParseError(source, line.number, "property before any element");
            PlyProperty property;
            if (line.tokens.size() >= 2 && line.tokens[1] == "list") {
                if (line.tokens.size() != 5) throw ParseError(source, line.number, "malformed list property");
                property.is_list = true;
                property.name = std::string(line.tokens[4]);
            } else {
                if (line.tokens.size() != 3) throw ParseError(source, line.number, "malformed property");
                property.name = std::string(line.tokens[2]);
            }
            elements.back().properties.push_back(std::move(property));
        } else {
            throw ParseError(source, line.number, "unknown header keyword '" + std::string(keyword) + "'");
        }
    }
    if (!header_closed) throw ParseError(source, reader.eof_line(), "missing end_header");
    if (!have_format) throw ParseError(source, reader.eof_line(), "missing format line");

    const auto vertex_it = std::find_if(elements.begin(), elements.end(),
                                        [](const PlyElement& e) { return e.name == "vertex"; });
    if (vertex_it == elements.end()) throw ParseError(source, 0, "no vertex element");
    const long long nv = vertex_it->count;

    Mesh mesh;
    for (const PlyElement& element : elements) {
        const bool is_vertex = element.name == "vertex";
        const bool is_face = element.name == "face";
        std::array<int, 3> xyz{-1, -1, -1};
        int index_property = -1;
        for (std::size_t p = 0; p < element.properties.size(); ++p) {
            const auto& prop = element.properties[p];
            if (is_vertex && !prop.is_list) {
                if (prop.name == "x") xyz[0] = static_cast<int>(p);
                if (prop.name == "y") xyz[1] = static_cast<int>(p);
                if (prop.name == "z") xyz[2] = static_cast<int>(p);
            }
            if (is_face && prop.is_list && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
                index_property = static_cast<int>(p);
            }
        }
        if (is_vertex && (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0)) {
            throw ParseError(source, 0, "vertex element lacks x/y/z properties");
        }
        if (is_face && index_property < 0) {
            throw ParseError(source, 0, "face element lacks a vertex_indices list");
        }

        for (long long row = 0; row < element.count; ++row) {
            if (reader.done()) {
                throw ParseError(source, reader.eof_line(),
                                 "unexpected end of file: header declares " +
                                     std::to_string(element.count) + " " + element.name +
                                     " entries, found " + std::to_string(row));
            }
            const Line& line = reader.next();
            // Walk the properties to locate the token offset of each one.
            std::size_t cursor = 0;
            std::array<double, 3> position{};
            for (std::size_t p = 0; p < element.properties.size(); ++p) {
                const auto& prop = element.properties[p];
                if (prop.is_list) {
                    const long long count = require_integer(source, line, cursor);
                    if (count < 0 || cursor + 1 + static_cast<std::size_t>(count) > line.tokens.size()) {
                        throw ParseError(source, line.number, "list property overruns the line");
                    }
                    if (is_face && static_cast<int>(p) == index_property) {
                        mesh.faces.push_back(triangle_from(source, line, count, cursor + 1, nv));
                    }
                    cursor += 1 + static_cast<std::size_t>(count);
                } else {
                    if (cursor >= line.tokens.size()) throw ParseError(source, line.number, "too few values");
                    if (is_vertex) {
                        for (int c = 0; c < 3; ++c) {
                            if (static_cast<int>(p) == xyz[c]) position[c] = require_double(source, line, cursor);
                        }
                    }
                    ++cursor;
                }
            }
            if (is_vertex) mesh.vertices.emplace_back(position[0], position[1], position[2]);
        }
    }
    validate(mesh);
    return mesh;
}

MeshFormat format_from_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".off") return MeshFormat::off;
    if (ext == ".ply") return MeshFormat::ply_ascii;
    throw Error("cannot infer mesh format from extension of " + path.string());
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return format == MeshFormat::off ? read_off(in, path.string()) : read_ply_ascii(in, path.string());
}

Mesh load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_path(path)); }

void write_off(std::ostream& out, const Mesh& mesh) {
    out << "OFF\n" << mesh.vertices.size() << ' ' << mesh.faces.size() << " 0\n";
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_ply_ascii(std::ostream& out, const Mesh& mesh) {
    out << "ply\nformat ascii 1.0\n"
        << "element vertex " << mesh.vertices.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "element face " << mesh.faces.size() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
    out << std::setprecision(17);
    for (const auto& v : mesh.vertices) out << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void save_mesh(const std::filesystem::path& path, const Mesh& mesh, MeshFormat format) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    if (format == MeshFormat::off) {
        write_off(out, mesh);
    } else {
        write_ply_ascii(out, mesh);
    }
}

std::vector<std::array<int, 2>> mesh_edges(const Mesh& mesh) {
    std::vector<std::array<int, 2>> edges;
    edges.reserve(mesh.faces.size() * 3);
    for (const auto& f : mesh.faces) {
        for (int c = 0; c < 3; ++c) {
            const int a = f[c];
            const int b = f[(c + 1) % 3];
            edges.push_back({std::min(a, b), std::max(a, b)});
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

double mean_edge_length(const Mesh& mesh) {
    const auto edges = mesh_edges(mesh);
    if (edges.empty()) return 0.0;
    double total = 0.0;
    for (const auto& e : edges) total += (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm();
    return total / static_cast<double>(edges.size());
}

}  // namespace spectral_match
