#include "spectral_match/laplacian.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "spectral_match/error.hpp"

namespace spectral_match {

std::string to_string(LaplacianKind kind) {
    switch (kind) {
        case LaplacianKind::combinatorial: return "combinatorial";
        case LaplacianKind::normalized: return "normalized";
        case LaplacianKind::random_walk: return "random_walk";
    }
    return "unknown";
}

namespace {

void require_positive_degrees(const Eigen::VectorXd& degrees) {
    for (Eigen::Index i = 0; i < degrees.size(); ++i) {
        if (!(degrees[i] > 0.0)) {
            throw Error("vertex " + std::to_string(i) + " has zero degree");
        }
    }
}

/// Returns diag(left) * m * diag(right) without densifying.
SparseMatrix scale_rows_cols(const SparseMatrix& m, const Eigen::VectorXd& left,
                             const Eigen::VectorXd& right) {
    SparseMatrix out = m;
    for (int col = 0; col < out.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(out, col); it; ++it) {
            it.valueRef() *= left[it.row()] * right[it.col()];
        }
    }
    return out;
}

/// Exponent a of D^a used on each side to go from `from` to `to`:
/// L_to = D^left L_from D^right.
std::pair<double, double> conversion_exponents(LaplacianKind from, LaplacianKind to) {
    using K = LaplacianKind;
    // Every kind is D^a L D^b of the combinatorial one.
    auto exponents = [](K kind) -> std::pair<double, double> {
        switch (kind) {
            case K::combinatorial: return {0.0, 0.0};
            case K::normalized: return {-0.5, -0.5};
            case K::random_walk: return {-1.0, 0.0};
        }
        return {0.0, 0.0};
    };
    const auto [fl, fr] = exponents(from);
    const auto [tl, tr] = exponents(to);
    return {tl - fl, tr - fr};
}

Eigen::VectorXd degree_power(const Eigen::VectorXd& degrees, double exponent) {
    if (exponent == 0.0) return Eigen::VectorXd::Ones(degrees.size());
    if (exponent == 1.0) return degrees;
    if (exponent == -1.0) return degrees.cwiseInverse();
    if (exponent == 0.5) return degrees.cwiseSqrt();
    if (exponent == -0.5) return degrees.cwiseSqrt().cwiseInverse();
    return degrees.array().pow(exponent).matrix();
}

}  // namespace

LaplacianMatrix assemble(const Graph& graph, LaplacianKind kind) {
    if (kind != LaplacianKind::combinatorial) require_positive_degrees(graph.degrees);
    const int n = graph.n;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(graph.adjacency.nonZeros() + n);
    for (int col = 0; col < graph.adjacency.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(graph.adjacency, col); it; ++it) {
            triplets.emplace_back(it.row(), it.col(), -it.value());
        }
    }
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, graph.degrees[i]);

    LaplacianMatrix lap;
    lap.kind = LaplacianKind::combinatorial;
    lap.degrees = graph.degrees;
    lap.matrix.resize(n, n);
    lap.matrix.setFromTriplets(triplets.begin(), triplets.end());
    lap.matrix.makeCompressed();
    if (kind == LaplacianKind::combinatorial) return lap;

    // Entrywise forms so that the diagonal of the normalized kind is exactly 1.
    LaplacianMatrix out = lap;
    out.kind = kind;
    const Eigen::VectorXd& d = graph.degrees;
    for (int col = 0; col < out.matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(out.matrix, col); it; ++it) {
            const auto i = it.row();
            const auto j = it.col();
            if (i == j) {
                it.valueRef() = 1.0;
            } else if (kind == LaplacianKind::normalized) {
                it.valueRef() /= std::sqrt(d[i] * d[j]);
            } else {
                it.valueRef() /= d[i];
            }
        }
    }
    return out;
}

LaplacianMatrix convert(const LaplacianMatrix& lap, LaplacianKind target) {
    if (lap.kind == target) return lap;
    require_positive_degrees(lap.degrees);
    const auto [left, right] = conversion_exponents(lap.kind, target);
    LaplacianMatrix out;
    out.kind = target;
    out.degrees = lap.degrees;
    out.matrix = scale_rows_cols(lap.matrix, degree_power(lap.degrees, left),
                                 degree_power(lap.degrees, right));
    return out;
}

Eigen::VectorXd null_vector(const LaplacianMatrix& lap) {
    const auto n = lap.size();
    switch (lap.kind) {
        case LaplacianKind::combinatorial:
        case LaplacianKind::random_walk:
            return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
        case LaplacianKind::normalized: {
            Eigen::VectorXd v = lap.degrees.cwiseSqrt();
            return v / v.norm();
        }
    }
    return {};
}

double norm1(const SparseMatrix& matrix) {
    double best = 0.0;
    for (int col = 0; col < matrix.outerSize(); ++col) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) sum += std::abs(it.value());
        best = std::max(best, sum);
    }
    return best;
}

void write_triplets(std::ostream& out, const SparseMatrix& matrix) {
    out << "# size " << matrix.rows() << '\n' << std::setprecision(17);
    // Row-major order keeps dumps diff-friendly.
    Eigen::SparseMatrix<double, Eigen::RowMajor> rows = matrix;
    for (int r = 0; r < rows.outerSize(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, r); it; ++it) {
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
        }
    }
}

void write_triplets(const std::filesystem::path& path, const SparseMatrix& matrix) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    write_triplets(out, matrix);
}

SparseMatrix read_triplets(std::istream& in, const std::string& source) {
    std::vector<Eigen::Triplet<double>> triplets;
    long long declared = -1;
    long long max_index = -1;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
        ++line_no;
        std::istringstream line(text);
        std::string first;
        if (!(line >> first)) continue;
        if (first[0] == '#' || first[0] == '%') {
            std::string key;
            long long value = 0;
            std::istringstream rest(text.substr(text.find(first[0]) + 1));
            if (rest >> key >> value && key == "size") declared = value;
            continue;
        }
        long long row = 0;
        long long col = 0;
        double value = 0.0;
        std::istringstream full(text);
        if (!(full >> row >> col >> value)) throw ParseError(source, line_no, "expected 'row col value'");
        std::string extra;
        if (full >> extra) throw ParseError(source, line_no, "trailing tokens");
        if (row < 0 || col < 0) throw ParseError(source, line_no, "negative index");
        if (!std::isfinite(value)) throw ParseError(source, line_no, "non-finite value");
        max_index = std::max({max_index, row, col});
        triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), value);
    }
    const long long n = declared >= 0 ? declared : max_index + 1;
    if (max_index >= n) throw ParseError(source, 0, "index exceeds declared size");
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

SparseMatrix read_triplets(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_triplets(in, path.string());
}

}  // namespace spectral_match
