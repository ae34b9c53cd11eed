#include "spectral_match/em_registration.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/SVD>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

void require_dims(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& r) {
    if (x.rows() != y.rows()) throw Error("EM: point sets have different dimensions");
    if (r.rows() != x.rows() || r.cols() != x.rows()) throw Error("EM: transformation has the wrong size");
    if (x.cols() < 1 || y.cols() < 1) throw Error("EM: empty point set");
}

/// n x m squared distances |y_j - R x_i|^2, clamped at 0.
Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& r) {
    const Eigen::MatrixXd rx = r * x;
    Eigen::MatrixXd d = -2.0 * (rx.transpose() * y);
    d.colwise() += rx.colwise().squaredNorm().transpose();
    d.rowwise() += y.colwise().squaredNorm();
    return d.cwiseMax(0.0);
}

struct EStep {
    Eigen::MatrixXd resp;  // (n+1) x m, transposed posterior
    double observed = 0.0;
};

EStep e_step_t(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GmmParams& p) {
    const Eigen::Index n = x.cols(), m = y.cols();
    const double k = static_cast<double>(x.rows());
    const Eigen::MatrixXd d = squared_distances(x, y, p.rotation);
    const double out_logit = p.log_uniform_const + 0.5 * k * std::log(p.sigma);
    const double scale = -0.5 / p.sigma;
    EStep out;
    out.resp.resize(n + 1, m);
    double observed = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        // Shift by the best inlier logit; terms below e^-60 relative to it are
        // dropped, which avoids subnormal arithmetic without touching the result.
        const double shift = scale * d.col(j).minCoeff();
        const Eigen::ArrayXd logits = d.col(j).array() * scale - shift;
        auto col = out.resp.col(j);
        col.head(n) = (logits < -60.0).select(0.0, logits.exp()).matrix();
        const double inlier = col.head(n).sum();
        const double rel_out = out_logit - shift;
        // Normalize in log space so a dominant outlier term cannot overflow.
        const double log_total = rel_out > 0.0 ? rel_out + std::log1p(inlier * std::exp(-rel_out))
                                               : std::log(inlier + std::exp(rel_out));
        col.head(n) *= std::exp(-log_total);
        col[n] = std::exp(rel_out - log_total);
        observed += shift + log_total;
    }
    const double per_point = std::log(p.pi_in) - 0.5 * k * std::log(2.0 * std::numbers::pi * p.sigma);
    out.observed = observed + static_cast<double>(m) * per_point;
    return out;
}

struct MStep {
    GmmParams params;
    double weighted_sq = 0.0;  // sum alpha d under the new R
    double mass = 0.0;         // sum alpha over inlier classes
};

MStep m_step_t(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& resp,
               const GmmParams& current, double sigma_floor) {
    const Eigen::Index n = x.cols(), k = x.rows();
    const auto inlier = resp.topRows(n);
    const Eigen::MatrixXd xr = x * inlier;  // K x m
    const Eigen::MatrixXd cross = y * xr.transpose();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    MStep out;
    out.params = current;
    out.params.rotation = svd.matrixU() * svd.matrixV().transpose();
    const Eigen::VectorXd& sv = svd.singularValues();
    out.params.rank_deficient = sv.size() > 0 && !(sv[k - 1] > 1e-12 * sv[0]);

    const Eigen::VectorXd row_mass = inlier.colwise().sum().transpose();  // per data point
    const Eigen::VectorXd col_mass = inlier.rowwise().sum();               // per cluster
    out.mass = row_mass.sum();
    const double trace = (out.params.rotation.transpose() * cross).trace();
    out.weighted_sq = std::max(0.0, row_mass.dot(y.colwise().squaredNorm().transpose()) +
                                        col_mass.dot(x.colwise().squaredNorm().transpose()) - 2.0 * trace);
    const double sigma = out.mass > 0.0 ? out.weighted_sq / (static_cast<double>(k) * out.mass) : current.sigma;
    out.params.sigma = std::max(sigma, sigma_floor);
    return out;
}

double expected_from_sums(double weighted_sq, double mass, double sigma, int k) {
    return -0.5 * (weighted_sq / sigma + static_cast<double>(k) * std::log(sigma) * mass);
}

}  // namespace

double GmmParams::uniform_const() const { return std::exp(log_uniform_const); }

double log_ball_volume(int k, double radius) {
    const double half = 0.5 * static_cast<double>(k);
    return half * std::log(std::numbers::pi) + static_cast<double>(k) * std::log(radius) - std::lgamma(half + 1.0);
}

double log_uniform_constant(int k, double pi_in, double pi_out, double radius) {
    if (pi_out <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(pi_out / pi_in) + 0.5 * static_cast<double>(k) * std::log(2.0 * std::numbers::pi) -
           log_ball_volume(k, radius);
}

Eigen::MatrixXd e_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GmmParams& params) {
    require_dims(x, y, params.rotation);
    return e_step_t(x, y, params).resp.transpose();
}

GmmParams m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& posterior,
                 const GmmParams& current, double sigma_floor) {
    require_dims(x, y, current.rotation);
    if (posterior.rows() != y.cols() || posterior.cols() != x.cols() + 1) throw Error("m_step: posterior has the wrong shape");
    return m_step_t(x, y, posterior.transpose(), current, sigma_floor).params;
}

double expected_log_likelihood(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& posterior,
                               const GmmParams& params) {
    require_dims(x, y, params.rotation);
    const Eigen::MatrixXd d = squared_distances(x, y, params.rotation);  // n x m
    const auto inlier = posterior.leftCols(x.cols());                     // m x n
    const double weighted = (inlier.transpose().array() * d.array()).sum();
    return expected_from_sums(weighted, inlier.sum(), params.sigma, static_cast<int>(x.rows()));
}

double observed_log_likelihood(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GmmParams& params) {
    require_dims(x, y, params.rotation);
    return e_step_t(x, y, params).observed;
}

double initial_sigma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& r0) {
    require_dims(x, y, r0);
    return squared_distances(x, y, r0).colwise().minCoeff().mean();
}

Correspondence em_register(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& r0,
                           const EmOptions& options) {
    require_dims(x, y, r0);
    if (!(options.pi_out >= 0.0 && options.pi_out < 1.0)) throw Error("EM: pi_out must lie in [0, 1)");
    if (!(options.tol > 0.0)) throw Error("EM: tolerance must be positive");
    if (options.max_iterations < 1) throw Error("EM: max_iterations must be >= 1");
    if ((r0.transpose() * r0 - Eigen::MatrixXd::Identity(r0.rows(), r0.cols())).norm() > 1e-8) {
        throw Error("EM: initial transformation is not orthogonal");
    }
    const int k = static_cast<int>(x.rows());
    const Eigen::Index n = x.cols(), m = y.cols();

    GmmParams params;
    params.rotation = r0;
    params.sigma = std::max(options.initial_sigma > 0.0 ? options.initial_sigma : initial_sigma(x, y, r0), options.sigma_floor);
    params.pi_out = options.pi_out;
    params.pi_in = (1.0 - options.pi_out) / static_cast<double>(n);
    double radius = options.outlier_radius > 0.0 ? options.outlier_radius : y.colwise().norm().maxCoeff();
    if (!(radius > 0.0)) radius = 1.0;
    params.log_uniform_const = log_uniform_constant(k, params.pi_in, params.pi_out, radius);

    Correspondence corr;
    double previous = 0.0;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        const EStep e = e_step_t(x, y, params);
        const MStep mstep = m_step_t(x, y, e.resp, params, options.sigma_floor);
        params = mstep.params;
        const double value = expected_from_sums(mstep.weighted_sq, mstep.mass, params.sigma, k);
        if (!std::isfinite(value) || !std::isfinite(e.observed)) {
            throw Error("EM: non-finite log-likelihood at iteration " + std::to_string(iter));
        }
        corr.observed_trace.push_back(e.observed);
        corr.likelihood_trace.push_back(value);
        corr.sigma_trace.push_back(params.sigma);
        corr.iterations = iter;
        if (iter > 1 && std::abs(value - previous) <= options.tol * std::abs(previous)) {
            corr.converged = true;
            break;
        }
        previous = value;
    }
    corr.log_likelihood = corr.likelihood_trace.back();
    corr.params = params;

    const EStep final_step = e_step_t(x, y, params);
    corr.posterior = final_step.resp.transpose();
    for (Eigen::Index j = 0; j < m; ++j) {
        Eigen::Index best = 0;
        const double value = final_step.resp.col(j).head(n).maxCoeff(&best);
        if (value > 0.5) {
            corr.map_matches.push_back({static_cast<int>(j), static_cast<int>(best), value});
        } else {
            corr.unmatched.push_back(static_cast<int>(j));
        }
    }
    return corr;
}

void write_correspondence_tsv(std::ostream& out, const Correspondence& corr) {
    char buf[64];
    const Eigen::Index outlier_col = corr.posterior.cols() - 1;
    std::size_t next = 0;
    const Eigen::Index m = corr.posterior.rows();
    for (Eigen::Index j = 0; j < m; ++j) {
        if (next < corr.map_matches.size() && corr.map_matches[next].j == j) {
            const Match& match = corr.map_matches[next++];
            std::snprintf(buf, sizeof buf, "%.17g", match.posterior);
            out << match.j << '\t' << match.i << '\t' << buf << '\n';
        } else {
            std::snprintf(buf, sizeof buf, "%.17g", corr.posterior(j, outlier_col));
            out << j << "\t-1\t" << buf << '\n';
        }
    }
}

std::vector<Match> read_correspondence_tsv(std::istream& in, const std::string& source) {
    std::vector<Match> matches;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream fields(line);
        Match match{};
        if (!(fields >> match.j >> match.i >> match.posterior)) {
            throw ParseError(source, line_no, "expected `j<TAB>i<TAB>posterior`");
        }
        if (match.j < 0 || match.i < -1) throw ParseError(source, line_no, "negative vertex index");
        matches.push_back(match);
    }
    return matches;
}

}  // namespace spectral_match
