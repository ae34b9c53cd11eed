#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace spectral_match {

struct GmmParams {
    Eigen::MatrixXd rotation;  // K x K orthogonal
    double sigma = 1.0;        // isotropic variance
    double pi_in = 0.0;        // per-cluster prior
    double pi_out = 0.0;
    /// log of the uniform constant; -inf disables the outlier class.
    double log_uniform_const = 0.0;
    bool rank_deficient = false;

    double uniform_const() const;
};

struct EmOptions {
    double pi_out = 0.01;
    double tol = 1e-6;
    int max_iterations = 100;
    double sigma_floor = 1e-12;
    /// Radius of the K-ball carrying the uniform outlier density; <= 0 means the
    /// largest data norm.
    double outlier_radius = 0.0;
    /// Overrides the data-driven initial variance when positive.
    double initial_sigma = 0.0;
};

struct Match {
    int j;  // vertex of shape B (data)
    int i;  // vertex of shape A (cluster)
    double posterior;
};

struct Correspondence {
    Eigen::MatrixXd posterior;  // m x (n+1), last column is the outlier class
    std::vector<Match> map_matches;
    std::vector<int> unmatched;
    int iterations = 0;
    double log_likelihood = 0.0;  // final expected complete-data value
    std::vector<double> likelihood_trace;
    std::vector<double> observed_trace;
    std::vector<double> sigma_trace;
    GmmParams params;
    bool converged = false;
};

/// log V_K(r), volume of the K-ball of radius r.
double log_ball_volume(int k, double radius);

/// log of (pi_out / pi_in) (2 pi)^{K/2} / V_K(r).
double log_uniform_constant(int k, double pi_in, double pi_out, double radius);

/// Posterior alpha (m x (n+1)) of data Y (K x m) under clusters R X (X is K x n).
Eigen::MatrixXd e_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GmmParams& params);

/// Orthogonal Procrustes update of R followed by the variance update. Keeps
/// priors and uniform constant from `current`.
GmmParams m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& posterior,
                 const GmmParams& current, double sigma_floor = 1e-12);

/// -1/2 sum_ij alpha_ji (|y_j - R x_i|^2 / sigma + K log sigma).
double expected_log_likelihood(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& posterior,
                               const GmmParams& params);

/// Observed-data log-likelihood of Y under the mixture.
double observed_log_likelihood(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const GmmParams& params);

/// Initial variance: mean_j min_i |y_j - R0 x_i|^2.
double initial_sigma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& r0);

/// Registers data Y (shape B) against clusters X (shape A) starting from R0.
Correspondence em_register(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& r0,
                           const EmOptions& options = {});

/// `j<TAB>i<TAB>posterior` per MAP match then `j<TAB>-1<TAB>outlier` per unmatched vertex.
void write_correspondence_tsv(std::ostream& out, const Correspondence& corr);
std::vector<Match> read_correspondence_tsv(std::istream& in, const std::string& source = "<tsv>");

}  // namespace spectral_match
