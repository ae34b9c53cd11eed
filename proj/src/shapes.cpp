#include "spectral_match/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "spectral_match/error.hpp"

namespace spectral_match {

namespace {

using Rng = std::mt19937_64;

double jitter_offset(Rng& rng, double amount) {
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    return amount * dist(rng);
}

/// Splits quad (a, b, c, d), counter-clockwise, along a random diagonal.
void add_quad(Mesh& mesh, Rng& rng, int a, int b, int c, int d) {
    if (std::bernoulli_distribution(0.5)(rng)) {
        mesh.faces.push_back({a, b, c});
        mesh.faces.push_back({a, c, d});
    } else {
        mesh.faces.push_back({a, b, d});
        mesh.faces.push_back({b, c, d});
    }
}

}  // namespace

Mesh make_sphere(const SphereParams& p) {
    if (p.rings < 3 || p.segments < 3) throw Error("sphere needs at least 3 rings and 3 segments");
    Rng rng(p.seed);
    Mesh mesh;
    const double pi = std::numbers::pi;
    std::vector<std::pair<Eigen::Vector3d, double>> bumps;
    std::normal_distribution<double> gauss;
    for (int b = 0; b < p.bumps; ++b) {
        const Eigen::Vector3d centre = Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng)).normalized();
        const double height = p.bump_height * (0.5 + std::uniform_real_distribution<double>(0.0, 1.0)(rng));
        bumps.emplace_back(centre, height);
    }
    auto point = [&](double theta, double phi) {
        const Eigen::Vector3d dir(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
        double scale = 1.0;
        for (const auto& [centre, height] : bumps) {
            scale += height * std::exp(-(dir - centre).squaredNorm() / (2.0 * p.bump_width * p.bump_width));
        }
        return Eigen::Vector3d(scale * p.radii.cwiseProduct(dir));
    };
    mesh.vertices.push_back(point(0.0, 0.0));
    for (int r = 1; r < p.rings; ++r) {
        for (int s = 0; s < p.segments; ++s) {
            const double theta = pi * (r + jitter_offset(rng, p.jitter)) / p.rings;
            const double phi = 2.0 * pi * (s + jitter_offset(rng, p.jitter)) / p.segments;
            mesh.vertices.push_back(point(theta, phi));
        }
    }
    mesh.vertices.push_back(point(pi, 0.0));
    const int south = static_cast<int>(mesh.vertices.size()) - 1;
    auto idx = [&](int r, int s) { return 1 + (r - 1) * p.segments + (s % p.segments); };
    for (int s = 0; s < p.segments; ++s) mesh.faces.push_back({0, idx(1, s), idx(1, s + 1)});
    for (int r = 1; r + 1 < p.rings; ++r) {
        for (int s = 0; s < p.segments; ++s) add_quad(mesh, rng, idx(r, s), idx(r + 1, s), idx(r + 1, s + 1), idx(r, s + 1));
    }
    for (int s = 0; s < p.segments; ++s) mesh.faces.push_back({south, idx(p.rings - 1, s + 1), idx(p.rings - 1, s)});
    return mesh;
}

Mesh make_torus(const TorusParams& p) {
    if (p.major_steps < 3 || p.minor_steps < 3) throw Error("torus needs at least 3 steps in each direction");
    if (!(p.minor_radius > 0.0 && p.minor_radius < p.major_radius)) throw Error("torus radii must satisfy 0 < r < R");
    Rng rng(p.seed);
    Mesh mesh;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < p.major_steps; ++i) {
        for (int j = 0; j < p.minor_steps; ++j) {
            const double u = two_pi * (i + jitter_offset(rng, p.jitter)) / p.major_steps;
            const double v = two_pi * (j + jitter_offset(rng, p.jitter)) / p.minor_steps;
            const double ring = p.major_radius + p.minor_radius * std::cos(v);
            mesh.vertices.emplace_back(ring * std::cos(u), ring * std::sin(u), p.minor_radius * std::sin(v));
        }
    }
    auto idx = [&](int i, int j) { return (i % p.major_steps) * p.minor_steps + (j % p.minor_steps); };
    for (int i = 0; i < p.major_steps; ++i) {
        for (int j = 0; j < p.minor_steps; ++j) add_quad(mesh, rng, idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
    }
    return mesh;
}

Mesh make_articulated_cylinder(const CylinderParams& p) {
    if (p.rings < 2 || p.segments < 3) throw Error("cylinder needs at least 2 rings and 3 segments");
    if (!(p.length > 0.0 && p.radius > 0.0)) throw Error("cylinder length and radius must be positive");
    Rng rng(p.seed);
    const double bend_start = 0.5 * (p.length - p.bend_length);
    auto angle_at = [&](double s) {
        if (p.bend_length <= 0.0) return s >= 0.5 * p.length ? p.bend_angle : 0.0;
        return p.bend_angle * std::clamp((s - bend_start) / p.bend_length, 0.0, 1.0);
    };
    // Centre line in the y-z plane, integrated with a fine midpoint rule.
    const int steps = 4000;
    const double ds = p.length / steps;
    std::vector<Eigen::Vector3d> centre(steps + 1, Eigen::Vector3d::Zero());
    for (int t = 0; t < steps; ++t) {
        const double a = angle_at((t + 0.5) * ds);
        centre[t + 1] = centre[t] + ds * Eigen::Vector3d(0.0, std::sin(a), std::cos(a));
    }
    auto centre_at = [&](double s) {
        const double f = std::clamp(s / ds, 0.0, static_cast<double>(steps));
        const int t = std::min(static_cast<int>(f), steps - 1);
        return Eigen::Vector3d(centre[t] + (f - t) * (centre[t + 1] - centre[t]));
    };

    Mesh mesh;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int r = 0; r < p.rings; ++r) {
        for (int s = 0; s < p.segments; ++s) {
            const double jr = (r == 0 || r + 1 == p.rings) ? 0.0 : jitter_offset(rng, p.jitter);
            const double arc = p.length * (r + jr) / (p.rings - 1);
            const double phi = two_pi * (s + jitter_offset(rng, p.jitter)) / p.segments;
            const double a = angle_at(arc);
            const Eigen::Vector3d normal(0.0, std::cos(a), -std::sin(a));
            const Eigen::Vector3d binormal(1.0, 0.0, 0.0);
            mesh.vertices.push_back(centre_at(arc) + p.radius * (std::cos(phi) * binormal + std::sin(phi) * normal));
        }
    }
    auto idx = [&](int r, int s) { return r * p.segments + (s % p.segments); };
    for (int r = 0; r + 1 < p.rings; ++r) {
        for (int s = 0; s < p.segments; ++s) add_quad(mesh, rng, idx(r, s), idx(r, s + 1), idx(r + 1, s + 1), idx(r + 1, s));
    }
    return mesh;
}

}  // namespace spectral_match
