#pragma once

#include <cstdint>

#include "spectral_match/mesh.hpp"

namespace spectral_match {

/// Closed UV sphere (or ellipsoid) with pole fans. Quads are split along a random
/// diagonal and grid parameters are jittered so the mesh has no symmetry.
struct SphereParams {
    int rings = 30;     // latitude bands
    int segments = 40;  // longitude steps
    Eigen::Vector3d radii{1.0, 1.0, 1.0};
    double jitter = 0.2;  // fraction of a grid step
    /// Random Gaussian bumps added to the radius; 0 keeps the plain ellipsoid.
    int bumps = 0;
    double bump_height = 0.3;
    double bump_width = 0.5;
    std::uint64_t seed = 1;
};

struct TorusParams {
    int major_steps = 48;
    int minor_steps = 24;
    double major_radius = 1.0;
    double minor_radius = 0.4;
    double jitter = 0.2;
    std::uint64_t seed = 1;
};

/// Open tube whose centre line bends smoothly by `bend_angle` at mid-length.
struct CylinderParams {
    int rings = 50;
    int segments = 30;
    double length = 4.0;
    double radius = 0.5;
    double bend_angle = 1.0;     // radians
    double bend_length = 1.2;    // arc length over which the bend happens
    double jitter = 0.2;
    std::uint64_t seed = 1;
};

Mesh make_sphere(const SphereParams& params = {});
Mesh make_torus(const TorusParams& params = {});
Mesh make_articulated_cylinder(const CylinderParams& params = {});

}  // namespace spectral_match
