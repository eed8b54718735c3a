#pragma once

#include "sgpkit/image.hpp"

namespace sgp {

// Pixel-level kernels shared by the objectives and solvers. Each kernel has
// an OpenMP-parallel primary implementation and a `_serial` twin used as a
// reference in tests and benchmarks. All outputs are elementwise maps, so
// the parallel versions are bit-identical to the serial ones.
//
// Gradient fields and dual variables use the stacked layout: a vector of
// length 2*n where component i is paired with component i+n (vertical and
// horizontal differences respectively).

/// Forward differences with periodic wrap; g has length 2*shape.size().
void grad_forward(const Vec& x, ImageShape shape, Vec& g);
void grad_forward_serial(const Vec& x, ImageShape shape, Vec& g);

/// Negative adjoint of grad_forward: <grad x, p> = -<x, divergence(p)>.
void divergence(const Vec& p, ImageShape shape, Vec& out);
void divergence_serial(const Vec& p, ImageShape shape, Vec& out);

/// phi = sqrt(g1^2 + g2^2 + delta^2) per pixel for the smoothed edge map.
void edge_magnitude(const Vec& x, ImageShape shape, double delta, Vec& phi);
void edge_magnitude_serial(const Vec& x, ImageShape shape, double delta,
                           Vec& phi);

/// Positive/negative parts of the hypersurface-regularizer gradient:
/// gradient = v - u with u, v >= 0 on non-negative images. Periodic wrap at
/// the border, matching grad_forward.
void hs_split(const Vec& x, ImageShape shape, double delta, Vec& u, Vec& v);
void hs_split_serial(const Vec& x, ImageShape shape, double delta, Vec& u,
                     Vec& v);

/// Project each pair (p_i, p_{i+n}) onto the unit disc.
void project_discs(Vec& p, int n);
void project_discs_serial(Vec& p, int n);

}  // namespace sgp
