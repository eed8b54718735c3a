#pragma once

#include "sgpkit/image.hpp"

namespace sgp {

/// Scale a non-negative kernel to unit sum so the induced blur preserves
/// total flux. Throws std::invalid_argument("degenerate PSF") when the sum
/// is not positive.
Vec psf_normalize(const Vec& kernel);

/// Normalized (unit flux) isotropic Gaussian kernel centered on the grid
/// midpoint, sampled on an h-by-w grid.
Vec gaussian_psf(ImageShape shape, double sigma);

/// Normalized out-of-focus disc kernel of the given radius (pixels).
Vec disc_psf(ImageShape shape, double radius);

/// Piecewise-constant synthetic scene with a few rectangles and a disc on a
/// constant floor; intensities scaled so the maximum equals peak.
Vec shapes_scene(ImageShape shape, double floor_level, double peak);

}  // namespace sgp
