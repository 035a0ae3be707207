#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mem3d/geometry.hpp"

namespace mem3d {

inline constexpr int kImageSize = 256;

// Orthographic camera: position is a unit direction on the sphere, view
// points back at the origin, up is orthogonal to view.
struct Camera {
    Vec3 position;
    Vec3 view;
    Vec3 up;
};

// The ten fixed silhouette viewpoints, one per antipodal vertex pair of a
// regular dodecahedron.
struct ViewSet {
    std::array<Camera, 10> cameras;
};

struct SilhouetteImage {
    int width = kImageSize;
    int height = kImageSize;
    std::vector<std::uint8_t> mask; // row-major, 0 = background, 1 = foreground

    SilhouetteImage() : mask(static_cast<std::size_t>(kImageSize) * kImageSize, 0) {}

    bool at(int x, int y) const {
        return mask[static_cast<std::size_t>(y) * width + x] != 0;
    }
    std::size_t foreground_count() const;
};

// World radius sqrt(3)/2 (circumscribed sphere of the normalized unit cube)
// maps to 0.45 * 256 pixels, so every silhouette of every normalized mesh
// fits the Zernike unit disk from all views at one shared scale.
double projection_scale();

Camera camera_from_direction(Vec3 direction);

const ViewSet& canonical_viewpoints();

// Orthographic binary rasterization: a pixel is foreground iff its center is
// covered by a projected triangle, with a top-left rule breaking exact-edge
// ties. Empty masks are allowed (a warning is printed), so edge-on geometry
// never aborts a batch.
SilhouetteImage render_silhouette(const TriangleMesh& mesh, const Camera& cam);

// Outer boundary of the largest 8-connected foreground component as a closed
// loop of pixel-corner lattice points. The walk starts at the top-left corner
// of the component's first pixel in scan order and keeps the region on its
// right, i.e. counter-clockwise with y measured upward.
std::vector<std::array<int, 2>> largest_contour(const SilhouetteImage& img);

// Debug dump, binary PGM (P5), 0/255.
void write_pgm(const SilhouetteImage& img, const std::string& path);

} // namespace mem3d
