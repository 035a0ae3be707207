#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "mem3d/geometry.hpp"
#include "mem3d/rasterizer.hpp"

namespace mem3d {

inline constexpr int kZernikeCount = 35;  // |Z_nm|, 0 <= n <= 10, n-m even, (0,0) excluded
inline constexpr int kFourierCount = 10;  // |c_k|/|c_0|, k = 1..10
inline constexpr int kViewFeatureCount = kZernikeCount + kFourierCount;
inline constexpr int kViewCount = 10;

// Features are stored as float32: that is the cache/file precision, and using
// it end to end keeps in-memory descriptors, persisted rows and pose-expanded
// rows bit-identical. All accumulation happens in double.
struct ZernikeFeature {
    std::array<float, kZernikeCount> magnitudes;
};

struct FourierFeature {
    std::array<float, kFourierCount> magnitudes;
};

struct ViewDescriptor {
    std::array<float, kViewFeatureCount> features;
};

struct LightFieldDescriptor {
    std::string shape_id;
    std::array<ViewDescriptor, kViewCount> views;
};

// (n, m) order of the Zernike magnitudes.
const std::vector<std::pair<int, int>>& zernike_index_order();

// Zernike moment magnitudes of the binary mask over the unit disk inscribed
// in the image, centered at the image center. The basis is precomputed once
// per pixel and shared by all images.
ZernikeFeature zernike_moments(const SilhouetteImage& img);

// Centroid-distance Fourier magnitudes of a closed contour: the vertex list
// is first rotated to a canonical start (start-point invariance is exact),
// then resampled to 128 points uniformly by arc length.
FourierFeature fourier_descriptor(const std::vector<std::array<double, 2>>& contour);

ViewDescriptor view_descriptor(const SilhouetteImage& img);

// Renders the 10 canonical silhouettes of a normalized mesh and extracts one
// descriptor per view. The mesh is not re-normalized here.
LightFieldDescriptor light_field_descriptor(const TriangleMesh& normalized_mesh,
                                            std::string shape_id = {});

// Sum over the 10 corresponding view pairs of the L1 feature distance.
double lfd_distance(const LightFieldDescriptor& a, const LightFieldDescriptor& b);

// Minimum LFD over the four yaw poses of the generated mesh against a fixed
// training descriptor.
double yaw_min_lfd(const TriangleMesh& gen_normalized, const LightFieldDescriptor& train);

} // namespace mem3d
