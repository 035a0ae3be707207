#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace mem3d {

struct Vec3 {
    double x{}, y{}, z{};
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

// Triangle-only mesh: positions plus index triples. OBJ input is
// fan-triangulated on load; indices are 0-based in memory.
struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::int32_t, 3>> triangles;
};

struct PointCloud {
    std::vector<Vec3> points;
};

// The four discrete poses used for rotation-robust retrieval.
enum class YawAngle { deg0, deg90, deg180, deg270 };

inline constexpr std::array<YawAngle, 4> kYawAngles = {
    YawAngle::deg0, YawAngle::deg90, YawAngle::deg180, YawAngle::deg270};

const char* yaw_name(YawAngle a);

struct Aabb {
    Vec3 min, max;
};

Aabb bounding_box(const TriangleMesh& mesh);

double triangle_area(Vec3 a, Vec3 b, Vec3 c);
double surface_area(const TriangleMesh& mesh);

// ASCII OBJ reader: `v`/`f` records, 1-based and negative indices, faces with
// more than three vertices fan-triangulated. Everything else is ignored.
TriangleMesh load_mesh(const std::string& path);

// Uniformly rescales and recenters so the bounding box is centered at the
// origin with its largest extent exactly 1. Exactly idempotent: output of one
// call is a fixed point of the next.
TriangleMesh normalize_to_unit_cube(const TriangleMesh& mesh);

// Area-weighted surface sampling, deterministic in (mesh, n, seed).
// Zero-area triangles carry zero weight.
PointCloud sample_surface_points(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

// Rotation about +y, right-handed: +90 deg maps (x, y, z) -> (z, y, -x).
// Pure coordinate swaps/negations, so four 90-deg steps restore the input
// bit for bit.
TriangleMesh rotate_yaw(const TriangleMesh& mesh, YawAngle angle);

} // namespace mem3d
