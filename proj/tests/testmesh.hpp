// Procedural meshes shared by the unit and acceptance suites.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mem3d/geometry.hpp"
#include "mem3d/rng.hpp"

namespace testmesh {

using mem3d::TriangleMesh;
using mem3d::Vec3;

// Snapping vertex coordinates to a dyadic grid keeps later translations and
// power-of-two scalings exact in double arithmetic, which the bitwise
// invariance checks rely on.
inline double snap(double v) { return std::round(v * 1048576.0) / 1048576.0; }

inline Vec3 snap(Vec3 v) { return {snap(v.x), snap(v.y), snap(v.z)}; }

inline TriangleMesh transformed(const TriangleMesh& m, double scale, Vec3 offset) {
    TriangleMesh out;
    out.triangles = m.triangles;
    out.vertices.reserve(m.vertices.size());
    for (const Vec3& v : m.vertices)
        out.vertices.push_back({v.x * scale + offset.x, v.y * scale + offset.y,
                                v.z * scale + offset.z});
    return out;
}

inline TriangleMesh box(Vec3 half_extent, Vec3 center = {}) {
    TriangleMesh m;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back({center.x + (i & 1 ? half_extent.x : -half_extent.x),
                              center.y + (i & 2 ? half_extent.y : -half_extent.y),
                              center.z + (i & 4 ? half_extent.z : -half_extent.z)});
    const int quads[6][4] = {{0, 1, 3, 2}, {4, 6, 7, 5}, {0, 4, 5, 1},
                             {2, 3, 7, 6}, {0, 2, 6, 4}, {1, 5, 7, 3}};
    for (const auto& q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    return m;
}

inline TriangleMesh cube(double half = 0.5) { return box({half, half, half}); }

inline TriangleMesh icosphere(int subdivisions = 3, double radius = 0.5) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
    std::vector<std::array<std::int32_t, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},  {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
        {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
        {3, 2, 6},  {3, 6, 8},  {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
        {8, 6, 7},  {9, 8, 1}};
    auto project = [&](Vec3 v) { return (radius / mem3d::norm(v)) * v; };
    for (Vec3& v : verts)
        v = project(v);

    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const std::pair<int, int> key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end())
                return it->second;
            verts.push_back(project(0.5 * (verts[a] + verts[b])));
            midpoint.emplace(key, static_cast<int>(verts.size()) - 1);
            return static_cast<int>(verts.size()) - 1;
        };
        std::vector<std::array<std::int32_t, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }

    TriangleMesh m;
    m.vertices.reserve(verts.size());
    for (const Vec3& v : verts)
        m.vertices.push_back(snap(v));
    m.triangles = std::move(faces);
    return m;
}

inline TriangleMesh torus(double major = 0.35, double minor = 0.15, int nu = 24, int nv = 12) {
    TriangleMesh m;
    for (int i = 0; i < nu; ++i) {
        const double u = 2.0 * M_PI * i / nu;
        for (int j = 0; j < nv; ++j) {
            const double v = 2.0 * M_PI * j / nv;
            m.vertices.push_back(snap({(major + minor * std::cos(v)) * std::cos(u),
                                       minor * std::sin(v),
                                       (major + minor * std::cos(v)) * std::sin(u)}));
        }
    }
    auto idx = [&](int i, int j) { return (i % nu) * nv + (j % nv); };
    for (int i = 0; i < nu; ++i) {
        for (int j = 0; j < nv; ++j) {
            m.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
            m.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
        }
    }
    return m;
}

// Random box-ellipsoid blend used for bulk procedural corpora: distinct
// shapes with probability one, cheap to rasterize.
inline TriangleMesh random_primitive(std::uint64_t seed) {
    mem3d::Rng rng(seed);
    const int kind = static_cast<int>(rng.next_below(3));
    TriangleMesh m;
    if (kind == 0) {
        m = box({0.2 + 0.3 * rng.next_double(), 0.2 + 0.3 * rng.next_double(),
                 0.2 + 0.3 * rng.next_double()});
    } else if (kind == 1) {
        m = icosphere(1, 0.5);
        const double sx = 0.4 + 0.6 * rng.next_double();
        const double sy = 0.4 + 0.6 * rng.next_double();
        const double sz = 0.4 + 0.6 * rng.next_double();
        for (Vec3& v : m.vertices)
            v = snap({v.x * sx, v.y * sy, v.z * sz});
    } else {
        m = torus(0.25 + 0.15 * rng.next_double(), 0.08 + 0.1 * rng.next_double(), 16, 8);
    }
    // Small deterministic vertex jitter so no two corpus shapes coincide.
    for (Vec3& v : m.vertices)
        v = snap({v.x + 0.01 * (rng.next_double() - 0.5), v.y + 0.01 * (rng.next_double() - 0.5),
                  v.z + 0.01 * (rng.next_double() - 0.5)});
    return m;
}

// Deterministic vertex perturbation of an existing mesh (near-copy).
inline TriangleMesh perturbed(const TriangleMesh& m, std::uint64_t seed, double amount) {
    mem3d::Rng rng(seed);
    TriangleMesh out;
    out.triangles = m.triangles;
    out.vertices.reserve(m.vertices.size());
    for (const Vec3& v : m.vertices)
        out.vertices.push_back(snap({v.x + amount * (rng.next_double() - 0.5),
                                     v.y + amount * (rng.next_double() - 0.5),
                                     v.z + amount * (rng.next_double() - 0.5)}));
    return out;
}

inline void write_obj(const TriangleMesh& m, const std::string& path) {
    std::ofstream out(path);
    out.precision(17);
    for (const Vec3& v : m.vertices)
        out << "v " << v.x << " " << v.y << " " << v.z << "\n";
    for (const auto& t : m.triangles)
        out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
}

} // namespace testmesh
