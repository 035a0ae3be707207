#include "mem3d/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "mem3d/errors.hpp"

namespace mem3d {

std::size_t SilhouetteImage::foreground_count() const {
    std::size_t n = 0;
    for (std::uint8_t v : mask)
        n += v != 0;
    return n;
}

double projection_scale() {
    static const double scale = 0.45 * kImageSize / (std::sqrt(3.0) / 2.0);
    return scale;
}

Camera camera_from_direction(Vec3 direction) {
    const double len = norm(direction);
    if (!(len > 0.0))
        throw DataError("camera_from_direction: zero direction");
    Vec3 pos = (1.0 / len) * direction;
    Vec3 view = -1.0 * pos;

    const Vec3 world_y{0.0, 1.0, 0.0};
    const double c = dot(world_y, view);
    Vec3 u;
    if (std::abs(c) > 0.999) {
        const Vec3 world_x{1.0, 0.0, 0.0};
        u = world_x - dot(world_x, view) * view;
    } else {
        u = world_y - c * view;
    }
    return Camera{pos, view, (1.0 / norm(u)) * u};
}

const ViewSet& canonical_viewpoints() {
    static const ViewSet views = [] {
        // Dodecahedron vertices: (+-1,+-1,+-1), (0,+-1/phi,+-phi),
        // (+-1/phi,+-phi,0), (+-phi,0,+-1/phi). One representative per
        // antipodal pair: first nonzero coordinate positive. All vertices
        // have norm sqrt(3).
        const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
        const double inv = 1.0 / phi;
        const Vec3 dirs[10] = {
            {1, 1, 1},    {1, 1, -1},  {1, -1, 1},  {1, -1, -1},
            {0, inv, phi}, {0, inv, -phi},
            {inv, phi, 0}, {-inv, phi, 0},
            {phi, 0, inv}, {phi, 0, -inv},
        };
        ViewSet vs;
        for (int i = 0; i < 10; ++i)
            vs.cameras[i] = camera_from_direction(dirs[i]);
        return vs;
    }();
    return views;
}

namespace {

double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Tie rule for pixel centers exactly on an edge: with positive orientation
// (interior = all edge functions >= 0, y down) ties count as covered on top
// edges (dy == 0, dx > 0) and left edges (dy < 0).
bool tie_covered(double ax, double ay, double bx, double by) {
    const double dx = bx - ax;
    const double dy = by - ay;
    return dy < 0.0 || (dy == 0.0 && dx > 0.0);
}

void raster_triangle(std::vector<std::uint8_t>& mask, double x0, double y0, double x1, double y1,
                     double x2, double y2) {
    double area2 = edge(x0, y0, x1, y1, x2, y2);
    if (area2 == 0.0)
        return; // edge-on: covers no pixel centers
    if (area2 < 0.0) {
        std::swap(x1, x2);
        std::swap(y1, y2);
    }

    const double min_x = std::min({x0, x1, x2});
    const double max_x = std::max({x0, x1, x2});
    const double min_y = std::min({y0, y1, y2});
    const double max_y = std::max({y0, y1, y2});
    // Pixel centers sit at i + 0.5.
    int ix0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
    int ix1 = std::min(kImageSize - 1, static_cast<int>(std::floor(max_x - 0.5)));
    int iy0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
    int iy1 = std::min(kImageSize - 1, static_cast<int>(std::floor(max_y - 0.5)));

    const bool t0 = tie_covered(x1, y1, x2, y2);
    const bool t1 = tie_covered(x2, y2, x0, y0);
    const bool t2 = tie_covered(x0, y0, x1, y1);

    for (int iy = iy0; iy <= iy1; ++iy) {
        const double py = iy + 0.5;
        for (int ix = ix0; ix <= ix1; ++ix) {
            const double px = ix + 0.5;
            const double w0 = edge(x1, y1, x2, y2, px, py);
            const double w1 = edge(x2, y2, x0, y0, px, py);
            const double w2 = edge(x0, y0, x1, y1, px, py);
            const bool in0 = w0 > 0.0 || (w0 == 0.0 && t0);
            const bool in1 = w1 > 0.0 || (w1 == 0.0 && t1);
            const bool in2 = w2 > 0.0 || (w2 == 0.0 && t2);
            if (in0 && in1 && in2)
                mask[static_cast<std::size_t>(iy) * kImageSize + ix] = 1;
        }
    }
}

} // namespace

SilhouetteImage render_silhouette(const TriangleMesh& mesh, const Camera& cam) {
    if (std::abs(norm(cam.view) - 1.0) > 1e-9 || std::abs(norm(cam.up) - 1.0) > 1e-9 ||
        std::abs(dot(cam.view, cam.up)) > 1e-9)
        throw DataError("render_silhouette: degenerate camera basis");
    if (mesh.triangles.empty())
        throw DataError("render_silhouette: mesh has no triangles");

    const Vec3 right = cross(cam.view, cam.up);
    const double scale = projection_scale();
    const double half = kImageSize / 2.0;

    std::vector<double> u(mesh.vertices.size()), v(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        u[i] = half + dot(mesh.vertices[i], right) * scale;
        v[i] = half - dot(mesh.vertices[i], cam.up) * scale;
    }

    SilhouetteImage img;
    for (const auto& t : mesh.triangles)
        raster_triangle(img.mask, u[t[0]], v[t[0]], u[t[1]], v[t[1]], u[t[2]], v[t[2]]);

    if (img.foreground_count() == 0)
        std::fprintf(stderr, "warning: silhouette is empty (mesh seen edge-on?)\n");
    return img;
}

namespace {

enum Dir { E = 0, S = 1, W = 2, N = 3 };
constexpr int kDx[4] = {1, 0, -1, 0};
constexpr int kDy[4] = {0, 1, 0, -1};

// Pixels adjacent to the edge leaving corner (x, y) in direction d, in the
// screen convention (y down): R = region side when walking with the
// foreground on the right.
void edge_pixels(int x, int y, int d, int& rx, int& ry, int& lx, int& ly) {
    switch (d) {
    case E: rx = x; ry = y; lx = x; ly = y - 1; break;
    case S: rx = x - 1; ry = y; lx = x; ly = y; break;
    case W: rx = x - 1; ry = y - 1; lx = x - 1; ly = y; break;
    default: rx = x; ry = y - 1; lx = x - 1; ly = y - 1; break;
    }
}

} // namespace

std::vector<std::array<int, 2>> largest_contour(const SilhouetteImage& img) {
    const int w = img.width, h = img.height;
    std::vector<std::int32_t> comp(static_cast<std::size_t>(w) * h, -1);
    std::vector<std::size_t> sizes;
    std::vector<std::array<int, 2>> first_pixel;

    // 8-connected component labels in scan order.
    std::vector<std::array<int, 2>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!img.at(x, y) || comp[static_cast<std::size_t>(y) * w + x] >= 0)
                continue;
            const std::int32_t label = static_cast<std::int32_t>(sizes.size());
            sizes.push_back(0);
            first_pixel.push_back({x, y});
            stack.push_back({x, y});
            comp[static_cast<std::size_t>(y) * w + x] = label;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++sizes[label];
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= h)
                            continue;
                        auto& c = comp[static_cast<std::size_t>(ny) * w + nx];
                        if (img.at(nx, ny) && c < 0) {
                            c = label;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
        }
    }
    if (sizes.empty())
        throw DataError("largest_contour: image has no foreground pixels");

    std::size_t best = 0;
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] > sizes[best])
            best = i; // ties keep the earlier label in scan order

    auto fg = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h)
            return false;
        return comp[static_cast<std::size_t>(y) * w + x] == static_cast<std::int32_t>(best);
    };

    // Crack following from the top-left corner of the seed pixel, heading E.
    const int sx = first_pixel[best][0];
    const int sy = first_pixel[best][1];
    std::vector<std::array<int, 2>> contour;
    int x = sx, y = sy, d = E;
    do {
        contour.push_back({x, y});
        const int nx = x + kDx[d], ny = y + kDy[d];
        // Choose the next direction at the corner we are about to reach.
        // Preference right, straight, left; at a checkerboard corner both
        // turns are valid and the left turn keeps 8-connected foreground
        // joined across the diagonal.
        int rx, ry, lx, ly;
        const int right_d = (d + 1) & 3;
        const int left_d = (d + 3) & 3;
        edge_pixels(nx, ny, right_d, rx, ry, lx, ly);
        const bool right_ok = fg(rx, ry) && !fg(lx, ly);
        edge_pixels(nx, ny, d, rx, ry, lx, ly);
        const bool straight_ok = fg(rx, ry) && !fg(lx, ly);
        edge_pixels(nx, ny, left_d, rx, ry, lx, ly);
        const bool left_ok = fg(rx, ry) && !fg(lx, ly);

        x = nx;
        y = ny;
        if (left_ok && right_ok)
            d = left_d;
        else if (right_ok)
            d = right_d;
        else if (straight_ok)
            d = d;
        else if (left_ok)
            d = left_d;
        else
            throw DataError("largest_contour: boundary walk failed"); // unreachable
    } while (!(x == sx && y == sy && d == E));
    return contour;
}

void write_pgm(const SilhouetteImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("write_pgm: cannot open " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> bytes(img.mask.size());
    for (std::size_t i = 0; i < img.mask.size(); ++i)
        bytes[i] = img.mask[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw DataError("write_pgm: write failed for " + path);
}

} // namespace mem3d
