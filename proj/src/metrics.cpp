#include "mem3d/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mem3d/errors.hpp"

namespace mem3d {

namespace {

double squared_dist(Vec3 a, Vec3 b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double nearest_brute(Vec3 q, const std::vector<Vec3>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : pts)
        best = std::min(best, squared_dist(q, p));
    return best;
}

// Uniform grid over a target cloud for exact nearest-neighbor queries.
// Cells at Chebyshev ring d are scanned in expanding order; once the best
// squared distance is within ((d * cell)^2) no farther ring can improve it.
class PointGrid {
public:
    explicit PointGrid(const std::vector<Vec3>& pts) : pts_(pts) {
        Vec3 lo = pts[0], hi = pts[0];
        for (const Vec3& p : pts) {
            lo.x = std::min(lo.x, p.x); hi.x = std::max(hi.x, p.x);
            lo.y = std::min(lo.y, p.y); hi.y = std::max(hi.y, p.y);
            lo.z = std::min(lo.z, p.z); hi.z = std::max(hi.z, p.z);
        }
        origin_ = lo;
        const double extent = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
        const int target = std::max(1, static_cast<int>(std::cbrt(static_cast<double>(pts.size()))));
        cell_ = extent > 0.0 ? extent / target : 1.0;
        nx_ = cell_index(hi.x, origin_.x) + 1;
        ny_ = cell_index(hi.y, origin_.y) + 1;
        nz_ = cell_index(hi.z, origin_.z) + 1;
        cells_.resize(static_cast<std::size_t>(nx_) * ny_ * nz_);
        for (std::size_t i = 0; i < pts.size(); ++i)
            cells_[linear(cell_index(pts[i].x, origin_.x), cell_index(pts[i].y, origin_.y),
                          cell_index(pts[i].z, origin_.z))]
                .push_back(static_cast<int>(i));
    }

    double nearest_squared(Vec3 q) const {
        // Clamped query cell: the ring lower bound stays conservative for
        // queries outside the grid's bounding box.
        const int cx = std::min(cell_index(q.x, origin_.x), nx_ - 1);
        const int cy = std::min(cell_index(q.y, origin_.y), ny_ - 1);
        const int cz = std::min(cell_index(q.z, origin_.z), nz_ - 1);
        const int dmax = std::max({ring_bound(cx, nx_), ring_bound(cy, ny_), ring_bound(cz, nz_)});

        double best = std::numeric_limits<double>::infinity();
        for (int d = 0; d <= dmax; ++d) {
            if (d > 0 && best <= static_cast<double>(d - 1) * (d - 1) * cell_ * cell_)
                break;
            scan_ring(q, cx, cy, cz, d, best);
        }
        return best;
    }

private:
    int cell_index(double v, double o) const {
        const int i = static_cast<int>(std::floor((v - o) / cell_));
        return std::max(0, i);
    }
    std::size_t linear(int x, int y, int z) const {
        return (static_cast<std::size_t>(z) * ny_ + y) * nx_ + x;
    }
    static int ring_bound(int c, int n) { return std::max(c, n - 1 - c) + 1; }

    void scan_cell(Vec3 q, int x, int y, int z, double& best) const {
        if (x < 0 || y < 0 || z < 0 || x >= nx_ || y >= ny_ || z >= nz_)
            return;
        for (int idx : cells_[linear(x, y, z)])
            best = std::min(best, squared_dist(q, pts_[idx]));
    }

    void scan_ring(Vec3 q, int cx, int cy, int cz, int d, double& best) const {
        if (d == 0) {
            scan_cell(q, cx, cy, cz, best);
            return;
        }
        for (int dz = -d; dz <= d; ++dz) {
            for (int dy = -d; dy <= d; ++dy) {
                for (int dx = -d; dx <= d; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != d)
                        continue;
                    scan_cell(q, cx + dx, cy + dy, cz + dz, best);
                }
            }
        }
    }

    const std::vector<Vec3>& pts_;
    Vec3 origin_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1, nz_ = 1;
    std::vector<std::vector<int>> cells_;
};

// Average of squared NN distances from each point of `from` into `to`.
double directed_mean(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    double sum = 0.0;
    if (to.size() < 64) {
        for (const Vec3& q : from)
            sum += nearest_brute(q, to);
    } else {
        PointGrid grid(to);
        for (const Vec3& q : from)
            sum += grid.nearest_squared(q);
    }
    return sum / static_cast<double>(from.size());
}

} // namespace

double chamfer_distance(const PointCloud& s1, const PointCloud& s2) {
    if (s1.points.empty() || s2.points.empty())
        throw DataError("chamfer_distance: empty point cloud");
    return directed_mean(s1.points, s2.points) + directed_mean(s2.points, s1.points);
}

EmbeddingVector normalize_embedding(const EmbeddingVector& v) {
    double sq = 0.0;
    for (double x : v.values)
        sq += x * x;
    const double len = std::sqrt(sq);
    if (!(len > 0.0) || !std::isfinite(len))
        throw DataError("normalize_embedding: zero or non-finite norm");
    EmbeddingVector out;
    out.values.reserve(v.values.size());
    for (double x : v.values)
        out.values.push_back(x / len);
    return out;
}

double embedding_distance(const EmbeddingVector& f1, const EmbeddingVector& f2) {
    if (f1.values.size() != f2.values.size())
        throw DataError("embedding_distance: dimension mismatch (" +
                        std::to_string(f1.values.size()) + " vs " +
                        std::to_string(f2.values.size()) + ")");
    double ip = 0.0;
    for (std::size_t i = 0; i < f1.values.size(); ++i)
        ip += f1.values[i] * f2.values[i];
    return 1.0 - ip;
}

EmbeddingVector aggregate_view_embeddings(const std::vector<EmbeddingVector>& views) {
    if (views.empty())
        throw DataError("aggregate_view_embeddings: no views");
    const std::size_t dim = views[0].values.size();
    EmbeddingVector mean;
    mean.values.assign(dim, 0.0);
    for (const auto& v : views) {
        if (v.values.size() != dim)
            throw DataError("aggregate_view_embeddings: dimension mismatch across views");
        for (std::size_t i = 0; i < dim; ++i)
            mean.values[i] += v.values[i];
    }
    for (double& x : mean.values)
        x /= static_cast<double>(views.size());
    return normalize_embedding(mean);
}

} // namespace mem3d
