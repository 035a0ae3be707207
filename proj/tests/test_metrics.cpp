#include <doctest.h>

#include <cmath>
#include <limits>

#include "mem3d/errors.hpp"
#include "mem3d/metrics.hpp"
#include "mem3d/rng.hpp"

using namespace mem3d;

namespace {

// O(N^2) reference used to pin down the grid-accelerated implementation.
double chamfer_brute(const PointCloud& s1, const PointCloud& s2) {
    auto directed = [](const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
        double sum = 0.0;
        for (const Vec3& q : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec3& p : to) {
                const double dx = q.x - p.x, dy = q.y - p.y, dz = q.z - p.z;
                best = std::min(best, dx * dx + dy * dy + dz * dz);
            }
            sum += best;
        }
        return sum / static_cast<double>(from.size());
    };
    return directed(s1.points, s2.points) + directed(s2.points, s1.points);
}

PointCloud random_cloud(Rng& rng, std::size_t n, double spread) {
    PointCloud c;
    for (std::size_t i = 0; i < n; ++i)
        c.points.push_back({spread * (rng.next_double() - 0.5),
                            spread * (rng.next_double() - 0.5),
                            spread * (rng.next_double() - 0.5)});
    return c;
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("chamfer: hand-computed examples") {
    PointCloud a, b;
    a.points = {{0, 0, 0}};
    b.points = {{1, 0, 0}};
    CHECK(chamfer_distance(a, b) == 2.0); // 1 + 1

    PointCloud c, d;
    c.points = {{0, 0, 0}, {2, 0, 0}};
    d.points = {{1, 0, 0}};
    CHECK(chamfer_distance(c, d) == 2.0); // (1+1)/2 + 1

    CHECK(chamfer_distance(a, a) == 0.0);
}

TEST_CASE("chamfer is exactly symmetric") {
    Rng rng(123);
    for (int iter = 0; iter < 20; ++iter) {
        const PointCloud a = random_cloud(rng, 64 + rng.next_below(200), 2.0);
        const PointCloud b = random_cloud(rng, 64 + rng.next_below(200), 2.0);
        CHECK(chamfer_distance(a, b) == chamfer_distance(b, a));
    }
}

TEST_CASE("chamfer grid acceleration equals brute force") {
    Rng rng(77);
    for (int iter = 0; iter < 30; ++iter) {
        const std::size_t na = 1 + rng.next_below(512);
        const std::size_t nb = 1 + rng.next_below(512);
        // Mix of scales, including clouds whose bounding boxes do not overlap.
        const PointCloud a = random_cloud(rng, na, 0.5 + 3.0 * rng.next_double());
        PointCloud b = random_cloud(rng, nb, 0.5 + 3.0 * rng.next_double());
        if (iter % 3 == 0)
            for (Vec3& p : b.points)
                p.x += 10.0;
        CHECK(std::abs(chamfer_distance(a, b) - chamfer_brute(a, b)) <= 1e-9);
    }
}

TEST_CASE("chamfer handles coincident and degenerate clouds") {
    PointCloud all_same;
    all_same.points.assign(100, Vec3{1, 2, 3});
    PointCloud other;
    other.points = {{1, 2, 4}};
    CHECK(chamfer_distance(all_same, other) == 2.0); // 1 each way

    PointCloud empty;
    CHECK_THROWS_AS(chamfer_distance(empty, other), DataError);
}

TEST_CASE("embedding_distance: worked values and range") {
    EmbeddingVector e1{{1, 0, 0}}, e2{{0, 1, 0}}, neg{{-1, 0, 0}};
    CHECK(embedding_distance(e1, e1) == 0.0);
    CHECK(embedding_distance(e1, e2) == 1.0);
    CHECK(embedding_distance(e1, neg) == 2.0);

    Rng rng(9);
    for (int iter = 0; iter < 50; ++iter) {
        EmbeddingVector raw;
        EmbeddingVector raw2;
        for (int i = 0; i < 16; ++i) {
            raw.values.push_back(rng.next_gaussian());
            raw2.values.push_back(rng.next_gaussian());
        }
        const double d = embedding_distance(normalize_embedding(raw), normalize_embedding(raw2));
        CHECK(d >= 0.0);
        CHECK(d <= 2.0 + 1e-12);
    }
}

TEST_CASE("embedding_distance rejects mismatched dimensions") {
    EmbeddingVector a{{1, 0}}, b{{1, 0, 0}};
    CHECK_THROWS_AS(embedding_distance(a, b), DataError);
}

TEST_CASE("aggregate_view_embeddings: mean then renormalize") {
    EmbeddingVector v{{0, 1, 0}};
    const EmbeddingVector one = aggregate_view_embeddings({v});
    CHECK(std::abs(one.values[1] - 1.0) < 1e-9);

    const EmbeddingVector two = aggregate_view_embeddings({v, v});
    CHECK(std::abs(two.values[1] - 1.0) < 1e-9);

    EmbeddingVector e1{{1, 0, 0}}, e2{{0, 1, 0}};
    const EmbeddingVector mixed = aggregate_view_embeddings({e1, e2});
    CHECK(std::abs(mixed.values[0] - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(mixed.values[1] - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(mixed.values[2] == 0.0);

    double norm_sq = 0.0;
    for (double x : mixed.values)
        norm_sq += x * x;
    CHECK(std::abs(norm_sq - 1.0) < 1e-12);
}

TEST_CASE("aggregate_view_embeddings error paths") {
    CHECK_THROWS_AS(aggregate_view_embeddings({}), DataError);
    EmbeddingVector plus{{1, 0}}, minus{{-1, 0}};
    CHECK_THROWS_AS(aggregate_view_embeddings({plus, minus}), DataError); // zero mean
    EmbeddingVector short_vec{{1}};
    CHECK_THROWS_AS(aggregate_view_embeddings({plus, short_vec}), DataError);
}

} // TEST_SUITE
