#include "mem3d/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include "mem3d/errors.hpp"

namespace mem3d {

namespace {
constexpr const char* kPoseMarker = "@yaw";
}

std::string pose_tagged_id(const std::string& id, YawAngle angle) {
    switch (angle) {
    case YawAngle::deg0: return id;
    case YawAngle::deg90: return id + kPoseMarker + "090";
    case YawAngle::deg180: return id + kPoseMarker + "180";
    default: return id + kPoseMarker + "270";
    }
}

std::string pose_base_id(const std::string& row_id) {
    const std::size_t pos = row_id.rfind(kPoseMarker);
    if (pos == std::string::npos)
        return row_id;
    return row_id.substr(0, pos);
}

std::optional<std::size_t> DescriptorCache::find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        return std::nullopt;
    return it->second;
}

void DescriptorCache::append(const std::string& id, const float* features) {
    if (index_.count(id))
        throw DataError("DescriptorCache: duplicate id '" + id + "'");
    index_.emplace(id, ids_.size());
    ids_.push_back(id);
    rows_.insert(rows_.end(), features, features + kCacheRowFloats);
}

void DescriptorCache::append(const LightFieldDescriptor& descriptor) {
    float flat[kCacheRowFloats];
    for (int v = 0; v < kViewCount; ++v)
        std::memcpy(flat + v * kViewFeatureCount, descriptor.views[v].features.data(),
                    kViewFeatureCount * sizeof(float));
    append(descriptor.shape_id, flat);
}

LightFieldDescriptor DescriptorCache::descriptor(std::size_t row) const {
    LightFieldDescriptor d;
    d.shape_id = ids_[row];
    const float* p = this->row(row);
    for (int v = 0; v < kViewCount; ++v)
        std::memcpy(d.views[v].features.data(), p + v * kViewFeatureCount,
                    kViewFeatureCount * sizeof(float));
    return d;
}

double row_l1(const float* a, const float* b) {
    double sum = 0.0;
    for (int i = 0; i < kCacheRowFloats; ++i)
        sum += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    return sum;
}

BuildResult build_cache(const std::vector<ShapeRef>& shapes, PoseMode pose_mode) {
    if (shapes.empty())
        throw DataError("build_cache: empty shape list");
    for (const auto& s : shapes)
        if (s.id.find(kPoseMarker) != std::string::npos)
            throw DataError("build_cache: id '" + s.id + "' uses the reserved marker " +
                            kPoseMarker);

    struct ShapeRows {
        std::vector<std::pair<std::string, LightFieldDescriptor>> rows;
        std::string error;
    };
    std::vector<ShapeRows> results(shapes.size());

    const std::int64_t count = static_cast<std::int64_t>(shapes.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        ShapeRows& slot = results[i];
        try {
            const TriangleMesh mesh = normalize_to_unit_cube(load_mesh(shapes[i].mesh_path));
            if (pose_mode == PoseMode::single) {
                slot.rows.emplace_back(shapes[i].id, light_field_descriptor(mesh, shapes[i].id));
            } else {
                for (YawAngle angle : kYawAngles) {
                    const std::string row_id = pose_tagged_id(shapes[i].id, angle);
                    slot.rows.emplace_back(
                        row_id, light_field_descriptor(rotate_yaw(mesh, angle), row_id));
                }
            }
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    }

    BuildResult out;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!results[i].error.empty()) {
            out.failures.push_back({shapes[i].id, results[i].error});
            continue;
        }
        for (const auto& [row_id, desc] : results[i].rows)
            out.cache.append(desc);
    }
    if (out.cache.size() == 0)
        throw DataError("build_cache: every shape in the manifest failed");
    return out;
}

namespace {

// Row scan with early abandoning: bail out of the feature loop as soon as the
// partial sum strictly exceeds the bound, which can never drop a row that
// would win the (distance, id) tie-break.
double row_l1_bounded(const float* a, const float* b, double bound) {
    double sum = 0.0;
    for (int i = 0; i < kCacheRowFloats; i += 50) {
        for (int j = i; j < i + 50; ++j)
            sum += std::abs(static_cast<double>(a[j]) - static_cast<double>(b[j]));
        if (sum > bound)
            return sum;
    }
    return sum;
}

} // namespace

NNResult top_k_neighbors(const LightFieldDescriptor& query, const DescriptorCache& cache,
                         std::size_t k) {
    if (cache.size() == 0)
        throw DataError("top_k_neighbors: empty cache");
    if (k < 1)
        throw UsageError("top_k_neighbors: k must be >= 1");
    k = std::min(k, cache.size());

    float q[kCacheRowFloats];
    for (int v = 0; v < kViewCount; ++v)
        std::memcpy(q + v * kViewFeatureCount, query.views[v].features.data(),
                    kViewFeatureCount * sizeof(float));

    std::vector<std::pair<double, std::size_t>> best; // ascending (distance, row)
    best.reserve(k + 1);
    const double inf = std::numeric_limits<double>::infinity();
    for (std::size_t row = 0; row < cache.size(); ++row) {
        const double bound = best.size() == k ? best.back().first : inf;
        const double d = row_l1_bounded(q, cache.row(row), bound);
        if (d > bound)
            continue;
        auto cmp = [&](const std::pair<double, std::size_t>& a,
                       const std::pair<double, std::size_t>& b) {
            if (a.first != b.first)
                return a.first < b.first;
            return cache.id(a.second) < cache.id(b.second);
        };
        const std::pair<double, std::size_t> cand{d, row};
        best.insert(std::lower_bound(best.begin(), best.end(), cand, cmp), cand);
        if (best.size() > k)
            best.pop_back();
    }

    NNResult res;
    res.query_id = query.shape_id;
    res.neighbor_id = cache.id(best[0].second);
    res.distance = best[0].first;
    for (const auto& [d, row] : best)
        res.top_k.emplace_back(cache.id(row), d);
    return res;
}

NearestNeighborSet nearest_in_cache(const DescriptorCache& queries, const DescriptorCache& train,
                                    DistanceSource source, bool group_query_poses) {
    if (train.size() == 0)
        throw DataError("nearest_in_cache: empty training cache");
    if (queries.size() == 0)
        throw DataError("nearest_in_cache: empty query cache");

    // Query groups: one per base id, in first-appearance order.
    std::vector<std::string> group_ids;
    std::vector<std::vector<std::size_t>> group_rows;
    {
        std::unordered_map<std::string, std::size_t> seen;
        for (std::size_t row = 0; row < queries.size(); ++row) {
            const std::string base =
                group_query_poses ? pose_base_id(queries.id(row)) : queries.id(row);
            auto it = seen.find(base);
            if (it == seen.end()) {
                seen.emplace(base, group_ids.size());
                group_ids.push_back(base);
                group_rows.push_back({row});
            } else {
                group_rows[it->second].push_back(row);
            }
        }
    }

    NearestNeighborSet out;
    out.distances.source = source;
    out.distances.values.resize(group_ids.size());
    out.query_ids = group_ids;
    out.neighbor_ids.resize(group_ids.size());

    const std::int64_t ngroups = static_cast<std::int64_t>(group_ids.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t g = 0; g < ngroups; ++g) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_row = 0;
        for (std::size_t qrow : group_rows[g]) {
            const float* q = queries.row(qrow);
            for (std::size_t t = 0; t < train.size(); ++t) {
                const double d = row_l1(q, train.row(t));
                if (d < best || (d == best && train.id(t) < train.id(best_row))) {
                    best = d;
                    best_row = t;
                }
            }
        }
        out.distances.values[g] = best;
        out.neighbor_ids[g] = train.id(best_row);
    }
    return out;
}

std::vector<PercentileRow> percentile_ranking(const NearestNeighborSet& nn,
                                              const std::vector<double>& percentiles) {
    const std::size_t n = nn.distances.values.size();
    if (n == 0)
        throw DataError("percentile_ranking: empty distance set");
    for (double p : percentiles)
        if (!(p >= 0.0 && p <= 100.0))
            throw UsageError("percentile_ranking: percentile " + std::to_string(p) +
                             " outside [0, 100]");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nn.distances.values[a] != nn.distances.values[b])
            return nn.distances.values[a] < nn.distances.values[b];
        return nn.query_ids[a] < nn.query_ids[b];
    });

    std::vector<PercentileRow> rows;
    rows.reserve(percentiles.size());
    for (double p : percentiles) {
        const auto idx = static_cast<std::size_t>(
            std::llround(p / 100.0 * static_cast<double>(n - 1)));
        const std::size_t item = order[idx];
        rows.push_back({p, nn.query_ids[item], nn.neighbor_ids[item], nn.distances.values[item]});
    }
    return rows;
}

AccuracyResult retrieval_accuracy(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::vector<std::pair<std::string, std::string>>& labels) {
    std::map<std::string, std::string> pred(predictions.begin(), predictions.end());

    AccuracyResult res;
    for (const auto& [query, truth] : labels) {
        AccuracyRow row;
        row.query_id = query;
        row.label_id = truth;
        if (truth == kExcludedLabel) {
            row.excluded = true;
            ++res.excluded;
            res.per_query.push_back(std::move(row));
            continue;
        }
        auto it = pred.find(query);
        if (it == pred.end())
            throw DataError("retrieval_accuracy: prediction missing for query '" + query + "'");
        row.predicted_id = it->second;
        row.correct = it->second == truth;
        ++res.evaluated;
        res.correct += row.correct;
        res.per_query.push_back(std::move(row));
    }
    if (res.evaluated == 0)
        throw DataError("retrieval_accuracy: no evaluable queries");
    res.accuracy = static_cast<double>(res.correct) / static_cast<double>(res.evaluated);
    return res;
}

} // namespace mem3d
