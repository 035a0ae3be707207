#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mem3d/descriptors.hpp"
#include "mem3d/stats.hpp"

namespace mem3d {

inline constexpr int kCacheRowFloats = kViewCount * kViewFeatureCount; // 450

enum class PoseMode { single, four_yaw };

// Pose tags ride inside the row id so the cache file layout stays unchanged:
// "<id>@yaw090" etc. Plain ids must not contain the marker.
std::string pose_tagged_id(const std::string& id, YawAngle angle);
std::string pose_base_id(const std::string& row_id);

// Flat store of per-shape light field descriptors: one id per row, 450
// float32 features per row. Rows are bit-identical to the descriptors they
// were built from and to the persisted LFD1 payload.
class DescriptorCache {
public:
    std::size_t size() const { return ids_.size(); }
    const std::string& id(std::size_t row) const { return ids_[row]; }
    const float* row(std::size_t row) const { return &rows_[row * kCacheRowFloats]; }
    std::optional<std::size_t> find(const std::string& id) const;

    void append(const std::string& id, const float* features);
    void append(const LightFieldDescriptor& descriptor);
    LightFieldDescriptor descriptor(std::size_t row) const;

    bool operator==(const DescriptorCache& other) const {
        return ids_ == other.ids_ && rows_ == other.rows_;
    }

private:
    std::vector<std::string> ids_;
    std::vector<float> rows_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Streaming L1 over one cache row pair.
double row_l1(const float* a, const float* b);

struct ShapeRef {
    std::string id;
    std::string mesh_path;
};

struct BuildFailure {
    std::string id;
    std::string reason;
};

struct BuildResult {
    DescriptorCache cache;
    std::vector<BuildFailure> failures;
};

// Loads, normalizes and describes every shape; four_yaw additionally stores
// the three rotated poses under pose-tagged ids. Per-shape failures are
// recorded and skipped; a manifest with no usable shape is an error.
// Parallel over shapes, output order follows the input list.
BuildResult build_cache(const std::vector<ShapeRef>& shapes, PoseMode pose_mode);

struct NNResult {
    std::string query_id;
    std::string neighbor_id;
    double distance = 0.0;
    std::vector<std::pair<std::string, double>> top_k; // ascending (distance, id)
};

// Exact top-k by (distance, id). Early abandoning of row scans cannot change
// the result; it only skips rows that are strictly worse than the current
// k-th best.
NNResult top_k_neighbors(const LightFieldDescriptor& query, const DescriptorCache& cache,
                         std::size_t k);

// Batch d_T over a whole query cache. With group_query_poses the query rows
// are collapsed onto their base ids, taking the pose minimum (generated-side
// four-yaw retrieval); training rows are used as-is.
NearestNeighborSet nearest_in_cache(const DescriptorCache& queries, const DescriptorCache& train,
                                    DistanceSource source, bool group_query_poses = false);

struct PercentileRow {
    double percentile;
    std::string query_id;
    std::string neighbor_id;
    double distance;
};

// Nearest-rank percentiles over the ascending d_T list: index =
// round(p/100 * (n-1)). Duplicated percentiles yield duplicated rows.
std::vector<PercentileRow> percentile_ranking(const NearestNeighborSet& nn,
                                              const std::vector<double>& percentiles);

struct AccuracyRow {
    std::string query_id;
    std::string predicted_id;
    std::string label_id;
    bool correct = false;
    bool excluded = false;
};

struct AccuracyResult {
    double accuracy = 0.0;
    std::size_t evaluated = 0;
    std::size_t correct = 0;
    std::size_t excluded = 0;
    std::vector<AccuracyRow> per_query;
};

inline constexpr const char* kExcludedLabel = "excluded";

// Top-1 accuracy against ground-truth labels; queries labeled "excluded" are
// dropped before the fraction is computed.
AccuracyResult retrieval_accuracy(
    const std::vector<std::pair<std::string, std::string>>& predictions,
    const std::vector<std::pair<std::string, std::string>>& labels);

} // namespace mem3d
