#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mem3d/metrics.hpp"

namespace mem3d {

enum class DistanceSource { test, generated };

// Nearest-training-neighbor distances for one query set.
struct DistanceSet {
    std::vector<double> values;
    DistanceSource source = DistanceSource::test;
};

struct MWUResult {
    double u = 0.0;       // U statistic of the generated set
    std::size_t n = 0;    // |D_test|
    std::size_t m = 0;    // |D_gen|
    double mu = 0.0;      // mn/2
    double sigma = 0.0;   // tie-corrected
    double z = 0.0;       // (u - mu)/sigma; < 0 points at memorization
    double delta_hat = 0.0; // u/(nm), diagnostic estimate of Pr(B > A)
    bool had_ties = false;
    bool small_sample_warning = false; // n or m below 20
};

struct GaussianStats {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<double> mean;  // dim
    std::vector<double> cov;   // dim*dim row-major, symmetric
};

struct FDResult {
    double value = 0.0;
    double mean_term = 0.0;
    double trace_term = 0.0;
    bool clamped = false; // raw value was slightly negative and clipped to 0
};

// Rank-form Mann-Whitney U with average ranks for ties; ties between the two
// samples contribute 1/2 to U, matching the double-loop count exactly.
// sigma uses the standard tie correction and reduces to
// sqrt(nm(n+m+1)/12) without ties.
MWUResult mann_whitney_u(const DistanceSet& d_test, const DistanceSet& d_gen);

// Sample mean and 1/(count-1) covariance, exact-symmetric by construction.
// Rows are consumed in the given order; callers wanting order independence
// sort by id first (the EmbeddingSet overload does).
GaussianStats fit_gaussian(const std::vector<std::vector<double>>& rows);
GaussianStats fit_gaussian(const EmbeddingSet& embeds);

// Symmetric PSD square root via eigendecomposition. Eigenvalues in
// [-1e-8, 0] are clamped to zero; anything more negative is an error.
std::vector<double> psd_sqrt(const std::vector<double>& mat, std::size_t dim);

// FD = |mu1 - mu2|^2 + Tr(S1 + S2 - 2 (S1^1/2 S2 S1^1/2)^1/2).
FDResult frechet_distance(const GaussianStats& g1, const GaussianStats& g2);

// Exhaustive nearest-neighbor distances of every query against the training
// items, ties broken by the smaller training id. Parallelized over queries
// with per-query result slots, so output is independent of thread count.
struct NearestNeighborSet {
    DistanceSet distances;
    std::vector<std::string> query_ids;
    std::vector<std::string> neighbor_ids;
};

template <class DistFn> // double(std::size_t query_index, std::size_t train_index)
NearestNeighborSet nearest_distance_set(const std::vector<std::string>& query_ids,
                                        const std::vector<std::string>& train_ids,
                                        DistanceSource source, DistFn&& dist);

} // namespace mem3d

#include "mem3d/stats_impl.hpp"
