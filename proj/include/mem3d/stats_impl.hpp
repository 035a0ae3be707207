#pragma once

#include <limits>

#include "mem3d/errors.hpp"

namespace mem3d {

template <class DistFn>
NearestNeighborSet nearest_distance_set(const std::vector<std::string>& query_ids,
                                        const std::vector<std::string>& train_ids,
                                        DistanceSource source, DistFn&& dist) {
    if (train_ids.empty())
        throw DataError("nearest_distance_set: empty training set");
    if (query_ids.empty())
        throw DataError("nearest_distance_set: empty query set");

    NearestNeighborSet out;
    out.distances.source = source;
    out.distances.values.resize(query_ids.size());
    out.query_ids = query_ids;
    out.neighbor_ids.resize(query_ids.size());

    const std::int64_t nq = static_cast<std::int64_t>(query_ids.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t q = 0; q < nq; ++q) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_t = 0;
        for (std::size_t t = 0; t < train_ids.size(); ++t) {
            const double d = dist(static_cast<std::size_t>(q), t);
            if (d < best || (d == best && train_ids[t] < train_ids[best_t])) {
                best = d;
                best_t = t;
            }
        }
        out.distances.values[q] = best;
        out.neighbor_ids[q] = train_ids[best_t];
    }
    return out;
}

} // namespace mem3d
