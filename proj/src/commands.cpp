#include "mem3d/commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "mem3d/errors.hpp"
#include "mem3d/rng.hpp"
#include "mem3d/version.hpp"

namespace mem3d {

MetricKind parse_metric(const std::string& name) {
    if (name == "lfd")
        return MetricKind::lfd;
    if (name == "lfd-yaw4")
        return MetricKind::lfd_yaw4;
    if (name == "chamfer")
        return MetricKind::chamfer;
    if (name == "embed")
        return MetricKind::embed;
    throw UsageError("unknown metric '" + name + "' (expected lfd|lfd-yaw4|chamfer|embed)");
}

const char* metric_name(MetricKind m) {
    switch (m) {
    case MetricKind::lfd: return "lfd";
    case MetricKind::lfd_yaw4: return "lfd-yaw4";
    case MetricKind::chamfer: return "chamfer";
    default: return "embed";
    }
}

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_manifest_path(const std::string& path) { return ends_with(path, ".csv"); }

bool cache_has_pose_tags(const DescriptorCache& cache) {
    for (std::size_t i = 0; i < cache.size(); ++i)
        if (pose_base_id(cache.id(i)) != cache.id(i))
            return true;
    return false;
}

// Resolves a zu/report input to a descriptor cache: manifests are built on
// the fly from the records of the requested split, cache files are loaded.
DescriptorCache resolve_cache(const std::string& path, Split role, PoseMode pose_mode) {
    if (is_manifest_path(path)) {
        const Manifest manifest = load_manifest(path);
        const auto records = manifest.split(role);
        if (records.empty())
            throw DataError("no '" + std::string(split_name(role)) + "' records in " + path);
        BuildResult built = build_cache(manifest.shape_refs(records), pose_mode);
        for (const auto& f : built.failures)
            std::fprintf(stderr, "warning: skipped shape '%s': %s\n", f.id.c_str(),
                         f.reason.c_str());
        return std::move(built.cache);
    }
    return load_cache(path);
}

struct SampledClouds {
    std::vector<std::string> ids;
    std::vector<PointCloud> clouds;
};

SampledClouds sample_split(const std::string& path, Split role, std::size_t points,
                           std::uint64_t seed) {
    if (!is_manifest_path(path))
        throw DataError("metric 'chamfer' needs manifest inputs, got " + path);
    const Manifest manifest = load_manifest(path);
    const auto records = manifest.split(role);
    if (records.empty())
        throw DataError("no '" + std::string(split_name(role)) + "' records in " + path);

    SampledClouds out;
    out.ids.reserve(records.size());
    out.clouds.resize(records.size());
    for (const auto& r : records)
        out.ids.push_back(r.shape_id);

    const std::int64_t count = static_cast<std::int64_t>(records.size());
    std::vector<std::string> errors(records.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            const TriangleMesh mesh =
                normalize_to_unit_cube(load_mesh(manifest.resolve_path(records[i])));
            out.clouds[i] =
                sample_surface_points(mesh, points, derive_seed(seed, records[i].shape_id));
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty())
            throw DataError("shape '" + out.ids[i] + "': " + errors[i]);
    return out;
}

struct NormalizedEmbeddings {
    std::vector<std::string> ids;
    std::vector<EmbeddingVector> rows;
    std::size_t dim = 0;
};

NormalizedEmbeddings load_normalized(const std::string& path) {
    const EmbeddingSet set = load_embeddings(path);
    NormalizedEmbeddings out;
    out.dim = set.dim;
    for (const auto& [id, vec] : set.entries) {
        out.ids.push_back(id);
        out.rows.push_back(normalize_embedding(vec));
    }
    return out;
}

} // namespace

BuildResult cmd_descriptors(const DescriptorsOptions& opt) {
    const Manifest manifest = load_manifest(opt.manifest_path);
    std::vector<ManifestRecord> records =
        opt.split ? manifest.split(*opt.split) : manifest.records;
    if (records.empty())
        throw DataError("no matching records in " + opt.manifest_path);

    BuildResult result = build_cache(manifest.shape_refs(records), opt.pose_mode);
    save_cache(result.cache, opt.out_path);

    if (!opt.dump_silhouettes.empty()) {
        std::filesystem::create_directories(opt.dump_silhouettes);
        const ViewSet& views = canonical_viewpoints();
        for (const auto& r : records) {
            if (!result.cache.find(r.shape_id))
                continue;
            const TriangleMesh mesh =
                normalize_to_unit_cube(load_mesh(manifest.resolve_path(r)));
            for (int v = 0; v < kViewCount; ++v)
                write_pgm(render_silhouette(mesh, views.cameras[v]),
                          (std::filesystem::path(opt.dump_silhouettes) /
                           (r.shape_id + "_view" + std::to_string(v) + ".pgm"))
                              .string());
        }
    }

    std::printf("descriptors: %zu rows (%zu shapes, %zu failures) -> %s\n", result.cache.size(),
                records.size() - result.failures.size(), result.failures.size(),
                opt.out_path.c_str());
    for (const auto& f : result.failures)
        std::fprintf(stderr, "warning: skipped shape '%s': %s\n", f.id.c_str(), f.reason.c_str());
    return result;
}

ZuOutput cmd_zu(const ZuOptions& opt) {
    ZuOutput out;
    if (opt.metric == MetricKind::lfd || opt.metric == MetricKind::lfd_yaw4) {
        const bool yaw4 = opt.metric == MetricKind::lfd_yaw4;
        const DescriptorCache train = resolve_cache(opt.train, Split::train, PoseMode::single);
        const DescriptorCache test = resolve_cache(opt.test, Split::test, PoseMode::single);
        const DescriptorCache gen = resolve_cache(
            opt.gen, Split::gen, yaw4 ? PoseMode::four_yaw : PoseMode::single);
        if (cache_has_pose_tags(train) || cache_has_pose_tags(test))
            throw DataError("train/test caches must be single-pose");
        if (yaw4 && !cache_has_pose_tags(gen))
            throw DataError("metric lfd-yaw4 needs a four-yaw generated cache "
                            "(build with --pose yaw4)");
        if (!yaw4 && cache_has_pose_tags(gen))
            throw DataError("generated cache is four-yaw; use --metric lfd-yaw4");
        out.test_nn = nearest_in_cache(test, train, DistanceSource::test, false);
        out.gen_nn = nearest_in_cache(gen, train, DistanceSource::generated, yaw4);
    } else if (opt.metric == MetricKind::chamfer) {
        const SampledClouds train = sample_split(opt.train, Split::train, opt.sample_points, opt.seed);
        const SampledClouds test = sample_split(opt.test, Split::test, opt.sample_points, opt.seed);
        const SampledClouds gen = sample_split(opt.gen, Split::gen, opt.sample_points, opt.seed);
        out.test_nn = nearest_distance_set(
            test.ids, train.ids, DistanceSource::test,
            [&](std::size_t q, std::size_t t) {
                return chamfer_distance(test.clouds[q], train.clouds[t]);
            });
        out.gen_nn = nearest_distance_set(
            gen.ids, train.ids, DistanceSource::generated,
            [&](std::size_t q, std::size_t t) {
                return chamfer_distance(gen.clouds[q], train.clouds[t]);
            });
    } else {
        const NormalizedEmbeddings train = load_normalized(opt.train);
        const NormalizedEmbeddings test = load_normalized(opt.test);
        const NormalizedEmbeddings gen = load_normalized(opt.gen);
        out.test_nn = nearest_distance_set(
            test.ids, train.ids, DistanceSource::test,
            [&](std::size_t q, std::size_t t) {
                return embedding_distance(test.rows[q], train.rows[t]);
            });
        out.gen_nn = nearest_distance_set(
            gen.ids, train.ids, DistanceSource::generated,
            [&](std::size_t q, std::size_t t) {
                return embedding_distance(gen.rows[q], train.rows[t]);
            });
    }

    out.comparability_warning =
        out.test_nn.distances.values.size() != out.gen_nn.distances.values.size();
    if (out.comparability_warning)
        std::fprintf(stderr,
                     "warning: |P_test|=%zu and |Q|=%zu differ; Z_U is only comparable "
                     "across runs with fixed sizes\n",
                     out.test_nn.distances.values.size(), out.gen_nn.distances.values.size());

    out.mwu = mann_whitney_u(out.test_nn.distances, out.gen_nn.distances);
    return out;
}

FdOutput cmd_fd(const FdOptions& opt) {
    const NormalizedEmbeddings ref = load_normalized(opt.ref_path);
    const NormalizedEmbeddings query = load_normalized(opt.query_path);
    if (ref.dim != query.dim)
        throw DataError("fd: dimension mismatch (" + std::to_string(ref.dim) + " vs " +
                        std::to_string(query.dim) + ")");

    auto to_sorted_rows = [](const NormalizedEmbeddings& e) {
        std::vector<std::size_t> order(e.ids.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return e.ids[a] < e.ids[b]; });
        std::vector<std::vector<double>> rows;
        rows.reserve(order.size());
        for (std::size_t idx : order)
            rows.push_back(e.rows[idx].values);
        return rows;
    };

    FdOutput out;
    out.dim = ref.dim;
    out.count_ref = ref.ids.size();
    out.count_query = query.ids.size();
    out.fd = frechet_distance(fit_gaussian(to_sorted_rows(ref)), fit_gaussian(to_sorted_rows(query)));
    return out;
}

namespace {

ordered_json mwu_to_json(const MWUResult& r) {
    return ordered_json{{"u", r.u},
                        {"n", r.n},
                        {"m", r.m},
                        {"mu", r.mu},
                        {"sigma", r.sigma},
                        {"z", r.z},
                        {"delta_hat", r.delta_hat},
                        {"had_ties", r.had_ties},
                        {"small_sample_warning", r.small_sample_warning},
                        {"verdict", r.z < 0 ? "memorization" : "no-memorization-evidence"}};
}

ordered_json fd_to_json(const FdOutput& f) {
    return ordered_json{{"value", f.fd.value},         {"mean_term", f.fd.mean_term},
                        {"trace_term", f.fd.trace_term}, {"clamped", f.fd.clamped},
                        {"dim", f.dim},                 {"count_ref", f.count_ref},
                        {"count_query", f.count_query}};
}

} // namespace

ordered_json cmd_report(const ReportOptions& opt) {
    std::optional<std::size_t> expected_size;
    if (opt.preset == "paper-s4")
        expected_size = 100;
    else if (opt.preset == "paper-s5")
        expected_size = 2500;
    else if (!opt.preset.empty())
        throw UsageError("unknown preset '" + opt.preset + "' (expected paper-s4|paper-s5)");

    ZuOptions zu_opt;
    zu_opt.train = opt.train;
    zu_opt.test = opt.test;
    zu_opt.gen = opt.gen;
    zu_opt.metric = opt.metric;
    zu_opt.seed = opt.seed;
    const ZuOutput zu = cmd_zu(zu_opt);

    ordered_json report;
    report["schema_version"] = 1;
    report["toolkit_version"] = kVersion;
    report["config"] = ordered_json{{"metric", metric_name(opt.metric)},
                                    {"seed", opt.seed},
                                    {"n_train_is_cache", !is_manifest_path(opt.train)},
                                    {"n_test", zu.test_nn.distances.values.size()},
                                    {"n_gen", zu.gen_nn.distances.values.size()},
                                    {"percentiles", opt.percentiles},
                                    {"preset", opt.preset.empty() ? ordered_json(nullptr)
                                                                  : ordered_json(opt.preset)}};
    report["z_u"] = mwu_to_json(zu.mwu);
    report["comparability_warning"] =
        zu.comparability_warning ? ordered_json("|Q| != |P_test|; Z_U comparable only at fixed sizes")
                                 : ordered_json(nullptr);
    if (expected_size &&
        (zu.test_nn.distances.values.size() != *expected_size ||
         zu.gen_nn.distances.values.size() != *expected_size))
        report["preset_warning"] = "preset " + opt.preset + " expects |P_test| = |Q| = " +
                                   std::to_string(*expected_size);
    else
        report["preset_warning"] = nullptr;

    report["fd_train"] = opt.fd_train ? fd_to_json(cmd_fd({opt.fd_train->ref_path,
                                                           opt.fd_train->query_path}))
                                      : ordered_json(nullptr);
    report["fd_test"] = opt.fd_test ? fd_to_json(cmd_fd({opt.fd_test->ref_path,
                                                         opt.fd_test->query_path}))
                                    : ordered_json(nullptr);

    ordered_json table = ordered_json::array();
    for (const auto& row : percentile_ranking(zu.gen_nn, opt.percentiles))
        table.push_back(ordered_json{{"percentile", row.percentile},
                                     {"query_id", row.query_id},
                                     {"neighbor_id", row.neighbor_id},
                                     {"distance", row.distance}});
    report["percentile_table"] = std::move(table);

    if (!opt.out_path.empty()) {
        // Assemble first, write once: no partial reports.
        const std::string text = report.dump(2) + "\n";
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out)
            throw DataError("report: cannot open " + opt.out_path);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out)
            throw DataError("report: write failed for " + opt.out_path);
    }
    return report;
}

ToyResult toy_experiment(std::size_t n, ToyMode mode, std::uint64_t seed, double sigma_noise) {
    if (n < 20)
        throw UsageError("toy_experiment: n must be >= 20");

    Rng rng(seed);
    using Pt = std::array<double, 2>;
    auto gauss2 = [&] { return Pt{rng.next_gaussian(), rng.next_gaussian()}; };

    std::vector<Pt> train(n), test(n), gen(n);
    for (auto& p : train)
        p = gauss2();
    for (auto& p : test)
        p = gauss2();
    for (auto& p : gen) {
        if (mode == ToyMode::memorize) {
            const Pt& base = train[rng.next_below(n)];
            const Pt noise = gauss2();
            p = {base[0] + sigma_noise * noise[0], base[1] + sigma_noise * noise[1]};
        } else {
            p = gauss2();
        }
    }

    auto nn_distance = [&](const Pt& q) {
        double best = std::numeric_limits<double>::infinity();
        for (const Pt& t : train)
            best = std::min(best, std::hypot(q[0] - t[0], q[1] - t[1]));
        return best;
    };
    DistanceSet d_test{{}, DistanceSource::test};
    DistanceSet d_gen{{}, DistanceSource::generated};
    for (const Pt& q : test)
        d_test.values.push_back(nn_distance(q));
    for (const Pt& q : gen)
        d_gen.values.push_back(nn_distance(q));

    auto rows = [](const std::vector<Pt>& pts) {
        std::vector<std::vector<double>> r;
        r.reserve(pts.size());
        for (const Pt& p : pts)
            r.push_back({p[0], p[1]});
        return r;
    };

    ToyResult res;
    res.mwu = mann_whitney_u(d_test, d_gen);
    res.fd_train = frechet_distance(fit_gaussian(rows(train)), fit_gaussian(rows(gen)));
    return res;
}

BenchResult bench_retrieval(std::size_t rows, std::size_t queries, std::uint64_t seed) {
    if (rows == 0 || queries == 0)
        throw UsageError("bench_retrieval: rows and queries must be positive");
    Rng rng(seed);
    DescriptorCache cache;
    std::vector<float> row(kCacheRowFloats);
    for (std::size_t i = 0; i < rows; ++i) {
        for (float& v : row)
            v = static_cast<float>(rng.next_double());
        cache.append("row" + std::to_string(i), row.data());
    }
    std::vector<LightFieldDescriptor> qs;
    for (std::size_t i = 0; i < queries; ++i) {
        for (float& v : row)
            v = static_cast<float>(rng.next_double());
        DescriptorCache tmp;
        tmp.append("q", row.data());
        qs.push_back(tmp.descriptor(0));
    }

    const auto start = std::chrono::steady_clock::now();
    double sink = 0.0;
    for (const auto& q : qs)
        sink += top_k_neighbors(q, cache, 1).distance;
    const auto stop = std::chrono::steady_clock::now();

    BenchResult res;
    res.rows = rows;
    res.queries = queries;
    res.seconds = std::chrono::duration<double>(stop - start).count();
    const double bytes =
        static_cast<double>(rows) * kCacheRowFloats * sizeof(float) * static_cast<double>(queries);
    res.mb_per_second = bytes / (1024.0 * 1024.0) / std::max(res.seconds, 1e-12);
    if (sink < 0)
        std::printf("impossible\n"); // keep the scan alive
    return res;
}

} // namespace mem3d
