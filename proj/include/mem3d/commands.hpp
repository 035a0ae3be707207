#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mem3d/io.hpp"
#include "mem3d/retrieval.hpp"
#include "mem3d/stats.hpp"

namespace mem3d {

using ordered_json = nlohmann::ordered_json;

enum class MetricKind { lfd, lfd_yaw4, chamfer, embed };

MetricKind parse_metric(const std::string& name);
const char* metric_name(MetricKind m);

// descriptors subcommand: build a cache from every manifest record (or one
// split of it) and persist it as LFD1.
struct DescriptorsOptions {
    std::string manifest_path;
    std::string out_path;
    PoseMode pose_mode = PoseMode::single;
    std::optional<Split> split;      // restrict to one split tag
    std::string dump_silhouettes;    // debug: write <id>_view<k>.pgm here
};
BuildResult cmd_descriptors(const DescriptorsOptions& opt);

// zu subcommand: d_T for the test and generated sets against the training
// set, then the Mann-Whitney z-score. Inputs are manifests (*.csv) or
// prebuilt caches, depending on the metric.
struct ZuOptions {
    std::string train;
    std::string test;
    std::string gen;
    MetricKind metric = MetricKind::lfd;
    std::uint64_t seed = 0;
    std::size_t sample_points = 4096; // chamfer metric
};

struct ZuOutput {
    MWUResult mwu;
    NearestNeighborSet test_nn;
    NearestNeighborSet gen_nn;
    bool comparability_warning = false; // |Q| != |P_test|
};
ZuOutput cmd_zu(const ZuOptions& opt);

// fd subcommand over two EMB1 files; rows are L2-normalized on ingestion.
struct FdOptions {
    std::string ref_path;
    std::string query_path;
};
struct FdOutput {
    FDResult fd;
    std::size_t dim = 0;
    std::size_t count_ref = 0;
    std::size_t count_query = 0;
};
FdOutput cmd_fd(const FdOptions& opt);

// report subcommand: one JSON document with Z_U, the percentile table and
// optional FD blocks. The document is fully assembled before anything is
// written, so a failing run leaves no partial file.
struct FdPair {
    std::string ref_path;
    std::string query_path;
};
struct ReportOptions {
    std::string train;
    std::string test;
    std::string gen;
    MetricKind metric = MetricKind::lfd;
    std::uint64_t seed = 0;
    std::vector<double> percentiles = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    std::optional<FdPair> fd_train;
    std::optional<FdPair> fd_test;
    std::string preset;   // "", "paper-s4" (expects 100), "paper-s5" (expects 2500)
    std::string out_path; // empty: do not write
};
ordered_json cmd_report(const ReportOptions& opt);

// Built-in 2-D Gaussian validation experiment. Draw order: train, test,
// generated. In memorize mode each generated point is a uniformly chosen
// training point (with replacement) plus isotropic noise of scale
// sigma_noise; in generalize mode it is a fresh draw.
enum class ToyMode { memorize, generalize };

struct ToyResult {
    MWUResult mwu;
    FDResult fd_train;
};
ToyResult toy_experiment(std::size_t n, ToyMode mode, std::uint64_t seed,
                         double sigma_noise = 0.05);

// Synthetic scan throughput probe (informational).
struct BenchResult {
    std::size_t rows = 0;
    std::size_t queries = 0;
    double seconds = 0.0;
    double mb_per_second = 0.0;
};
BenchResult bench_retrieval(std::size_t rows, std::size_t queries, std::uint64_t seed);

} // namespace mem3d
