// mem3d — memorization metrics for 3D shape generative models.
//
// Subcommands: descriptors, nn, zu, fd, report, toy, bench-retrieval.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <omp.h>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mem3d/commands.hpp"
#include "mem3d/errors.hpp"
#include "mem3d/version.hpp"

using namespace mem3d;

namespace {

struct CliArgs {
    // descriptors
    std::string manifest, out, pose = "single", split, dump_dir;
    // zu / report
    std::string train, test, gen, metric = "lfd", preset;
    std::uint64_t seed = 0;
    std::vector<double> percentiles = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    std::vector<std::string> fd_train_paths, fd_test_paths;
    // nn
    std::string query_cache, train_cache;
    std::size_t k = 1;
    // fd
    std::string ref, query;
    std::string fd_label = "fd";
    // toy
    std::string mode = "memorize";
    std::size_t n = 200;
    double sigma = 0.05;
    // bench
    std::size_t rows = 10000, queries = 8;
    int threads = 0;
};

PoseMode parse_pose(const std::string& s) {
    if (s == "single")
        return PoseMode::single;
    if (s == "yaw4")
        return PoseMode::four_yaw;
    throw UsageError("unknown pose mode '" + s + "' (expected single|yaw4)");
}

void print_mwu(const MWUResult& r) {
    std::printf("U      = %.6f\n", r.u);
    std::printf("mu_U   = %.6f\n", r.mu);
    std::printf("sigma_U= %.6f\n", r.sigma);
    std::printf("Z_U    = %.6f\n", r.z);
    std::printf("n=%zu m=%zu delta_hat=%.6f%s\n", r.n, r.m, r.delta_hat,
                r.had_ties ? " (ties)" : "");
    std::printf("verdict: %s\n",
                r.z < 0 ? "Z_U < 0: evidence of memorization" : "Z_U >= 0: no memorization evidence");
}

int run(int argc, char** argv) {
    CLI::App app{"memorization metrics for 3D shape generative models"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    CliArgs a;

    CLI::App* cd = app.add_subcommand("descriptors", "build an LFD1 descriptor cache");
    cd->add_option("--manifest", a.manifest, "manifest CSV")->required();
    cd->add_option("--out", a.out, "output cache path")->required();
    cd->add_option("--pose", a.pose, "single|yaw4 (default single)");
    cd->add_option("--split", a.split, "restrict to one split tag (train|test|gen)");
    cd->add_option("--dump-silhouettes", a.dump_dir, "debug: write per-view PGM masks here");

    CLI::App* cn = app.add_subcommand("nn", "top-k nearest training neighbors");
    cn->add_option("--query-cache", a.query_cache, "query LFD1 cache")->required();
    cn->add_option("--train-cache", a.train_cache, "training LFD1 cache")->required();
    cn->add_option("-k,--k", a.k, "neighbors per query (default 1)");
    cn->add_option("--out", a.out, "write results as JSON");

    CLI::App* cz = app.add_subcommand("zu", "Mann-Whitney memorization score Z_U");
    cz->add_option("--train", a.train, "training manifest/cache")->required();
    cz->add_option("--test", a.test, "held-out manifest/cache")->required();
    cz->add_option("--gen", a.gen, "generated manifest/cache")->required();
    cz->add_option("--metric", a.metric, "lfd|lfd-yaw4|chamfer|embed (default lfd)");
    cz->add_option("--seed", a.seed, "sampling seed (chamfer metric)");

    CLI::App* cf = app.add_subcommand("fd", "Frechet Distance between two embedding files");
    cf->add_option("--ref", a.ref, "reference EMB1 file")->required();
    cf->add_option("--query", a.query, "query EMB1 file")->required();
    cf->add_option("--label", a.fd_label, "role label echoed in the output (e.g. train|test)");

    CLI::App* cr = app.add_subcommand("report", "full evaluation report (JSON)");
    cr->add_option("--train", a.train, "training manifest/cache")->required();
    cr->add_option("--test", a.test, "held-out manifest/cache")->required();
    cr->add_option("--gen", a.gen, "generated manifest/cache")->required();
    cr->add_option("--metric", a.metric, "lfd|lfd-yaw4|chamfer|embed (default lfd)");
    cr->add_option("--seed", a.seed, "sampling seed");
    cr->add_option("--percentiles", a.percentiles, "percentile list (default deciles 10..90)");
    cr->add_option("--fd-train", a.fd_train_paths, "REF.emb1 GEN.emb1 for training FD")
        ->expected(2);
    cr->add_option("--fd-test", a.fd_test_paths, "REF.emb1 GEN.emb1 for test FD")->expected(2);
    cr->add_option("--preset", a.preset, "paper-s4|paper-s5 size expectation");
    cr->add_option("--out", a.out, "output JSON path")->required();

    CLI::App* ct = app.add_subcommand("toy", "2-D Gaussian validation experiment");
    ct->add_option("--mode", a.mode, "memorize|generalize (default memorize)");
    ct->add_option("--n", a.n, "points per split (default 200)");
    ct->add_option("--sigma", a.sigma, "noise scale in memorize mode (default 0.05)");
    ct->add_option("--seed", a.seed, "RNG seed");
    ct->add_option("--out", a.out, "write result as JSON");

    CLI::App* cb = app.add_subcommand("bench-retrieval", "synthetic scan throughput probe");
    cb->add_option("--rows", a.rows, "cached descriptor rows (default 10000)");
    cb->add_option("--queries", a.queries, "query count (default 8)");
    cb->add_option("--seed", a.seed, "RNG seed");

    app.add_option("--threads", a.threads, "worker threads (default: OpenMP runtime)");

    CLI11_PARSE(app, argc, argv);
    if (a.threads > 0)
        omp_set_num_threads(a.threads);

    if (cd->parsed()) {
        DescriptorsOptions opt;
        opt.manifest_path = a.manifest;
        opt.out_path = a.out;
        opt.pose_mode = parse_pose(a.pose);
        if (!a.split.empty())
            opt.split = parse_split(a.split);
        opt.dump_silhouettes = a.dump_dir;
        cmd_descriptors(opt);
    } else if (cn->parsed()) {
        const DescriptorCache queries = load_cache(a.query_cache);
        const DescriptorCache train = load_cache(a.train_cache);
        ordered_json results = ordered_json::array();
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const NNResult r = top_k_neighbors(queries.descriptor(i), train, a.k);
            ordered_json ranks = ordered_json::array();
            for (const auto& [id, d] : r.top_k)
                ranks.push_back(ordered_json{{"id", id}, {"distance", d}});
            results.push_back(ordered_json{{"query_id", r.query_id},
                                           {"neighbor_id", r.neighbor_id},
                                           {"distance", r.distance},
                                           {"top_k", std::move(ranks)}});
        }
        const std::string text = results.dump(2) + "\n";
        if (a.out.empty()) {
            std::fputs(text.c_str(), stdout);
        } else {
            std::ofstream f(a.out, std::ios::binary);
            if (!f)
                throw DataError("nn: cannot open " + a.out);
            f << text;
        }
    } else if (cz->parsed()) {
        ZuOptions opt;
        opt.train = a.train;
        opt.test = a.test;
        opt.gen = a.gen;
        opt.metric = parse_metric(a.metric);
        opt.seed = a.seed;
        print_mwu(cmd_zu(opt).mwu);
    } else if (cf->parsed()) {
        const FdOutput r = cmd_fd({a.ref, a.query});
        std::printf("%s FD = %.9f (mean %.9f + trace %.9f)%s\n", a.fd_label.c_str(), r.fd.value,
                    r.fd.mean_term, r.fd.trace_term, r.fd.clamped ? " [clamped]" : "");
        std::printf("dim=%zu count_ref=%zu count_query=%zu\n", r.dim, r.count_ref, r.count_query);
    } else if (cr->parsed()) {
        ReportOptions opt;
        opt.train = a.train;
        opt.test = a.test;
        opt.gen = a.gen;
        opt.metric = parse_metric(a.metric);
        opt.seed = a.seed;
        opt.percentiles = a.percentiles;
        if (!a.fd_train_paths.empty())
            opt.fd_train = FdPair{a.fd_train_paths[0], a.fd_train_paths[1]};
        if (!a.fd_test_paths.empty())
            opt.fd_test = FdPair{a.fd_test_paths[0], a.fd_test_paths[1]};
        opt.preset = a.preset;
        opt.out_path = a.out;
        const ordered_json report = cmd_report(opt);
        std::printf("report written to %s (Z_U = %.4f)\n", a.out.c_str(),
                    report["z_u"]["z"].get<double>());
    } else if (ct->parsed()) {
        ToyMode mode;
        if (a.mode == "memorize")
            mode = ToyMode::memorize;
        else if (a.mode == "generalize")
            mode = ToyMode::generalize;
        else
            throw UsageError("unknown toy mode '" + a.mode + "'");
        const ToyResult r = toy_experiment(a.n, mode, a.seed, a.sigma);
        std::printf("toy %s: Z_U = %.4f, training FD = %.6f\n", a.mode.c_str(), r.mwu.z,
                    r.fd_train.value);
        if (!a.out.empty()) {
            ordered_json j{{"mode", a.mode},
                           {"n", a.n},
                           {"sigma_noise", a.sigma},
                           {"seed", a.seed},
                           {"z_u", r.mwu.z},
                           {"fd_train", r.fd_train.value}};
            std::ofstream f(a.out, std::ios::binary);
            if (!f)
                throw DataError("toy: cannot open " + a.out);
            f << j.dump(2) << "\n";
        }
    } else if (cb->parsed()) {
        const BenchResult r = bench_retrieval(a.rows, a.queries, a.seed);
        std::printf("bench: %zu queries x %zu rows in %.3f s (%.1f MiB/s streamed)\n", r.queries,
                    r.rows, r.seconds, r.mb_per_second);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return UsageError::exit_code;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return DataError::exit_code;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return NumericError::exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
