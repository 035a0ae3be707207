#include "mem3d/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Dense>

#include "mem3d/errors.hpp"

namespace mem3d {

MWUResult mann_whitney_u(const DistanceSet& d_test, const DistanceSet& d_gen) {
    const std::size_t n = d_test.values.size();
    const std::size_t m = d_gen.values.size();
    if (n == 0 || m == 0)
        throw DataError("mann_whitney_u: empty distance set");

    MWUResult res;
    res.n = n;
    res.m = m;
    res.small_sample_warning = n < 20 || m < 20;
    if (res.small_sample_warning)
        std::fprintf(stderr,
                     "warning: mann_whitney_u: normal approximation assumes n, m >= 20 "
                     "(n=%zu, m=%zu)\n", n, m);

    struct Entry {
        double value;
        bool gen;
    };
    std::vector<Entry> all;
    all.reserve(n + m);
    for (double v : d_test.values)
        all.push_back({v, false});
    for (double v : d_gen.values)
        all.push_back({v, true});
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        return a.value < b.value;
    });

    // Average ranks over tie groups; rank sums stay exact in doubles since
    // every rank is a multiple of 1/2 well below 2^53.
    const std::size_t total = n + m;
    double rank_gen_sum = 0.0;
    double tie_sum = 0.0; // sum of t^3 - t over tie groups
    bool had_ties = false;
    std::size_t i = 0;
    while (i < total) {
        std::size_t j = i;
        while (j < total && all[j].value == all[i].value)
            ++j;
        const std::size_t t = j - i;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].gen)
                rank_gen_sum += avg_rank;
        if (t > 1) {
            had_ties = true;
            tie_sum += static_cast<double>(t) * t * t - static_cast<double>(t);
        }
        i = j;
    }

    res.had_ties = had_ties;
    res.u = rank_gen_sum - static_cast<double>(m) * (m + 1) / 2.0;
    res.mu = static_cast<double>(n) * static_cast<double>(m) / 2.0;

    const double N = static_cast<double>(total);
    const double correction = tie_sum / (N * (N - 1.0));
    const double variance =
        static_cast<double>(n) * static_cast<double>(m) / 12.0 * ((N + 1.0) - correction);
    if (!(variance > 0.0))
        throw NumericError("mann_whitney_u: zero variance (all distances identical)");
    res.sigma = std::sqrt(variance);
    res.z = (res.u - res.mu) / res.sigma;
    res.delta_hat = res.u / (static_cast<double>(n) * static_cast<double>(m));
    return res;
}

GaussianStats fit_gaussian(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2)
        throw DataError("fit_gaussian: need at least 2 samples");
    const std::size_t dim = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != dim)
            throw DataError("fit_gaussian: inconsistent dimensions");

    GaussianStats g;
    g.dim = dim;
    g.count = rows.size();
    g.mean.assign(dim, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < dim; ++j)
            g.mean[j] += r[j];
    for (double& v : g.mean)
        v /= static_cast<double>(rows.size());

    g.cov.assign(dim * dim, 0.0);
    const double denom = static_cast<double>(rows.size() - 1);
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t k = j; k < dim; ++k) {
            double s = 0.0;
            for (const auto& r : rows)
                s += (r[j] - g.mean[j]) * (r[k] - g.mean[k]);
            const double c = s / denom;
            g.cov[j * dim + k] = c;
            g.cov[k * dim + j] = c; // mirrored, so symmetry is exact
        }
    }
    return g;
}

GaussianStats fit_gaussian(const EmbeddingSet& embeds) {
    std::vector<std::size_t> order(embeds.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return embeds.entries[a].first < embeds.entries[b].first;
    });
    std::vector<std::vector<double>> rows;
    rows.reserve(order.size());
    for (std::size_t idx : order)
        rows.push_back(embeds.entries[idx].second.values);
    return fit_gaussian(rows);
}

std::vector<double> psd_sqrt(const std::vector<double>& mat, std::size_t dim) {
    if (mat.size() != dim * dim)
        throw DataError("psd_sqrt: matrix size does not match dimension");
    Eigen::MatrixXd a(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            a(i, j) = mat[i * dim + j];
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw DataError("psd_sqrt: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success)
        throw NumericError("psd_sqrt: eigendecomposition failed");
    Eigen::VectorXd lam = solver.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -1e-8)
            throw NumericError("psd_sqrt: matrix is not positive semi-definite (eigenvalue " +
                               std::to_string(lam[i]) + ")");
        lam[i] = lam[i] > 0.0 ? std::sqrt(lam[i]) : 0.0;
    }
    const Eigen::MatrixXd root = solver.eigenvectors() * lam.asDiagonal() *
                                 solver.eigenvectors().transpose();

    std::vector<double> out(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        out[i * dim + i] = root(i, i);
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double v = 0.5 * (root(i, j) + root(j, i));
            out[i * dim + j] = v;
            out[j * dim + i] = v;
        }
    }
    return out;
}

FDResult frechet_distance(const GaussianStats& g1, const GaussianStats& g2) {
    if (g1.dim != g2.dim)
        throw DataError("frechet_distance: dimension mismatch (" + std::to_string(g1.dim) +
                        " vs " + std::to_string(g2.dim) + ")");
    const std::size_t dim = g1.dim;

    FDResult res;
    for (std::size_t i = 0; i < dim; ++i) {
        const double d = g1.mean[i] - g2.mean[i];
        res.mean_term += d * d;
    }

    const std::vector<double> s1 = psd_sqrt(g1.cov, dim);
    Eigen::MatrixXd root1(dim, dim), cov2(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            root1(i, j) = s1[i * dim + j];
            cov2(i, j) = g2.cov[i * dim + j];
        }
    Eigen::MatrixXd inner = root1 * cov2 * root1;
    inner = 0.5 * (inner + inner.transpose().eval());

    std::vector<double> inner_vec(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            inner_vec[i * dim + j] = inner(i, j);
    const std::vector<double> cross = psd_sqrt(inner_vec, dim);

    double tr1 = 0.0, tr2 = 0.0, tr_cross = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        tr1 += g1.cov[i * dim + i];
        tr2 += g2.cov[i * dim + i];
        tr_cross += cross[i * dim + i];
    }
    res.trace_term = tr1 + tr2 - 2.0 * tr_cross;

    double value = res.mean_term + res.trace_term;
    if (value < 0.0) {
        res.clamped = true;
        value = 0.0;
    }
    res.value = value;
    return res;
}

} // namespace mem3d
