#include "mem3d/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "mem3d/errors.hpp"

namespace mem3d {

const std::vector<std::pair<int, int>>& zernike_index_order() {
    static const std::vector<std::pair<int, int>> order = [] {
        std::vector<std::pair<int, int>> v;
        for (int n = 0; n <= 10; ++n)
            for (int m = n % 2; m <= n; m += 2)
                if (!(n == 0 && m == 0))
                    v.emplace_back(n, m);
        return v;
    }();
    return order;
}

namespace {

// Radial polynomial coefficients: R_nm(r) = sum_k coeff[k] * r^(n-2k).
std::vector<double> radial_coefficients(int n, int m) {
    auto fact = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i)
            f *= i;
        return f;
    };
    std::vector<double> coeff;
    for (int k = 0; k <= (n - m) / 2; ++k) {
        double c = fact(n - k) / (fact(k) * fact((n + m) / 2 - k) * fact((n - m) / 2 - k));
        coeff.push_back(k % 2 == 0 ? c : -c);
    }
    return coeff;
}

// Per-pixel Zernike basis over the inscribed unit disk, evaluated once and
// shared by every image. For pixel p and feature j the table holds
// (R cos m*theta, R sin m*theta) so a mask only needs multiply-free sums.
struct ZernikeTable {
    std::vector<std::int32_t> pixels;  // linear indices of in-disk pixels
    std::vector<double> basis;         // pixels.size() * 2 * kZernikeCount
};

const ZernikeTable& zernike_table() {
    static const ZernikeTable table = [] {
        const auto& order = zernike_index_order();
        std::vector<std::vector<double>> coeffs;
        coeffs.reserve(order.size());
        for (auto [n, m] : order)
            coeffs.push_back(radial_coefficients(n, m));

        ZernikeTable t;
        const double half = kImageSize / 2.0;
        double rpow[11];
        for (int iy = 0; iy < kImageSize; ++iy) {
            for (int ix = 0; ix < kImageSize; ++ix) {
                const double x = (ix + 0.5 - half) / half;
                const double y = (half - (iy + 0.5)) / half;
                const double r2 = x * x + y * y;
                if (r2 > 1.0)
                    continue;
                t.pixels.push_back(iy * kImageSize + ix);
                const double r = std::sqrt(r2);
                const double theta = std::atan2(y, x);
                rpow[0] = 1.0;
                for (int k = 1; k <= 10; ++k)
                    rpow[k] = rpow[k - 1] * r;
                for (std::size_t j = 0; j < order.size(); ++j) {
                    const auto [n, m] = order[j];
                    double radial = 0.0;
                    for (std::size_t k = 0; k < coeffs[j].size(); ++k)
                        radial += coeffs[j][k] * rpow[n - 2 * static_cast<int>(k)];
                    t.basis.push_back(radial * std::cos(m * theta));
                    t.basis.push_back(radial * std::sin(m * theta));
                }
            }
        }
        return t;
    }();
    return table;
}

} // namespace

ZernikeFeature zernike_moments(const SilhouetteImage& img) {
    if (img.width != kImageSize || img.height != kImageSize)
        throw DataError("zernike_moments: image must be 256x256");

    const ZernikeTable& table = zernike_table();
    double re[kZernikeCount] = {0};
    double im[kZernikeCount] = {0};
    bool any = false;
    for (std::size_t p = 0; p < table.pixels.size(); ++p) {
        if (!img.mask[table.pixels[p]])
            continue;
        any = true;
        const double* b = &table.basis[p * 2 * kZernikeCount];
        for (int j = 0; j < kZernikeCount; ++j) {
            re[j] += b[2 * j];
            im[j] -= b[2 * j + 1]; // conjugate basis
        }
    }
    if (!any)
        throw DataError("zernike_moments: empty mask");

    const double half = kImageSize / 2.0;
    const double pixel_area = 1.0 / (half * half);
    const auto& order = zernike_index_order();
    ZernikeFeature out;
    for (int j = 0; j < kZernikeCount; ++j) {
        const double norm = (order[j].first + 1) / M_PI * pixel_area;
        out.magnitudes[j] = static_cast<float>(norm * std::hypot(re[j], im[j]));
    }
    return out;
}

namespace {

// Index of the lexicographically smallest cyclic rotation of the vertex list,
// so the descriptor does not depend on which vertex the caller starts at.
std::size_t canonical_start(const std::vector<std::array<double, 2>>& pts) {
    const std::size_t n = pts.size();
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const auto& a = pts[(i + k) % n];
            const auto& b = pts[(best + k) % n];
            if (a < b) {
                best = i;
                break;
            }
            if (b < a)
                break;
        }
    }
    return best;
}

} // namespace

FourierFeature fourier_descriptor(const std::vector<std::array<double, 2>>& contour) {
    if (contour.size() < 8)
        throw DataError("fourier_descriptor: contour needs at least 8 vertices");

    const std::size_t n = contour.size();
    const std::size_t start = canonical_start(contour);

    std::vector<double> seg(n);
    double perimeter = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = contour[(start + i) % n];
        const auto& b = contour[(start + i + 1) % n];
        seg[i] = std::hypot(b[0] - a[0], b[1] - a[1]);
        perimeter += seg[i];
    }
    if (!(perimeter > 0.0))
        throw DataError("fourier_descriptor: zero-perimeter contour");

    // 128 samples uniformly by arc length from the canonical start.
    constexpr int kSamples = 128;
    std::vector<std::array<double, 2>> samples(kSamples);
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (int i = 0; i < kSamples; ++i) {
        const double s = perimeter * i / kSamples;
        while (edge + 1 < n && edge_start + seg[edge] <= s) {
            edge_start += seg[edge];
            ++edge;
        }
        const auto& a = contour[(start + edge) % n];
        const auto& b = contour[(start + edge + 1) % n];
        const double t = seg[edge] > 0.0 ? (s - edge_start) / seg[edge] : 0.0;
        samples[i] = {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
    }

    double cx = 0.0, cy = 0.0;
    for (const auto& p : samples) {
        cx += p[0];
        cy += p[1];
    }
    cx /= kSamples;
    cy /= kSamples;

    std::array<double, kSamples> radius;
    for (int i = 0; i < kSamples; ++i)
        radius[i] = std::hypot(samples[i][0] - cx, samples[i][1] - cy);

    double c0 = 0.0;
    for (double r : radius)
        c0 += r;
    if (!(c0 > 0.0))
        throw DataError("fourier_descriptor: degenerate contour");

    FourierFeature out;
    for (int k = 1; k <= kFourierCount; ++k) {
        double re = 0.0, im = 0.0;
        for (int i = 0; i < kSamples; ++i) {
            const double ang = -2.0 * M_PI * k * i / kSamples;
            re += radius[i] * std::cos(ang);
            im += radius[i] * std::sin(ang);
        }
        out.magnitudes[k - 1] = static_cast<float>(std::hypot(re, im) / c0);
    }
    return out;
}

ViewDescriptor view_descriptor(const SilhouetteImage& img) {
    const ZernikeFeature zern = zernike_moments(img);
    const auto contour_px = largest_contour(img);
    std::vector<std::array<double, 2>> contour(contour_px.size());
    for (std::size_t i = 0; i < contour_px.size(); ++i)
        contour[i] = {static_cast<double>(contour_px[i][0]), static_cast<double>(contour_px[i][1])};
    const FourierFeature four = fourier_descriptor(contour);

    ViewDescriptor out;
    std::copy(zern.magnitudes.begin(), zern.magnitudes.end(), out.features.begin());
    std::copy(four.magnitudes.begin(), four.magnitudes.end(),
              out.features.begin() + kZernikeCount);
    return out;
}

LightFieldDescriptor light_field_descriptor(const TriangleMesh& normalized_mesh,
                                            std::string shape_id) {
    const ViewSet& views = canonical_viewpoints();
    LightFieldDescriptor out;
    out.shape_id = std::move(shape_id);
    for (int i = 0; i < kViewCount; ++i) {
        const SilhouetteImage img = render_silhouette(normalized_mesh, views.cameras[i]);
        if (img.foreground_count() == 0)
            throw DataError("light_field_descriptor: empty silhouette in view " +
                            std::to_string(i));
        out.views[i] = view_descriptor(img);
    }
    return out;
}

double lfd_distance(const LightFieldDescriptor& a, const LightFieldDescriptor& b) {
    double sum = 0.0;
    for (int v = 0; v < kViewCount; ++v)
        for (int f = 0; f < kViewFeatureCount; ++f)
            sum += std::abs(static_cast<double>(a.views[v].features[f]) -
                            static_cast<double>(b.views[v].features[f]));
    return sum;
}

double yaw_min_lfd(const TriangleMesh& gen_normalized, const LightFieldDescriptor& train) {
    double best = std::numeric_limits<double>::infinity();
    for (YawAngle angle : kYawAngles) {
        const TriangleMesh posed = rotate_yaw(gen_normalized, angle);
        best = std::min(best, lfd_distance(light_field_descriptor(posed), train));
    }
    return best;
}

} // namespace mem3d
