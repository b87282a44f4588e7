#include "msseg/distance_transform.hpp"

#include <limits>

#include "msseg/errors.hpp"

namespace msseg {

namespace {

// 1-D squared distance transform of a sampled function f (Felzenszwalb &
// Huttenlocher): d(p) = min_q (p-q)^2 + f(q).
void dt_1d(const double* f, double* d, int* v, double* z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        for (;;) {
            s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

} // namespace

std::vector<double> squared_distance_transform(const std::vector<std::uint8_t>& mask,
                                               int width, int height) {
    if (width < 1 || height < 1 || mask.size() != std::size_t(width) * std::size_t(height))
        throw config_error("distance transform: bad dimensions");

    // Large finite stand-in for +infinity keeps the parabola arithmetic clean;
    // it dominates any real squared distance in the image.
    const double kFar = 1e12;
    std::vector<double> dist(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) dist[i] = mask[i] ? 0.0 : kFar;

    const std::size_t nmax = std::size_t(std::max(width, height));
    std::vector<double> f(nmax), d(nmax), z(nmax + 1);
    std::vector<int> v(nmax);

    // columns
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) f[std::size_t(y)] = dist[std::size_t(y) * width + x];
        dt_1d(f.data(), d.data(), v.data(), z.data(), height);
        for (int y = 0; y < height; ++y) dist[std::size_t(y) * width + x] = d[std::size_t(y)];
    }
    // rows
    for (int y = 0; y < height; ++y) {
        double* row = &dist[std::size_t(y) * width];
        for (int x = 0; x < width; ++x) f[std::size_t(x)] = row[x];
        dt_1d(f.data(), d.data(), v.data(), z.data(), width);
        for (int x = 0; x < width; ++x) row[x] = d[std::size_t(x)];
    }
    return dist;
}

} // namespace msseg
