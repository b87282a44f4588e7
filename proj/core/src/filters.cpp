#include "msseg/filters.hpp"

#include <algorithm>
#include <cmath>

#include "msseg/errors.hpp"

namespace msseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Freeman-Adelson unit-norm prefactors for the G2/H2 pair and the cubic
// Hilbert-fit coefficient, in the dimensionless coordinate s = x / (sqrt(2)*sigma).
constexpr double kG2Amp = 0.9213;
constexpr double kH2Amp = 0.9780;
constexpr double kH2Cubic = 2.254;

Kernel correlate_kernel(int radius) {
    Kernel k;
    k.radius = radius;
    k.taps.assign(std::size_t(2 * radius + 1) * (2 * radius + 1), 0.0);
    return k;
}

} // namespace

double Kernel::sum() const {
    double s = 0.0;
    for (double t : taps) s += t;
    return s;
}

double Kernel::max_abs() const {
    double m = 0.0;
    for (double t : taps) m = std::max(m, std::abs(t));
    return m;
}

GrayImage correlate(const GrayImage& img, const Kernel& k) {
    const int w = img.width, h = img.height, r = k.radius;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int dy = -r; dy <= r; ++dy) {
                int yy = reflect_index(y + dy, h);
                const float* row = &img.data[std::size_t(yy) * w];
                for (int dx = -r; dx <= r; ++dx)
                    acc += k.at(dx, dy) * row[reflect_index(x + dx, w)];
            }
            out.at(x, y) = float(acc);
        }
    }
    return out;
}

GradientField sobel(const GrayImage& img) {
    Kernel kx = correlate_kernel(1), ky = correlate_kernel(1);
    const double sx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
            kx.at(dx, dy) = sx[dy + 1][dx + 1];
            ky.at(dx, dy) = sx[dx + 1][dy + 1];
        }
    return GradientField{correlate(img, kx), correlate(img, ky)};
}

GrayImage directional_derivative(const GradientField& grad, double theta) {
    if (!grad.gx.same_shape(grad.gy)) throw config_error("gradient planes differ in shape");
    GrayImage out(grad.gx.width, grad.gx.height);
    double c = std::cos(theta), s = std::sin(theta);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.data[i] = float(c * grad.gx.data[i] + s * grad.gy.data[i]);
    return out;
}

GrayImage morph_gradient(const GrayImage& img, int radius) {
    if (radius < 1) throw config_error("morph_gradient: radius must be >= 1");
    const int w = img.width, h = img.height;
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float lo = img.at(x, y), hi = lo;
            for (int dy = -radius; dy <= radius; ++dy) {
                int yy = reflect_index(y + dy, h);
                const float* row = &img.data[std::size_t(yy) * w];
                for (int dx = -radius; dx <= radius; ++dx) {
                    float v = row[reflect_index(x + dx, w)];
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            out.at(x, y) = hi - lo;
        }
    }
    return out;
}

namespace {

// Radial taper to the inscribed circle of the tap grid. A square support
// inflates the energy of diagonally steered kernels (cos 4theta leakage that
// biases the orientation argmax); an isotropic support removes it. The window
// only modifies the radial profile, so the steering identities stay exact.
double radial_window(double dx, double dy, int radius) {
    double rc = radius + 0.5;
    double r0 = 0.5 * rc;
    double r = std::hypot(dx, dy);
    if (r <= r0) return 1.0;
    if (r >= rc) return 0.0;
    double c = std::cos(0.5 * kPi * (r - r0) / (rc - r0));
    return c * c;
}

// Discrete envelope moments fix the even kernel's constant term so that any
// sampled rotation has an exactly zero tap-sum (sum_grid s_theta^2 * env is
// rotation invariant on a square grid with an isotropic envelope).
double even_constant(double sigma, int radius) {
    double num = 0.0, den = 0.0;
    double inv = 1.0 / (2.0 * sigma * sigma);
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            double env = std::exp(-(double(dx) * dx + double(dy) * dy) * inv) *
                         radial_window(dx, dy, radius);
            double sx = dx / (std::sqrt(2.0) * sigma);
            num += 2.0 * sx * sx * env;
            den += env;
        }
    }
    return num / den;
}

Kernel sample_g_kernel(double theta, double sigma, int radius, double c) {
    Kernel k = correlate_kernel(radius);
    double inv = 1.0 / (std::sqrt(2.0) * sigma);
    double sn_x = -std::sin(theta), sn_y = std::cos(theta); // normal of the edge-line angle
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            double sn = (dx * sn_x + dy * sn_y) * inv;
            double env = std::exp(-(double(dx) * dx + double(dy) * dy) /
                                  (2.0 * sigma * sigma)) *
                         radial_window(dx, dy, radius);
            k.at(dx, dy) = kG2Amp * (2.0 * sn * sn - c) * env;
        }
    return k;
}

Kernel sample_h_kernel(double theta, double sigma, int radius) {
    Kernel k = correlate_kernel(radius);
    double inv = 1.0 / (std::sqrt(2.0) * sigma);
    double sn_x = -std::sin(theta), sn_y = std::cos(theta);
    for (int dy = -radius; dy <= radius; ++dy)
        for (int dx = -radius; dx <= radius; ++dx) {
            double sn = (dx * sn_x + dy * sn_y) * inv;
            double env = std::exp(-(double(dx) * dx + double(dy) * dy) /
                                  (2.0 * sigma * sigma)) *
                         radial_window(dx, dy, radius);
            k.at(dx, dy) = kH2Amp * (sn * sn * sn - kH2Cubic * sn) * env;
        }
    return k;
}

} // namespace

QuadraturePair QuadraturePair::make(double sigma, int radius) {
    if (sigma <= 0 || radius < 1) throw config_error("quadrature pair: bad sigma/radius");
    QuadraturePair q;
    q.sigma = sigma;
    q.radius = radius;
    double c = even_constant(sigma, radius);
    for (int i = 0; i < 3; ++i) q.g_basis[std::size_t(i)] = sample_g_kernel(i * kPi / 3.0, sigma, radius, c);
    for (int i = 0; i < 4; ++i) q.h_basis[std::size_t(i)] = sample_h_kernel(i * kPi / 4.0, sigma, radius);
    return q;
}

std::array<double, 3> QuadraturePair::g_weights(double theta) const {
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i)
        w[std::size_t(i)] = (1.0 + 2.0 * std::cos(2.0 * (theta - i * kPi / 3.0))) / 3.0;
    return w;
}

std::array<double, 4> QuadraturePair::h_weights(double theta) const {
    std::array<double, 4> w{};
    for (int i = 0; i < 4; ++i) {
        double d = theta - i * kPi / 4.0;
        w[std::size_t(i)] = 0.5 * (std::cos(d) + std::cos(3.0 * d));
    }
    return w;
}

Kernel QuadraturePair::steered_g(double theta) const {
    auto w = g_weights(theta);
    Kernel k = correlate_kernel(radius);
    for (std::size_t i = 0; i < k.taps.size(); ++i)
        k.taps[i] = w[0] * g_basis[0].taps[i] + w[1] * g_basis[1].taps[i] +
                    w[2] * g_basis[2].taps[i];
    return k;
}

Kernel QuadraturePair::steered_h(double theta) const {
    auto w = h_weights(theta);
    Kernel k = correlate_kernel(radius);
    for (std::size_t i = 0; i < k.taps.size(); ++i)
        k.taps[i] = w[0] * h_basis[0].taps[i] + w[1] * h_basis[1].taps[i] +
                    w[2] * h_basis[2].taps[i] + w[3] * h_basis[3].taps[i];
    return k;
}

Kernel QuadraturePair::sampled_g(double theta) const {
    return sample_g_kernel(theta, sigma, radius, even_constant(sigma, radius));
}

Kernel QuadraturePair::sampled_h(double theta) const {
    return sample_h_kernel(theta, sigma, radius);
}

QuadratureResponses quadrature_responses(const GrayImage& img, const QuadraturePair& q) {
    QuadratureResponses r;
    r.width = img.width;
    r.height = img.height;
    r.pair = &q;
    r.dynamic_range = double(img.max_value()) - double(img.min_value());
    for (int i = 0; i < 3; ++i) r.g[std::size_t(i)] = correlate(img, q.g_basis[std::size_t(i)]);
    for (int i = 0; i < 4; ++i) r.h[std::size_t(i)] = correlate(img, q.h_basis[std::size_t(i)]);
    return r;
}

OrientationField orientation_energy(const QuadratureResponses& resp, double threshold_frac,
                                    double min_threshold) {
    if (!resp.pair) throw config_error("orientation_energy: responses missing their pair");
    const QuadraturePair& q = *resp.pair;
    constexpr int kAngles = 8;

    std::array<std::array<double, 3>, kAngles> gw;
    std::array<std::array<double, 4>, kAngles> hw;
    std::array<double, kAngles> cos2{}, sin2{};
    for (int k = 0; k < kAngles; ++k) {
        double theta = k * kPi / kAngles;
        gw[std::size_t(k)] = q.g_weights(theta);
        hw[std::size_t(k)] = q.h_weights(theta);
        cos2[std::size_t(k)] = std::cos(2.0 * theta);
        sin2[std::size_t(k)] = std::sin(2.0 * theta);
    }

    OrientationField f;
    f.width = resp.width;
    f.height = resp.height;
    std::size_t n = std::size_t(resp.width) * std::size_t(resp.height);
    f.theta.resize(n);
    f.c1.resize(n);
    f.c2.resize(n);
    f.c3.resize(n);
    f.reliable.resize(n);
    f.energy_threshold =
        std::max(threshold_frac * resp.dynamic_range * resp.dynamic_range, min_threshold);

    for (std::size_t i = 0; i < n; ++i) {
        double c1 = 0.0, c2 = 0.0, c3 = 0.0;
        for (int k = 0; k < kAngles; ++k) {
            double gs = resp.steered_g_at(i, gw[std::size_t(k)]);
            double hs = resp.steered_h_at(i, hw[std::size_t(k)]);
            double e = gs * gs + hs * hs;
            c1 += e;
            c2 += e * cos2[std::size_t(k)];
            c3 += e * sin2[std::size_t(k)];
        }
        c1 /= kAngles;
        c2 *= 2.0 / kAngles;
        c3 *= 2.0 / kAngles;
        f.c1[i] = c1;
        f.c2[i] = c2;
        f.c3[i] = c3;
        bool ok = c1 >= f.energy_threshold;
        f.reliable[i] = ok ? 1 : 0;
        if (!ok) {
            f.theta[i] = 0.0f; // convention for low-energy pixels
            continue;
        }
        double theta = 0.5 * std::atan2(c3, c2);
        f.theta[i] = float(theta);
    }
    return f;
}

GrayImage phase(const QuadratureResponses& resp, const OrientationField& field) {
    if (resp.width != field.width || resp.height != field.height)
        throw config_error("phase: responses and orientation field differ in shape");
    const QuadraturePair& q = *resp.pair;
    GrayImage r(resp.width, resp.height);
    for (std::size_t i = 0; i < r.size(); ++i) {
        auto gw = q.g_weights(field.theta[i]);
        auto hw = q.h_weights(field.theta[i]);
        double gs = resp.steered_g_at(i, gw);
        double hs = resp.steered_h_at(i, hw);
        r.data[i] = float(std::atan2(gs, hs));
    }
    return r;
}

} // namespace msseg
