#pragma once

#include <array>
#include <vector>

#include "msseg/image.hpp"

namespace msseg {

/// Horizontal/vertical derivative estimates from the standard Sobel pair.
struct GradientField {
    GrayImage gx;
    GrayImage gy;
};

GradientField sobel(const GrayImage& img);

/// cos(theta)*gx + sin(theta)*gy, per pixel.
GrayImage directional_derivative(const GradientField& grad, double theta);

/// max - min over the (2*radius+1)^2 neighborhood, reflect-padded.
GrayImage morph_gradient(const GrayImage& img, int radius);

/// Square kernel of odd side 2*radius+1, row-major, indexed by (dx, dy).
struct Kernel {
    int radius = 0;
    std::vector<double> taps;

    double at(int dx, int dy) const {
        return taps[std::size_t(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
    double& at(int dx, int dy) {
        return taps[std::size_t(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
    double sum() const;
    double max_abs() const;
};

GrayImage correlate(const GrayImage& img, const Kernel& k);

/// Steerable quadrature pair: second derivative of a Gaussian (3 basis
/// kernels at 0/60/120 degrees) and the cubic fit of its Hilbert transform
/// (4 basis kernels at 0/45/90/135 degrees), discretized analytically on a
/// (2*radius+1)^2 grid. The angle parameter of the family is the edge-line
/// orientation: the kernel at angle theta varies along the perpendicular of
/// theta, so the energy of a straight edge at orientation phi peaks at
/// theta = phi.
///
/// The even kernel's constant term is chosen from discrete grid moments so
/// every sampled rotation has an exactly zero tap-sum; steering then matches
/// direct discretization to round-off.
struct QuadraturePair {
    double sigma = 1.6;
    int radius = 4;
    std::array<Kernel, 3> g_basis;
    std::array<Kernel, 4> h_basis;

    static QuadraturePair make(double sigma = 1.6, int radius = 4);

    std::array<double, 3> g_weights(double theta) const;
    std::array<double, 4> h_weights(double theta) const;

    /// Linear combination of the discrete basis kernels.
    Kernel steered_g(double theta) const;
    Kernel steered_h(double theta) const;
    /// Direct discretization of the continuous kernel rotated to theta
    /// (oracle path for the steering identity).
    Kernel sampled_g(double theta) const;
    Kernel sampled_h(double theta) const;
};

/// All 7 basis-filter response planes for one image.
struct QuadratureResponses {
    int width = 0;
    int height = 0;
    std::array<GrayImage, 3> g;
    std::array<GrayImage, 4> h;
    double dynamic_range = 0.0; // max - min of the source image
    const QuadraturePair* pair = nullptr;

    double steered_g_at(std::size_t idx, const std::array<double, 3>& w) const {
        return w[0] * g[0].data[idx] + w[1] * g[1].data[idx] + w[2] * g[2].data[idx];
    }
    double steered_h_at(std::size_t idx, const std::array<double, 4>& w) const {
        return w[0] * h[0].data[idx] + w[1] * h[1].data[idx] + w[2] * h[2].data[idx] +
               w[3] * h[3].data[idx];
    }
};

QuadratureResponses quadrature_responses(const GrayImage& img, const QuadraturePair& q);

/// Dominant orientation and the truncated Fourier fit of the angular energy.
/// theta is in (-pi/2, pi/2]; pixels with C1 below the energy threshold are
/// flagged unreliable and get theta = 0 by convention.
struct OrientationField {
    int width = 0;
    int height = 0;
    std::vector<float> theta;
    std::vector<double> c1, c2, c3; // double: the C1-vs-angular-mean identity is checked at 1e-8
    std::vector<std::uint8_t> reliable;
    double energy_threshold = 0.0;
};

/// Samples the energy at 8 uniform angles in [0, pi) and projects onto
/// {1, cos 2theta, sin 2theta}. The reliability cutoff is
/// max(threshold_frac * dynamic_range^2, min_threshold); the absolute floor
/// lets callers gate out noise-dominated pixels.
OrientationField orientation_energy(const QuadratureResponses& resp,
                                    double threshold_frac = 1e-3,
                                    double min_threshold = 0.0);

/// Quadrature phase r = atan2(G_theta* , H_theta*) per pixel, in (-pi, pi].
GrayImage phase(const QuadratureResponses& resp, const OrientationField& field);

} // namespace msseg
