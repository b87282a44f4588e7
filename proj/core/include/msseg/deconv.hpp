#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "msseg/filters.hpp"
#include "msseg/image.hpp"

namespace msseg {

/// Empirical observation model for the per-pixel deconvolution: six weight
/// functions tabulated against the measured quadrature phase, plus the noise
/// covariance of the three observations. Built once from a synthetic blurred
/// step (both polarities, sub-pixel offsets) and reused for every pixel.
struct DeconvCalibration {
    double sigma_cal = 2.0;
    double noise_sigma = 0.0;
    double filter_sigma = 1.6;
    int filter_radius = 4;

    int n_bins = 2048; // uniform phase grid over (-pi, pi]
    std::vector<double> w_ua, w_ub, w_ga, w_gb, w_ha, w_hb;
    std::vector<std::uint8_t> valid; // phase arcs covered by the calibration sweep

    std::array<double, 9> sigma{};     // 3x3 covariance, row-major
    std::array<double, 9> sigma_inv{};
    bool sigma_floored = false;

    /// Linear interpolation on the phase grid. Returns false when r falls
    /// outside the tabulated arcs (plateau-like phases).
    bool lookup(double r, std::array<double, 6>& w) const;

    std::string to_json() const;
    static DeconvCalibration from_json(const std::string& text);
};

/// Tabulates the weight functions by sweeping a noiseless unit step blurred
/// by sigma_cal across sub-pixel offsets (recording smoothed value, steered G,
/// steered H against the measured phase), and estimates Sigma as the
/// empirical covariance of the three measurements over noisy step
/// realizations. noise_sigma == 0 floors Sigma at 1e-6*I.
DeconvCalibration calibrate(double sigma_cal, const QuadraturePair& q, double noise_sigma,
                            std::uint64_t seed = 0x5ca1ab1e);

struct PixelSolve {
    double a = 0.0;
    double b = 0.0;
    bool reliable = false;
};

/// Generalized least squares solve of the 3x2 system for one pixel.
/// Ill-conditioned weight matrices (condition number > 1e6) and phases
/// outside the calibrated arcs fall back to a = b = u with reliability
/// cleared.
PixelSolve solve_pixel(double u, double g, double h, double r, const DeconvCalibration& cal);

/// Per-pixel idealized two-sided intensity estimates.
struct DeconvField {
    int width = 0;
    int height = 0;
    GrayImage a;
    GrayImage b;
    GrayImage phase_map;
    GrayImage theta;
    std::vector<std::uint8_t> reliable;
};

/// Orientation + phase + per-pixel GLS solve over a whole (smoothed) image.
/// Low-energy pixels are treated as interior: a = b = u, reliability cleared.
DeconvField deconvolve(const GrayImage& img, const QuadraturePair& q,
                       const DeconvCalibration& cal, double energy_threshold_frac = 1e-3);

} // namespace msseg
