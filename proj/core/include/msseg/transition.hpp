#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "msseg/deconv.hpp"
#include "msseg/image.hpp"
#include "msseg/mixture.hpp"

namespace msseg {

struct TransitionMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> flags; // 1 = transition

    TransitionMask() = default;
    TransitionMask(int w, int h) : width(w), height(h), flags(std::size_t(w) * h, 0) {}

    bool at(int x, int y) const { return flags[std::size_t(y) * width + x] != 0; }
    std::size_t count() const;
};

/// Threshold-free method: a pixel is a transition when the Gaussian-component
/// classifications of its a and b estimates disagree. Unreliable pixels are
/// never transitions.
TransitionMask by_classification(const DeconvField& field, const NonGaussianMixture& m);

/// |a - b| > tau on reliable pixels. The default tau of 20 intensity units is
/// tied to an 8-bit scale.
TransitionMask by_difference(const DeconvField& field, double tau = 20.0);

/// Morphological gradient above tau (default 30, radius 1) on the smoothed image.
TransitionMask by_gradient(const GrayImage& img, double tau = 30.0, int radius = 1);

/// 1-bit PGM export (0 background, 255 transition).
void write_mask_pgm(const TransitionMask& mask, const std::string& path);

/// 256-bin histogram over the observed value range, with a suggested
/// threshold at the valley between the two dominant modes when the
/// distribution is bimodal.
struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::size_t> counts;
    std::optional<double> suggested_tau;

    double bin_center(std::size_t b) const;
};

Histogram threshold_histogram(std::span<const float> values);
void write_histogram_csv(const Histogram& h, std::ostream& out);

} // namespace msseg
