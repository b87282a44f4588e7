#pragma once

#include <cstdint>
#include <utility>

#include "msseg/config.hpp"
#include "msseg/image.hpp"

namespace msseg {

inline constexpr std::uint8_t kClassGas = 0;
inline constexpr std::uint8_t kClassGrain = 1;
inline constexpr std::uint8_t kClassFluid = 2;

struct Disk {
    double cx = 0.0, cy = 0.0, r = 0.0;
};

/// Synthetic benchmark scene: two circular grains joined by a hyperbolic
/// fluid bridge, degraded by Gaussian blur and additive Gaussian noise.
/// The bridge half-width at signed axial offset t from the midpoint between
/// the grains is waist * sqrt(1 + (t/flare)^2); waist and flare are stored
/// as fractions of the grain radius.
struct PhantomSpec {
    int width = 160;
    int height = 320;

    double grain_radius_frac = 0.3;  // of min(width, height)
    double grain_gap_frac = 0.5;     // surface-to-surface gap, of grain radius
    double bridge_waist_frac = 0.25; // of grain radius
    double bridge_flare_frac = 0.625;

    double mean_gas = 50.0;
    double mean_grain = 130.0;
    double mean_fluid = 190.0;

    double blur_sigma = 0.0;
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;

    Disk grain(int index) const; // index 0 or 1; derived placement on the vertical axis

    void validate() const;

    static PhantomSpec from_config(const KeyValueConfig& cfg);
    KeyValueConfig to_config() const;
};

/// Returns {degraded image, crisp ground-truth labels}. The label map is
/// independent of blur/noise; the image is blur(crisp, sigma_b) + N(0, sigma_n^2)
/// with the spec's seed. Throws config_error naming any class left empty.
std::pair<GrayImage, LabelMap> generate_phantom(const PhantomSpec& spec);

/// Crisp class-mean image for an existing label map (used by oracles).
GrayImage render_class_means(const LabelMap& truth, const PhantomSpec& spec);

/// Separable Gaussian convolution, kernel truncated at +/- ceil(4*sigma) taps,
/// reflect-padded. sigma == 0 is the identity.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

/// Adds i.i.d. N(0, sigma^2) per pixel from a seeded generator. Values are not
/// clamped. sigma == 0 returns the input unchanged.
GrayImage add_noise(const GrayImage& img, double sigma, std::uint64_t seed);

} // namespace msseg
