#pragma once

#include "msseg/image.hpp"

namespace msseg {

/// Windowed non-local means parameters. h is the filtering strength in
/// intensity units; sigma_patch is the Gaussian weighting of the patch
/// distance. The paper gives no parameter values; these defaults are common
/// practice and all are CLI-exposed.
struct NlmParams {
    double h = 11.2; // 0.8 * a typical noise sigma of 14
    int patch_radius = 2;
    int search_radius = 10;
    double sigma_patch = 1.0;

    void validate() const;
};

/// Anisotropic diffusion (explicit scheme) with Perona-Malik diffusivity
/// g(s) = 1 / (1 + s/kappa^2) evaluated on the sigma-smoothed squared
/// gradient norm.
struct AdfParams {
    int iterations = 20;
    double dt = 0.2; // explicit-scheme stability requires dt <= 0.25
    double kappa = 15.0;
    double sigma = 1.0;

    void validate() const;
};

GrayImage nlm(const GrayImage& img, const NlmParams& p);
GrayImage adf(const GrayImage& img, const AdfParams& p);

/// Immerkaer's fast noise-variance estimate (median-free Laplacian form).
double estimate_noise_sigma(const GrayImage& img);

} // namespace msseg
