#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "msseg/deconv.hpp"
#include "msseg/image.hpp"
#include "msseg/mixture.hpp"
#include "msseg/smoothing.hpp"
#include "msseg/transition.hpp"

namespace msseg {

enum class Smoother { nlm, adf, none };
enum class TransitionMethod { classification, difference, gradient };
enum class TransitionLabeling { spatial, intensity };

std::string to_string(TransitionMethod m);
TransitionMethod transition_method_from_string(const std::string& s);
std::string to_string(Smoother s);
Smoother smoother_from_string(const std::string& s);

/// Configuration of the four-step workflow: smooth, identify transitions,
/// segment single-class pixels, label transition pixels.
struct PipelineConfig {
    Smoother smoother = Smoother::nlm;
    NlmParams nlm;
    bool nlm_auto_h = true; // h = 0.8 * estimated noise sigma unless overridden
    AdfParams adf;

    TransitionMethod method = TransitionMethod::classification;
    double tau_difference = 20.0;
    double tau_gradient = 30.0;
    int gradient_radius = 1;

    int classes = 3;
    EmSettings em;

    double sigma_cal = 2.0;
    double filter_sigma = 1.6;
    int filter_radius = 4;
    double energy_threshold_frac = 1e-3;

    TransitionLabeling labeling = TransitionLabeling::spatial;
    std::uint64_t seed = 0;

    /// When set, the deconvolution methods reuse this calibration instead of
    /// rebuilding one from the image's residual-noise estimate.
    std::shared_ptr<const DeconvCalibration> fixed_calibration;

    void validate() const;
};

/// Fits an N-component Gaussian mixture (exact EM) to the non-transition
/// intensities and assigns those pixels; transition pixels stay unassigned.
/// Class indices are ordered by ascending fitted mean.
LabelMap segment_single_class(const GrayImage& img, const TransitionMask& mask, int n,
                              const EmSettings& em, GaussianMixture* fitted = nullptr);

/// Fills every unassigned pixel with the class whose region is nearest in
/// exact Euclidean distance; ties break toward the lower class index.
/// A class absent from the partial map is recorded in `warnings` and never wins.
LabelMap label_transitions(const LabelMap& partial, const TransitionMask& mask,
                           std::vector<std::string>* warnings = nullptr);

/// Intensity-proximity alternative: unassigned pixels take the class with the
/// nearest fitted mean.
LabelMap label_transitions_by_intensity(const LabelMap& partial, const TransitionMask& mask,
                                        const GrayImage& img, const GaussianMixture& m);

struct RunReport {
    std::string method;
    std::string smoother;
    std::uint64_t seed = 0;
    double smooth_seconds = 0.0;
    double transition_seconds = 0.0;
    double segment_seconds = 0.0;
    double label_seconds = 0.0;
    double total_seconds = 0.0;
    double noise_sigma_estimate = 0.0;
    std::size_t transition_pixels = 0;
    std::vector<std::size_t> class_areas;
    GaussianMixture single_class_mixture;
    std::string ngmm_json; // fitted non-Gaussian mixture (classification method only)
    std::vector<std::string> warnings;

    /// include_timings=false yields the deterministic form used by the
    /// reproducibility checks.
    std::string to_json(bool include_timings = true) const;
};

struct RunResult {
    LabelMap labels;
    RunReport report;
};

/// Executes the full workflow on one image. Deterministic for a fixed

/// config + seed. Sub-stage failures propagate with the stage name attached.
RunResult run(const GrayImage& img, const PipelineConfig& cfg);

} // namespace msseg
