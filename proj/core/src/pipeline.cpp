#include "msseg/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "msseg/distance_transform.hpp"
#include "msseg/errors.hpp"
#include "msseg/rng.hpp"

namespace msseg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

[[noreturn]] void rethrow_with_stage(const std::string& stage) {
    try {
        throw;
    } catch (const config_error& e) {
        throw config_error("[" + stage + "] " + e.what());
    } catch (const io_error& e) {
        throw io_error("[" + stage + "] " + e.what());
    } catch (const numeric_error& e) {
        throw numeric_error("[" + stage + "] " + e.what());
    } catch (const std::exception& e) {
        throw numeric_error("[" + stage + "] " + e.what());
    }
}

} // namespace

std::string to_string(TransitionMethod m) {
    switch (m) {
        case TransitionMethod::classification: return "classification";
        case TransitionMethod::difference: return "difference";
        case TransitionMethod::gradient: return "gradient";
    }
    return "?";
}

TransitionMethod transition_method_from_string(const std::string& s) {
    if (s == "classification") return TransitionMethod::classification;
    if (s == "difference") return TransitionMethod::difference;
    if (s == "gradient") return TransitionMethod::gradient;
    throw config_error("unknown transition method: " + s);
}

std::string to_string(Smoother s) {
    switch (s) {
        case Smoother::nlm: return "nlm";
        case Smoother::adf: return "adf";
        case Smoother::none: return "none";
    }
    return "?";
}

Smoother smoother_from_string(const std::string& s) {
    if (s == "nlm") return Smoother::nlm;
    if (s == "adf") return Smoother::adf;
    if (s == "none") return Smoother::none;
    throw config_error("unknown smoother: " + s);
}

void PipelineConfig::validate() const {
    if (classes < 2) throw config_error("pipeline: class count must be >= 2");
    if (!nlm_auto_h) nlm.validate();
    adf.validate();
    em.validate();
    if (sigma_cal <= 0) throw config_error("pipeline: sigma_cal must be > 0");
    if (filter_sigma <= 0 || filter_radius < 1)
        throw config_error("pipeline: bad steerable filter parameters");
    if (tau_difference <= 0 || tau_gradient <= 0)
        throw config_error("pipeline: thresholds must be > 0");
    if (gradient_radius < 1) throw config_error("pipeline: gradient radius must be >= 1");
    if (energy_threshold_frac <= 0)
        throw config_error("pipeline: energy threshold must be > 0");
}

LabelMap segment_single_class(const GrayImage& img, const TransitionMask& mask, int n,
                              const EmSettings& em, GaussianMixture* fitted) {
    if (img.width != mask.width || img.height != mask.height)
        throw config_error("segment_single_class: mask/image shape mismatch");

    std::vector<float> samples;
    samples.reserve(img.size());
    for (std::size_t i = 0; i < img.size(); ++i)
        if (!mask.flags[i]) samples.push_back(img.data[i]);
    if (samples.size() < std::size_t(4 * n))
        throw numeric_error("segment_single_class: too few non-transition pixels");

    GmmFitResult fit = fit_gmm(samples, n, em);
    if (fitted) *fitted = fit.mixture;

    LabelMap out(img.width, img.height, LabelMap::kUnassigned);
    for (std::size_t i = 0; i < img.size(); ++i)
        if (!mask.flags[i])
            out.labels[i] = std::uint8_t(classify_gaussian(fit.mixture, img.data[i]));
    return out;
}

LabelMap label_transitions(const LabelMap& partial, const TransitionMask& mask,
                           std::vector<std::string>* warnings) {
    if (partial.width != mask.width || partial.height != mask.height)
        throw config_error("label_transitions: mask/labels shape mismatch");

    int n_classes = 0;
    for (std::uint8_t l : partial.labels)
        if (l != LabelMap::kUnassigned) n_classes = std::max(n_classes, int(l) + 1);
    if (n_classes == 0) throw numeric_error("label_transitions: no classified pixels");

    LabelMap out = partial;
    std::vector<std::vector<double>> dist(static_cast<std::size_t>(n_classes));
    std::vector<std::uint8_t> indicator(partial.size());
    for (int c = 0; c < n_classes; ++c) {
        bool any = false;
        for (std::size_t i = 0; i < partial.size(); ++i) {
            indicator[i] = partial.labels[i] == c ? 1 : 0;
            any = any || indicator[i];
        }
        if (!any && warnings)
            warnings->push_back("class " + std::to_string(c) +
                                " absent from single-class map; unavailable for transition labeling");
        dist[std::size_t(c)] = squared_distance_transform(indicator, partial.width, partial.height);
    }

    for (std::size_t i = 0; i < partial.size(); ++i) {
        if (partial.labels[i] != LabelMap::kUnassigned) continue;
        int best = 0;
        double bestd = dist[0][i];
        for (int c = 1; c < n_classes; ++c)
            if (dist[std::size_t(c)][i] < bestd) { // strict: ties keep the lower index
                bestd = dist[std::size_t(c)][i];
                best = c;
            }
        out.labels[i] = std::uint8_t(best);
    }
    return out;
}

LabelMap label_transitions_by_intensity(const LabelMap& partial, const TransitionMask& mask,
                                        const GrayImage& img, const GaussianMixture& m) {
    if (partial.width != mask.width || partial.height != mask.height ||
        partial.width != img.width || partial.height != img.height)
        throw config_error("label_transitions_by_intensity: shape mismatch");
    LabelMap out = partial;
    for (std::size_t i = 0; i < partial.size(); ++i) {
        if (partial.labels[i] != LabelMap::kUnassigned) continue;
        int best = 0;
        double bestd = std::abs(img.data[i] - m.mean[0]);
        for (int c = 1; c < m.size(); ++c) {
            double d = std::abs(img.data[i] - m.mean[std::size_t(c)]);
            if (d < bestd) {
                bestd = d;
                best = c;
            }
        }
        out.labels[i] = std::uint8_t(best);
    }
    return out;
}

RunResult run(const GrayImage& img, const PipelineConfig& cfg) {
    cfg.validate();
    img.validate();

    RunResult result;
    RunReport& rep = result.report;
    rep.method = to_string(cfg.method);
    rep.smoother = to_string(cfg.smoother);
    rep.seed = cfg.seed;
    auto t_total = std::chrono::steady_clock::now();

    // step 1: smooth
    GrayImage smoothed;
    rep.noise_sigma_estimate = estimate_noise_sigma(img);
    try {
        auto t0 = std::chrono::steady_clock::now();
        switch (cfg.smoother) {
            case Smoother::nlm: {
                NlmParams p = cfg.nlm;
                if (cfg.nlm_auto_h)
                    p.h = std::max(0.8 * rep.noise_sigma_estimate, 1e-3);
                smoothed = nlm(img, p);
                break;
            }
            case Smoother::adf:
                smoothed = adf(img, cfg.adf);
                break;
            case Smoother::none:
                smoothed = img;
                break;
        }
        rep.smooth_seconds = seconds_since(t0);
    } catch (...) {
        rethrow_with_stage("smooth");
    }

    // step 2: identify transition pixels
    TransitionMask mask;
    try {
        auto t0 = std::chrono::steady_clock::now();
        if (cfg.method == TransitionMethod::gradient) {
            mask = by_gradient(smoothed, cfg.tau_gradient, cfg.gradient_radius);
        } else {
            QuadraturePair q = QuadraturePair::make(cfg.filter_sigma, cfg.filter_radius);
            DeconvCalibration cal;
            if (cfg.fixed_calibration) {
                cal = *cfg.fixed_calibration;
            } else {
                double residual_noise = estimate_noise_sigma(smoothed);
                cal = calibrate(cfg.sigma_cal, q, residual_noise, Rng::derive(cfg.seed, 0xca1));
            }
            DeconvField field = deconvolve(smoothed, q, cal, cfg.energy_threshold_frac);
            if (cfg.method == TransitionMethod::difference) {
                mask = by_difference(field, cfg.tau_difference);
            } else {
                EmSettings em = cfg.em;
                em.seed = Rng::derive(cfg.seed, 0x96bb);
                NgmmFitResult fit = fit_ngmm(smoothed.data, cfg.classes, em);
                rep.ngmm_json = mixture_to_json(fit);
                for (const std::string& w : fit.warnings) rep.warnings.push_back("ngmm: " + w);
                mask = by_classification(field, fit.mixture);
            }
        }
        rep.transition_seconds = seconds_since(t0);
        rep.transition_pixels = mask.count();
    } catch (...) {
        rethrow_with_stage("transitions");
    }

    // step 3: segment single-class pixels
    LabelMap partial;
    try {
        auto t0 = std::chrono::steady_clock::now();
        EmSettings em = cfg.em;
        em.seed = Rng::derive(cfg.seed, 0x5e6);
        partial = segment_single_class(smoothed, mask, cfg.classes, em,
                                       &rep.single_class_mixture);
        rep.segment_seconds = seconds_since(t0);
    } catch (...) {
        rethrow_with_stage("segment");
    }

    // step 4: label transition pixels
    try {
        auto t0 = std::chrono::steady_clock::now();
        if (cfg.labeling == TransitionLabeling::spatial)
            result.labels = label_transitions(partial, mask, &rep.warnings);
        else
            result.labels = label_transitions_by_intensity(partial, mask, smoothed,
                                                           rep.single_class_mixture);
        rep.label_seconds = seconds_since(t0);
    } catch (...) {
        rethrow_with_stage("label");
    }

    rep.class_areas.assign(std::size_t(cfg.classes), 0);
    for (std::uint8_t l : result.labels.labels)
        if (l < rep.class_areas.size()) ++rep.class_areas[l];
    rep.total_seconds = seconds_since(t_total);
    return result;
}

std::string RunReport::to_json(bool include_timings) const {
    nlohmann::json j;
    j["method"] = method;
    j["smoother"] = smoother;
    j["seed"] = seed;
    j["noise_sigma_estimate"] = noise_sigma_estimate;
    j["transition_pixels"] = transition_pixels;
    j["class_areas"] = class_areas;
    if (single_class_mixture.size() > 0) {
        j["single_class_mixture"] = {{"means", single_class_mixture.mean},
                                     {"variances", single_class_mixture.var},
                                     {"weights", single_class_mixture.weight}};
    }
    if (!ngmm_json.empty()) j["ngmm"] = nlohmann::json::parse(ngmm_json);
    j["warnings"] = warnings;
    if (include_timings) {
        j["timings"] = {{"smooth_seconds", smooth_seconds},
                        {"transition_seconds", transition_seconds},
                        {"segment_seconds", segment_seconds},
                        {"label_seconds", label_seconds},
                        {"total_seconds", total_seconds}};
    }
    return j.dump(2);
}

} // namespace msseg
