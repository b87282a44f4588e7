#include "msseg/phantom.hpp"

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "msseg/errors.hpp"
#include "msseg/rng.hpp"

namespace msseg {

Disk PhantomSpec::grain(int index) const {
    double r = grain_radius_frac * std::min(width, height);
    double half_sep = r + 0.5 * grain_gap_frac * r;
    double cx = 0.5 * (width - 1);
    double cy = 0.5 * (height - 1);
    return Disk{cx, index == 0 ? cy - half_sep : cy + half_sep, r};
}

void PhantomSpec::validate() const {
    if (width < 8 || height < 8) throw config_error("phantom must be at least 8x8");
    if (grain_radius_frac <= 0 || grain_gap_frac < 0)
        throw config_error("phantom grain geometry must be positive");
    if (bridge_waist_frac <= 0 || bridge_flare_frac <= 0)
        throw config_error("phantom bridge parameters must be positive");
    if (blur_sigma < 0 || noise_sigma < 0)
        throw config_error("blur/noise standard deviations must be non-negative");
    std::set<double> means{mean_gas, mean_grain, mean_fluid};
    if (means.size() != 3)
        throw config_error("phantom class means must be pairwise distinct");
}

namespace {

const std::set<std::string> kPhantomKeys = {
    "width", "height", "grain_radius_frac", "grain_gap_frac", "bridge_waist_frac",
    "bridge_flare_frac", "mean_gas", "mean_grain", "mean_fluid", "blur_sigma",
    "noise_sigma", "seed"};

} // namespace

PhantomSpec PhantomSpec::from_config(const KeyValueConfig& cfg) {
    cfg.validate_keys(kPhantomKeys);
    PhantomSpec s;
    s.width = cfg.get_int("width", s.width);
    s.height = cfg.get_int("height", s.height);
    s.grain_radius_frac = cfg.get_double("grain_radius_frac", s.grain_radius_frac);
    s.grain_gap_frac = cfg.get_double("grain_gap_frac", s.grain_gap_frac);
    s.bridge_waist_frac = cfg.get_double("bridge_waist_frac", s.bridge_waist_frac);
    s.bridge_flare_frac = cfg.get_double("bridge_flare_frac", s.bridge_flare_frac);
    s.mean_gas = cfg.get_double("mean_gas", s.mean_gas);
    s.mean_grain = cfg.get_double("mean_grain", s.mean_grain);
    s.mean_fluid = cfg.get_double("mean_fluid", s.mean_fluid);
    s.blur_sigma = cfg.get_double("blur_sigma", s.blur_sigma);
    s.noise_sigma = cfg.get_double("noise_sigma", s.noise_sigma);
    s.seed = cfg.get_u64("seed", s.seed);
    s.validate();
    return s;
}

KeyValueConfig PhantomSpec::to_config() const {
    KeyValueConfig cfg;
    auto put = [&](const std::string& k, double v) { cfg.set(k, std::to_string(v)); };
    cfg.set("width", std::to_string(width));
    cfg.set("height", std::to_string(height));
    put("grain_radius_frac", grain_radius_frac);
    put("grain_gap_frac", grain_gap_frac);
    put("bridge_waist_frac", bridge_waist_frac);
    put("bridge_flare_frac", bridge_flare_frac);
    put("mean_gas", mean_gas);
    put("mean_grain", mean_grain);
    put("mean_fluid", mean_fluid);
    put("blur_sigma", blur_sigma);
    put("noise_sigma", noise_sigma);
    cfg.set("seed", std::to_string(seed));
    return cfg;
}

namespace {

LabelMap rasterize_truth(const PhantomSpec& spec) {
    Disk g0 = spec.grain(0);
    Disk g1 = spec.grain(1);
    double waist = spec.bridge_waist_frac * g0.r;
    double flare = spec.bridge_flare_frac * g0.r;

    // bridge axis from grain 0 to grain 1, origin at the midpoint
    double mx = 0.5 * (g0.cx + g1.cx);
    double my = 0.5 * (g0.cy + g1.cy);
    double ax = g1.cx - g0.cx, ay = g1.cy - g0.cy;
    double alen = std::hypot(ax, ay);
    ax /= alen;
    ay /= alen;
    double half_span = 0.5 * alen;

    LabelMap truth(spec.width, spec.height, kClassGas);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double d0 = std::hypot(x - g0.cx, y - g0.cy);
            double d1 = std::hypot(x - g1.cx, y - g1.cy);
            if (d0 <= g0.r || d1 <= g1.r) {
                truth.at(x, y) = kClassGrain;
                continue;
            }
            double t = (x - mx) * ax + (y - my) * ay;  // along-axis offset
            double s = -(x - mx) * ay + (y - my) * ax; // perpendicular offset
            if (std::abs(t) <= half_span &&
                std::abs(s) <= waist * std::sqrt(1.0 + (t / flare) * (t / flare)))
                truth.at(x, y) = kClassFluid;
        }
    }
    return truth;
}

} // namespace

GrayImage render_class_means(const LabelMap& truth, const PhantomSpec& spec) {
    GrayImage img(truth.width, truth.height);
    const float means[3] = {float(spec.mean_gas), float(spec.mean_grain), float(spec.mean_fluid)};
    for (std::size_t i = 0; i < truth.size(); ++i) img.data[i] = means[truth.labels[i]];
    return img;
}

std::pair<GrayImage, LabelMap> generate_phantom(const PhantomSpec& spec) {
    spec.validate();
    LabelMap truth = rasterize_truth(spec);

    static const char* kClassNames[3] = {"gas", "grain", "fluid"};
    for (std::uint8_t c = 0; c < 3; ++c)
        if (truth.count(c) == 0)
            throw config_error(std::string("phantom geometry leaves class '") + kClassNames[c] +
                               "' empty");

    GrayImage img = render_class_means(truth, spec);
    img = gaussian_blur(img, spec.blur_sigma);
    img = add_noise(img, spec.noise_sigma, spec.seed);
    return {std::move(img), std::move(truth)};
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
    if (sigma < 0) throw config_error("blur sigma must be non-negative");
    if (sigma == 0.0) return img;

    int radius = int(std::ceil(4.0 * sigma));
    std::vector<double> kernel(std::size_t(2 * radius + 1));
    double norm = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        double w = std::exp(-0.5 * (double(k) * k) / (sigma * sigma));
        kernel[std::size_t(k + radius)] = w;
        norm += w;
    }
    for (double& w : kernel) w /= norm;

    const int w = img.width, h = img.height;
    GrayImage tmp(w, h), out(w, h);
    // horizontal pass
    for (int y = 0; y < h; ++y) {
        const float* row = &img.data[std::size_t(y) * w];
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[std::size_t(k + radius)] * row[reflect_index(x + k, w)];
            tmp.at(x, y) = float(acc);
        }
    }
    // vertical pass
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k)
                acc += kernel[std::size_t(k + radius)] * tmp.at(x, reflect_index(y + k, h));
            out.at(x, y) = float(acc);
        }
    }
    return out;
}

GrayImage add_noise(const GrayImage& img, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw config_error("noise sigma must be non-negative");
    if (sigma == 0.0) return img;
    GrayImage out = img;
    Rng rng(seed);
    for (float& v : out.data) v = float(v + sigma * rng.normal());
    return out;
}

} // namespace msseg
