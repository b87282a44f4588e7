#include "msseg/smoothing.hpp"

#include <cmath>
#include <vector>

#include "msseg/errors.hpp"
#include "msseg/phantom.hpp"

namespace msseg {

void NlmParams::validate() const {
    if (h <= 0) throw config_error("nlm: h must be > 0");
    if (patch_radius < 1) throw config_error("nlm: patch radius must be >= 1");
    if (search_radius < patch_radius)
        throw config_error("nlm: search radius must be >= patch radius");
    if (sigma_patch <= 0) throw config_error("nlm: sigma_patch must be > 0");
}

void AdfParams::validate() const {
    if (iterations < 1) throw config_error("adf: iterations must be >= 1");
    if (dt <= 0 || dt > 0.25) throw config_error("adf: dt must be in (0, 0.25]");
    if (kappa <= 0) throw config_error("adf: kappa must be > 0");
    if (sigma < 0) throw config_error("adf: sigma must be >= 0");
}

namespace {

// Reflect-padded copy with `pad` extra pixels on every side.
std::vector<float> make_padded(const GrayImage& img, int pad, int& stride) {
    const int w = img.width, h = img.height;
    stride = w + 2 * pad;
    std::vector<float> p(std::size_t(stride) * std::size_t(h + 2 * pad));
    for (int y = -pad; y < h + pad; ++y) {
        const float* src = &img.data[std::size_t(reflect_index(y, h)) * w];
        float* dst = &p[std::size_t(y + pad) * stride + pad];
        for (int x = -pad; x < w + pad; ++x) dst[x] = src[reflect_index(x, w)];
    }
    return p;
}

} // namespace

GrayImage nlm(const GrayImage& img, const NlmParams& p) {
    p.validate();
    const int w = img.width, h = img.height;
    if (w < 2 * p.patch_radius + 1 || h < 2 * p.patch_radius + 1)
        throw config_error("nlm: image smaller than one patch");

    const int pr = p.patch_radius, sr = p.search_radius;
    const int pad = sr + pr;
    int stride = 0;
    std::vector<float> padded = make_padded(img, pad, stride);
    auto P = [&](int x, int y) -> float {
        return padded[std::size_t(y + pad) * stride + (x + pad)];
    };

    // 1-D patch weights; the 2-D product is normalized to sum 1 so the patch
    // distance is a weighted mean of squared differences.
    std::vector<double> g1(std::size_t(2 * pr + 1));
    double gn = 0.0;
    for (int k = -pr; k <= pr; ++k) {
        g1[std::size_t(k + pr)] = std::exp(-0.5 * k * k / (p.sigma_patch * p.sigma_patch));
        gn += g1[std::size_t(k + pr)];
    }
    for (double& v : g1) v /= gn;

    const double inv_h2 = 1.0 / (p.h * p.h);

    std::vector<double> acc(img.size(), 0.0), wsum(img.size(), 0.0);

    // Per search offset: squared-difference plane, separable patch smoothing,
    // then accumulate exp(-d2/h^2) * shifted value. Much cheaper than the
    // naive per-pixel patch loop.
    const int dw = w + 2 * pr, dh = h + 2 * pr;
    std::vector<float> diff2(std::size_t(dw) * dh), vert(std::size_t(dw) * h);
    for (int oy = -sr; oy <= sr; ++oy) {
        for (int ox = -sr; ox <= sr; ++ox) {
            for (int y = -pr; y < h + pr; ++y) {
                float* drow = &diff2[std::size_t(y + pr) * dw];
                for (int x = -pr; x < w + pr; ++x) {
                    float d = P(x, y) - P(x + ox, y + oy);
                    drow[x + pr] = d * d;
                }
            }
            for (int y = 0; y < h; ++y) {
                float* vrow = &vert[std::size_t(y) * dw];
                for (int x = 0; x < dw; ++x) {
                    double s = 0.0;
                    for (int k = -pr; k <= pr; ++k)
                        s += g1[std::size_t(k + pr)] * diff2[std::size_t(y + k + pr) * dw + x];
                    vrow[x] = float(s);
                }
            }
            for (int y = 0; y < h; ++y) {
                const float* vrow = &vert[std::size_t(y) * dw];
                double* arow = &acc[std::size_t(y) * w];
                double* wrow = &wsum[std::size_t(y) * w];
                for (int x = 0; x < w; ++x) {
                    double d2 = 0.0;
                    for (int k = -pr; k <= pr; ++k)
                        d2 += g1[std::size_t(k + pr)] * vrow[x + k + pr];
                    double wgt = std::exp(-d2 * inv_h2);
                    arow[x] += wgt * P(x + ox, y + oy);
                    wrow[x] += wgt;
                }
            }
        }
    }

    GrayImage out(w, h);
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = float(acc[i] / wsum[i]);
    return out;
}

GrayImage adf(const GrayImage& img, const AdfParams& p) {
    p.validate();
    const int w = img.width, h = img.height;
    GrayImage u = img;
    GrayImage diffusivity(w, h);

    for (int iter = 0; iter < p.iterations; ++iter) {
        GrayImage v = p.sigma > 0 ? gaussian_blur(u, p.sigma) : u;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double gx = 0.5 * (v.at_reflect(x + 1, y) - v.at_reflect(x - 1, y));
                double gy = 0.5 * (v.at_reflect(x, y + 1) - v.at_reflect(x, y - 1));
                double s = gx * gx + gy * gy;
                diffusivity.at(x, y) = float(1.0 / (1.0 + s / (p.kappa * p.kappa)));
            }
        }
        // Divergence form with face-averaged diffusivity; border faces carry
        // zero flux, so the total intensity is conserved to round-off.
        GrayImage next = u;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double c = u.at(x, y);
                double gc = diffusivity.at(x, y);
                double flux = 0.0;
                if (x + 1 < w) flux += 0.5 * (gc + diffusivity.at(x + 1, y)) * (u.at(x + 1, y) - c);
                if (x > 0) flux += 0.5 * (gc + diffusivity.at(x - 1, y)) * (u.at(x - 1, y) - c);
                if (y + 1 < h) flux += 0.5 * (gc + diffusivity.at(x, y + 1)) * (u.at(x, y + 1) - c);
                if (y > 0) flux += 0.5 * (gc + diffusivity.at(x, y - 1)) * (u.at(x, y - 1) - c);
                next.at(x, y) = float(c + p.dt * flux);
            }
        }
        u = std::move(next);
    }
    return u;
}

double estimate_noise_sigma(const GrayImage& img) {
    const int w = img.width, h = img.height;
    if (w < 3 || h < 3) return 0.0;
    double acc = 0.0;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            double l = img.at(x - 1, y - 1) - 2.0 * img.at(x, y - 1) + img.at(x + 1, y - 1) -
                       2.0 * img.at(x - 1, y) + 4.0 * img.at(x, y) - 2.0 * img.at(x + 1, y) +
                       img.at(x - 1, y + 1) - 2.0 * img.at(x, y + 1) + img.at(x + 1, y + 1);
            acc += std::abs(l);
        }
    }
    return std::sqrt(0.5 * 3.14159265358979323846) * acc /
           (6.0 * double(w - 2) * double(h - 2));
}

} // namespace msseg
