#include "msseg/transition.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "msseg/errors.hpp"
#include "msseg/filters.hpp"

namespace msseg {

std::size_t TransitionMask::count() const {
    return std::size_t(std::count(flags.begin(), flags.end(), std::uint8_t(1)));
}

TransitionMask by_classification(const DeconvField& field, const NonGaussianMixture& m) {
    m.validate();
    TransitionMask mask(field.width, field.height);
    for (std::size_t i = 0; i < mask.flags.size(); ++i) {
        if (!field.reliable[i]) continue;
        int ca = classify_gaussian(m, field.a.data[i]);
        int cb = classify_gaussian(m, field.b.data[i]);
        mask.flags[i] = ca != cb ? 1 : 0;
    }
    return mask;
}

TransitionMask by_difference(const DeconvField& field, double tau) {
    if (tau <= 0) throw config_error("by_difference: tau must be > 0");
    TransitionMask mask(field.width, field.height);
    for (std::size_t i = 0; i < mask.flags.size(); ++i) {
        if (!field.reliable[i]) continue;
        mask.flags[i] = std::abs(field.a.data[i] - field.b.data[i]) > tau ? 1 : 0;
    }
    return mask;
}

TransitionMask by_gradient(const GrayImage& img, double tau, int radius) {
    if (tau <= 0) throw config_error("by_gradient: tau must be > 0");
    GrayImage grad = morph_gradient(img, radius);
    TransitionMask mask(img.width, img.height);
    for (std::size_t i = 0; i < mask.flags.size(); ++i)
        mask.flags[i] = grad.data[i] > tau ? 1 : 0;
    return mask;
}

void write_mask_pgm(const TransitionMask& mask, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster: " + path);
    out << "P5\n" << mask.width << " " << mask.height << "\n255\n";
    std::vector<std::uint8_t> buf(mask.flags.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = mask.flags[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw io_error("short write: " + path);
}

double Histogram::bin_center(std::size_t b) const {
    if (counts.empty()) return lo;
    double w = (hi - lo) / double(counts.size());
    return lo + (double(b) + 0.5) * w;
}

Histogram threshold_histogram(std::span<const float> values) {
    Histogram h;
    h.counts.assign(256, 0);
    if (values.empty()) return h;
    h.lo = *std::min_element(values.begin(), values.end());
    h.hi = *std::max_element(values.begin(), values.end());
    double width = h.hi - h.lo;
    for (float v : values) {
        std::size_t b = 0;
        if (width > 0)
            b = std::min<std::size_t>(255, std::size_t((v - h.lo) / width * 256.0));
        ++h.counts[b];
    }

    // Suggested threshold: valley between the two most populated local maxima
    // of the lightly smoothed histogram (mirrors the manual procedure of
    // picking tau from the plotted histogram).
    std::vector<double> smooth(256, 0.0);
    for (int i = 0; i < 256; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int k = -2; k <= 2; ++k) {
            int j = i + k;
            if (j < 0 || j > 255) continue;
            acc += double(h.counts[std::size_t(j)]);
            ++cnt;
        }
        smooth[std::size_t(i)] = acc / cnt;
    }
    std::vector<std::pair<double, int>> peaks;
    for (int i = 1; i < 255; ++i)
        if (smooth[std::size_t(i)] >= smooth[std::size_t(i - 1)] &&
            smooth[std::size_t(i)] > smooth[std::size_t(i + 1)] && smooth[std::size_t(i)] > 0)
            peaks.push_back({smooth[std::size_t(i)], i});
    std::sort(peaks.rbegin(), peaks.rend());
    if (peaks.size() >= 2) {
        int p0 = std::min(peaks[0].second, peaks[1].second);
        int p1 = std::max(peaks[0].second, peaks[1].second);
        if (p1 - p0 >= 8) { // distinct modes, not one ragged peak
            int valley = p0;
            for (int i = p0; i <= p1; ++i)
                if (smooth[std::size_t(i)] < smooth[std::size_t(valley)]) valley = i;
            h.suggested_tau = h.bin_center(std::size_t(valley));
        }
    }
    return h;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
    out << "bin_center,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << h.bin_center(b) << "," << h.counts[b] << "\n";
    if (h.suggested_tau) out << "# suggested_tau = " << *h.suggested_tau << "\n";
}

} // namespace msseg
