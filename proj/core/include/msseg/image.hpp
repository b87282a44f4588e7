#pragma once

#include <cstdint>
#include <vector>

namespace msseg {

/// Half-sample symmetric reflection of index i into [0, n).
/// (-1 -> 0, -2 -> 1, n -> n-1, ...). With a symmetric unit-mass kernel this
/// boundary conserves the image mean exactly, which several invariants rely on.
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

/// 2-D scalar intensity field, row-major, nominal range [0, 255].
/// Intensities stay floating point through the whole pipeline; quantization
/// happens only at raster export.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    GrayImage() = default;
    GrayImage(int w, int h, float fill = 0.0f)
        : width(w), height(h), data(std::size_t(w) * std::size_t(h), fill) {}

    std::size_t size() const { return data.size(); }

    float& at(int x, int y) { return data[std::size_t(y) * width + x]; }
    float at(int x, int y) const { return data[std::size_t(y) * width + x]; }

    float at_reflect(int x, int y) const {
        return data[std::size_t(reflect_index(y, height)) * width + reflect_index(x, width)];
    }

    bool same_shape(const GrayImage& o) const { return width == o.width && height == o.height; }

    /// Throws config_error if dimensions/data are inconsistent or values are non-finite.
    void validate() const;

    float min_value() const;
    float max_value() const;
    double mean_value() const;
};

/// Per-pixel class assignment. Class indices are ordered by ascending mean
/// intensity (gas < grain < fluid for the three-phase case).
struct LabelMap {
    static constexpr std::uint8_t kUnassigned = 255;

    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> labels;

    LabelMap() = default;
    LabelMap(int w, int h, std::uint8_t fill = kUnassigned)
        : width(w), height(h), labels(std::size_t(w) * std::size_t(h), fill) {}

    std::size_t size() const { return labels.size(); }

    std::uint8_t& at(int x, int y) { return labels[std::size_t(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return labels[std::size_t(y) * width + x]; }

    bool same_shape(const LabelMap& o) const { return width == o.width && height == o.height; }
    bool operator==(const LabelMap& o) const {
        return width == o.width && height == o.height && labels == o.labels;
    }

    std::size_t count(std::uint8_t label) const;
};

} // namespace msseg
