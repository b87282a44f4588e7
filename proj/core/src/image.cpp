#include "msseg/image.hpp"

#include <algorithm>
#include <cmath>

#include "msseg/errors.hpp"

namespace msseg {

void GrayImage::validate() const {
    if (width < 1 || height < 1)
        throw config_error("image dimensions must be at least 1x1");
    if (data.size() != std::size_t(width) * std::size_t(height))
        throw config_error("image data length does not match width*height");
    for (float v : data)
        if (!std::isfinite(v)) throw config_error("image contains non-finite values");
}

float GrayImage::min_value() const {
    return *std::min_element(data.begin(), data.end());
}

float GrayImage::max_value() const {
    return *std::max_element(data.begin(), data.end());
}

double GrayImage::mean_value() const {
    double s = 0.0;
    for (float v : data) s += v;
    return s / double(data.size());
}

std::size_t LabelMap::count(std::uint8_t label) const {
    return std::size_t(std::count(labels.begin(), labels.end(), label));
}

} // namespace msseg
