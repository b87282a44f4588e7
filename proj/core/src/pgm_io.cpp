#include "msseg/pgm_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "msseg/errors.hpp"

namespace msseg {

namespace {

// Skips whitespace and '#' comments between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw io_error("truncated PNM header: " + path);
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        break;
    }
    int v = 0;
    if (!(in >> v)) throw io_error("malformed PNM header: " + path);
    return v;
}

std::vector<std::uint8_t> read_payload(std::istream& in, std::size_t bytes, const std::string& path) {
    std::vector<std::uint8_t> buf(bytes);
    in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(bytes));
    if (std::size_t(in.gcount()) != bytes) throw io_error("truncated PGM payload: " + path);
    return buf;
}

} // namespace

GrayImage read_pgm(const std::string& path, int* maxval_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open raster: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw io_error("not a binary PGM (P5) file: " + path);
    int w = next_header_int(in, path);
    int h = next_header_int(in, path);
    int maxval = next_header_int(in, path);
    if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
        throw io_error("invalid PGM header values: " + path);
    in.get(); // single whitespace byte after maxval

    GrayImage img(w, h);
    std::size_t n = img.size();
    if (maxval <= 255) {
        auto buf = read_payload(in, n, path);
        for (std::size_t i = 0; i < n; ++i) img.data[i] = float(buf[i]);
    } else {
        auto buf = read_payload(in, 2 * n, path);
        for (std::size_t i = 0; i < n; ++i)
            img.data[i] = float((unsigned(buf[2 * i]) << 8) | unsigned(buf[2 * i + 1]));
    }
    if (maxval_out) *maxval_out = maxval;
    return img;
}

void write_pgm8(const GrayImage& img, const std::string& path) {
    img.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<std::uint8_t> buf(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        float v = std::round(std::clamp(img.data[i], 0.0f, 255.0f));
        buf[i] = std::uint8_t(v);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw io_error("short write: " + path);
}

void write_pgm16(const GrayImage& img, const std::string& path) {
    img.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster: " + path);
    out << "P5\n" << img.width << " " << img.height << "\n65535\n";
    std::vector<std::uint8_t> buf(2 * img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        float scaled = std::round(std::clamp(img.data[i] * 257.0f, 0.0f, 65535.0f));
        auto v = std::uint16_t(scaled);
        buf[2 * i] = std::uint8_t(v >> 8);
        buf[2 * i + 1] = std::uint8_t(v & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw io_error("short write: " + path);
}

GrayImage normalize_to_nominal_range(const GrayImage& img, int maxval) {
    if (maxval <= 255) return img;
    GrayImage out(img.width, img.height);
    float scale = 255.0f / float(maxval);
    for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = img.data[i] * scale;
    return out;
}

LabelMap read_label_pgm(const std::string& path) {
    int maxval = 0;
    GrayImage img = read_pgm(path, &maxval);
    if (maxval > 255) throw io_error("label maps must be 8-bit PGM: " + path);
    LabelMap m(img.width, img.height);
    for (std::size_t i = 0; i < img.size(); ++i) m.labels[i] = std::uint8_t(img.data[i]);
    return m;
}

void write_label_pgm(const LabelMap& labels, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster: " + path);
    out << "P5\n" << labels.width << " " << labels.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(labels.labels.data()), std::streamsize(labels.size()));
    if (!out) throw io_error("short write: " + path);
}

void write_pfm(const GrayImage& img, const std::string& path) {
    img.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster: " + path);
    // Negative scale marks little-endian; rows are bottom-up per the format.
    out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
    for (int y = img.height - 1; y >= 0; --y)
        out.write(reinterpret_cast<const char*>(&img.data[std::size_t(y) * img.width]),
                  std::streamsize(sizeof(float) * std::size_t(img.width)));
    if (!out) throw io_error("short write: " + path);
}

void write_label_overlay_ppm(const LabelMap& labels, const std::string& path) {
    static constexpr std::array<std::array<std::uint8_t, 3>, 3> palette{{
        {0, 0, 0},       // gas
        {210, 180, 140}, // grain
        {255, 255, 255}, // fluid
    }};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write raster: " + path);
    out << "P6\n" << labels.width << " " << labels.height << "\n255\n";
    std::vector<std::uint8_t> buf(3 * labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::uint8_t l = labels.labels[i];
        std::array<std::uint8_t, 3> rgb{255, 0, 0}; // unassigned/unknown -> red
        if (l < palette.size()) {
            rgb = palette[l];
        } else if (l != LabelMap::kUnassigned) {
            // classes beyond the three-phase palette: gray ramp
            std::uint8_t g = std::uint8_t(std::min(255, 60 + 40 * int(l)));
            rgb = {g, g, g};
        }
        buf[3 * i] = rgb[0];
        buf[3 * i + 1] = rgb[1];
        buf[3 * i + 2] = rgb[2];
    }
    out.write(reinterpret_cast<const char*>(buf.data()), std::streamsize(buf.size()));
    if (!out) throw io_error("short write: " + path);
}

} // namespace msseg
