#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "msseg/image.hpp"

namespace msseg {

/// Binary PGM (P5) reader. 8-bit samples come back as [0,255] floats; 16-bit
/// samples (maxval > 255, big-endian per the spec of the format) are returned
/// unscaled in [0, maxval]. `maxval_out` receives the file's maxval.
GrayImage read_pgm(const std::string& path, int* maxval_out = nullptr);

/// 8-bit P5 writer; values are clamped to [0,255] and rounded.
void write_pgm8(const GrayImage& img, const std::string& path);

/// 16-bit P5 writer with maxval 65535; intensities in [0,255] are scaled by
/// 257 so the nominal range is preserved on read-back (value/257).
void write_pgm16(const GrayImage& img, const std::string& path);

/// Rescale an image read from a >8-bit raster into the nominal [0,255] range.
GrayImage normalize_to_nominal_range(const GrayImage& img, int maxval);

/// LabelMap round trip as 8-bit PGM holding raw class indices.
LabelMap read_label_pgm(const std::string& path);
void write_label_pgm(const LabelMap& labels, const std::string& path);

/// Portable FloatMap (PF/Pf) writer for inspection rasters (a, b, |a-b|).
void write_pfm(const GrayImage& img, const std::string& path);

/// Binary PPM (P6) color overlay for a label map. Default palette:
/// gas=black, grain=tan, fluid=white, unassigned=red.
void write_label_overlay_ppm(const LabelMap& labels, const std::string& path);

} // namespace msseg
