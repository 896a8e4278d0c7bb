#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "nakano/grid.hpp"

namespace nakano {

/// 8-bit grayscale raster, row-major from the top row.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // r, g, b per pixel
};

/// Heatmap of the (x_1, y_1) plane (x_2 = y_2 = 0 for n = 2): pixel row j is
/// y index j, column i is x index i, each node drawn as a scale x scale block.
/// Values map linearly onto 0..255; a constant field is drawn as 128.
GrayImage heatmap(const ScalarField& f, int scale = 1);

/// log10 residual against t (t = 1 at the left edge, 0 at the right).
/// A single point is drawn as a marker.
RgbImage residual_chart(const std::vector<std::pair<double, double>>& points, int width = 400, int height = 300);

/// Binary P5 / P6 writers. Throw IoError.
void write_pgm(const std::string& path, const GrayImage& img);
void write_ppm(const std::string& path, const RgbImage& img);

}  // namespace nakano
