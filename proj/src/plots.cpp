#include "nakano/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>

namespace nakano {

GrayImage heatmap(const ScalarField& f, int scale) {
    const GridSpec& g = f.grid;
    const int N = g.points_per_axis;
    scale = std::max(1, scale);
    // nodes of the x_1, y_1 plane: point = ix * stride(0) + iy * stride(1)
    std::vector<double> plane(static_cast<std::size_t>(N) * N);
    for (int ix = 0; ix < N; ++ix)
        for (int iy = 0; iy < N; ++iy) plane[iy * N + ix] = f[ix * g.stride(0) + iy * g.stride(1)];
    const auto [lo, hi] = std::minmax_element(plane.begin(), plane.end());
    const double span = *hi - *lo;

    GrayImage img{N * scale, N * scale, {}};
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    for (int row = 0; row < img.height; ++row)
        for (int col = 0; col < img.width; ++col) {
            const double v = plane[(row / scale) * N + col / scale];
            const double level = span > 0.0 ? 255.0 * (v - *lo) / span : 128.0;
            img.pixels[static_cast<std::size_t>(row) * img.width + col] =
                static_cast<std::uint8_t>(std::lround(std::clamp(level, 0.0, 255.0)));
        }
    return img;
}

namespace {

void put(RgbImage& img, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
    const std::size_t k = 3 * (static_cast<std::size_t>(y) * img.width + x);
    img.pixels[k] = r;
    img.pixels[k + 1] = g;
    img.pixels[k + 2] = b;
}

void line(RgbImage& img, int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        put(img, x0, y0, r, g, b);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

}  // namespace

RgbImage residual_chart(const std::vector<std::pair<double, double>>& points, int width, int height) {
    RgbImage img{width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3, 255)};
    const int left = 40, right = width - 20, top = 20, bottom = height - 30;
    line(img, left, bottom, right, bottom, 0, 0, 0);
    line(img, left, top, left, bottom, 0, 0, 0);
    if (points.empty()) return img;

    std::vector<double> logs;
    for (const auto& [t, r] : points) logs.push_back(std::log10(std::max(r, 1e-17)));
    double lo = *std::min_element(logs.begin(), logs.end());
    double hi = *std::max_element(logs.begin(), logs.end());
    if (hi - lo < 1.0) {
        lo -= 0.5;
        hi += 0.5;
    }
    // one tick per decade on the vertical axis
    for (int d = static_cast<int>(std::ceil(lo)); d <= static_cast<int>(std::floor(hi)); ++d) {
        const int y = bottom - static_cast<int>(std::lround((d - lo) / (hi - lo) * (bottom - top)));
        line(img, left - 4, y, left, y, 0, 0, 0);
    }
    auto px = [&](double t) { return left + static_cast<int>(std::lround((1.0 - t) * (right - left))); };
    auto py = [&](double l) { return bottom - static_cast<int>(std::lround((l - lo) / (hi - lo) * (bottom - top))); };
    for (std::size_t k = 0; k < points.size(); ++k) {
        const int x = px(points[k].first), y = py(logs[k]);
        if (k > 0) line(img, px(points[k - 1].first), py(logs[k - 1]), x, y, 30, 60, 200);
        for (int a = -2; a <= 2; ++a)
            for (int b = -2; b <= 2; ++b) put(img, x + a, y + b, 200, 30, 30);
    }
    return img;
}

void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError("write failed for " + path);
}

void write_ppm(const std::string& path, const RgbImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!out) throw IoError("write failed for " + path);
}

}  // namespace nakano
