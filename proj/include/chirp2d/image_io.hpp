#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chirp2d/signal_model.hpp"

namespace chirp2d {

/// 8-bit grayscale image, row-major. Row m of a grid becomes image row m,
/// so height = M and width = N.
struct ImageBuffer {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels;

    [[nodiscard]] bool valid() const noexcept { return width * height == pixels.size(); }
    friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;
};

/// lo maps to 0, hi to 255.
struct ScaleMap {
    double lo = 0.0;
    double hi = 1.0;

    [[nodiscard]] bool valid() const noexcept { return lo < hi && std::isfinite(lo) && std::isfinite(hi); }
    friend bool operator==(const ScaleMap&, const ScaleMap&) = default;
};

struct GridImage {
    ImageBuffer image;
    ScaleMap scale;          ///< the map actually used
    bool degenerate = false; ///< auto scale on a constant grid: image is uniform 128
};

/// Affine map with clamping. Without a scale the grid's (min, max) is used.
[[nodiscard]] GridImage grid_to_image(const SignalGrid& grid, std::optional<ScaleMap> scale = std::nullopt);

[[nodiscard]] SignalGrid image_to_grid(const ImageBuffer& img, const ScaleMap& scale);

/// Binary PGM (P5, maxval 255).
[[nodiscard]] std::string pgm_write(const ImageBuffer& img);
[[nodiscard]] ImageBuffer pgm_read(std::string_view bytes);

/// Raw grid file: "CHRP2DGR", u32 M, u32 N (little endian), then M*N
/// little-endian doubles in row-major order.
[[nodiscard]] std::string grid_write(const SignalGrid& grid);
[[nodiscard]] SignalGrid grid_read(std::string_view bytes);

/// Whole-file helpers; failures name the path.
[[nodiscard]] std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

} // namespace chirp2d
