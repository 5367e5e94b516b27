#include "chirp2d/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "chirp2d/errors.hpp"

namespace chirp2d {

namespace {

constexpr char kGridMagic[8] = {'C', 'H', 'R', 'P', '2', 'D', 'G', 'R'};
constexpr std::size_t kGridHeader = 16;
constexpr std::size_t kMaxPgmDim = 1u << 16;

static_assert(std::endian::native == std::endian::little, "grid files assume a little-endian host");

std::string at(std::size_t pos) { return "at byte " + std::to_string(pos); }

struct PgmHeader {
    explicit PgmHeader(std::string_view bytes) : bytes_(bytes) {}

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            const char c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t number(const char* what)
    {
        skip_space_and_comments();
        const std::size_t start = pos_;
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            if (value > kMaxPgmDim) {
                throw FormatError(std::string("PGM: ") + what + " too large " + at(start));
            }
            ++pos_;
        }
        if (pos_ == start) {
            throw FormatError(std::string("PGM: expected ") + what + " " + at(start));
        }
        return value;
    }

    std::size_t pos_ = 0;
    std::string_view bytes_;
};

std::uint32_t read_u32(const char* p)
{
    std::uint32_t v = 0;
    std::memcpy(&v, p, 4);
    return v;
}

} // namespace

GridImage grid_to_image(const SignalGrid& grid, std::optional<ScaleMap> scale)
{
    const Eigen::MatrixXd& y = grid.matrix();
    GridImage out;
    out.image.height = static_cast<std::size_t>(grid.rows());
    out.image.width = static_cast<std::size_t>(grid.cols());
    out.image.pixels.assign(out.image.width * out.image.height, 128);

    if (scale) {
        if (!scale->valid()) {
            throw std::invalid_argument("grid_to_image: scale needs finite lo < hi");
        }
        out.scale = *scale;
    } else {
        if (grid.size() == 0) {
            out.degenerate = true;
            return out;
        }
        const double lo = y.minCoeff();
        const double hi = y.maxCoeff();
        if (!(hi > lo)) {
            out.scale = {lo, lo + 1.0};
            out.degenerate = true;
            return out;
        }
        out.scale = {lo, hi};
    }

    const double lo = out.scale.lo;
    const double span = out.scale.hi - out.scale.lo;
    for (Index m = 0; m < grid.rows(); ++m) {
        for (Index n = 0; n < grid.cols(); ++n) {
            const double v = std::round((y(m, n) - lo) / span * 255.0);
            out.image.pixels[static_cast<std::size_t>(m) * out.image.width + static_cast<std::size_t>(n)] =
                static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    }
    return out;
}

SignalGrid image_to_grid(const ImageBuffer& img, const ScaleMap& scale)
{
    if (!img.valid()) {
        throw std::invalid_argument("image_to_grid: pixel count does not match width*height");
    }
    if (!scale.valid()) {
        throw std::invalid_argument("image_to_grid: scale needs finite lo < hi");
    }
    Eigen::MatrixXd y(static_cast<Index>(img.height), static_cast<Index>(img.width));
    const double span = scale.hi - scale.lo;
    for (std::size_t m = 0; m < img.height; ++m) {
        for (std::size_t n = 0; n < img.width; ++n) {
            y(static_cast<Index>(m), static_cast<Index>(n)) = scale.lo + img.pixels[m * img.width + n] / 255.0 * span;
        }
    }
    return SignalGrid(std::move(y));
}

std::string pgm_write(const ImageBuffer& img)
{
    if (!img.valid()) {
        throw std::invalid_argument("pgm_write: pixel count does not match width*height");
    }
    std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.pixels.data()), img.pixels.size());
    return out;
}

ImageBuffer pgm_read(std::string_view bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P') {
        throw FormatError("PGM: bad magic " + at(0) + ", expected \"P5\"");
    }
    if (bytes[1] == '2') {
        throw FormatError("PGM: ASCII PGM (P2) is unsupported, only binary P5 " + at(0));
    }
    if (bytes[1] != '5') {
        throw FormatError("PGM: bad magic " + at(0) + ", expected \"P5\"");
    }
    PgmHeader h(bytes);
    h.pos_ = 2;
    if (h.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[h.pos_]))) {
        throw FormatError("PGM: expected whitespace after magic " + at(h.pos_));
    }
    ImageBuffer img;
    img.width = h.number("width");
    img.height = h.number("height");
    const std::size_t maxval_pos = h.pos_;
    const std::size_t maxval = h.number("maxval");
    if (maxval != 255) {
        throw FormatError("PGM: maxval must be 255, got " + std::to_string(maxval) + " " + at(maxval_pos));
    }
    if (h.pos_ >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[h.pos_]))) {
        throw FormatError("PGM: expected one whitespace byte after maxval " + at(h.pos_));
    }
    ++h.pos_;
    const std::size_t count = img.width * img.height;
    if (bytes.size() - h.pos_ < count) {
        throw FormatError("PGM: truncated payload " + at(bytes.size()) + ", expected " + std::to_string(count)
                          + " pixel bytes from " + at(h.pos_));
    }
    img.pixels.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + h.pos_),
                      reinterpret_cast<const std::uint8_t*>(bytes.data() + h.pos_ + count));
    return img;
}

std::string grid_write(const SignalGrid& grid)
{
    if (grid.rows() > std::numeric_limits<std::uint32_t>::max() || grid.cols() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("grid_write: dimensions exceed 32 bits");
    }
    const auto M = static_cast<std::uint32_t>(grid.rows());
    const auto N = static_cast<std::uint32_t>(grid.cols());
    std::string out(kGridHeader + sizeof(double) * grid.size(), '\0');
    std::memcpy(out.data(), kGridMagic, 8);
    std::memcpy(out.data() + 8, &M, 4);
    std::memcpy(out.data() + 12, &N, 4);
    char* p = out.data() + kGridHeader;
    for (Index m = 0; m < grid.rows(); ++m) {
        for (Index n = 0; n < grid.cols(); ++n) {
            const double v = grid.matrix()(m, n);
            std::memcpy(p, &v, sizeof v);
            p += sizeof v;
        }
    }
    return out;
}

SignalGrid grid_read(std::string_view bytes)
{
    if (bytes.size() < kGridHeader) {
        throw FormatError("grid file: truncated header " + at(bytes.size()));
    }
    if (std::memcmp(bytes.data(), kGridMagic, 8) != 0) {
        throw FormatError("grid file: bad magic " + at(0) + ", expected \"CHRP2DGR\"");
    }
    const std::uint64_t M = read_u32(bytes.data() + 8);
    const std::uint64_t N = read_u32(bytes.data() + 12);
    const std::uint64_t need = M * N * sizeof(double);
    if (bytes.size() - kGridHeader != need) {
        throw FormatError("grid file: payload has " + std::to_string(bytes.size() - kGridHeader) + " bytes, expected "
                          + std::to_string(need) + " for " + std::to_string(M) + "x" + std::to_string(N));
    }
    Eigen::MatrixXd y(static_cast<Index>(M), static_cast<Index>(N));
    const char* p = bytes.data() + kGridHeader;
    for (Index m = 0; m < y.rows(); ++m) {
        for (Index n = 0; n < y.cols(); ++n) {
            std::memcpy(&y(m, n), p, sizeof(double));
            p += sizeof(double);
        }
    }
    try {
        return SignalGrid(std::move(y));
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("grid file: ") + e.what());
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open '" + path + "' for writing");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error("write to '" + path + "' failed");
    }
}

} // namespace chirp2d
