#include "qrseal/imageio.hpp"

#include <zlib.h>

#include <algorithm>
#include <stdexcept>
#include <string>

#include "qrseal/errors.hpp"

namespace qrseal::imageio {

namespace {

void check_options(const QrMatrix& matrix, const RenderOptions& opts) {
    if (matrix.size <= 0 || matrix.dark.size() != static_cast<std::size_t>(matrix.size) *
                                                      static_cast<std::size_t>(matrix.size))
        throw std::invalid_argument("render: malformed matrix");
    if (opts.module_scale < 1)
        throw std::invalid_argument("render: module_scale must be >= 1");
    if (opts.quiet_zone < 0)
        throw std::invalid_argument("render: quiet_zone must be >= 0");
}

// pixel row/column -> is the covering module dark?
bool dark_pixel(const QrMatrix& matrix, const RenderOptions& opts, int y, int x) {
    const int r = y / opts.module_scale - opts.quiet_zone;
    const int c = x / opts.module_scale - opts.quiet_zone;
    if (r < 0 || c < 0 || r >= matrix.size || c >= matrix.size)
        return false;
    return matrix.module(r, c);
}

void push_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void push_chunk(std::vector<std::uint8_t>& out, const char* type,
                const std::vector<std::uint8_t>& data) {
    push_u32be(out, static_cast<std::uint32_t>(data.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, out.data() + type_at, static_cast<uInt>(4 + data.size()));
    push_u32be(out, static_cast<std::uint32_t>(crc));
}

// Reads whitespace/comment-separated PBM tokens.
class PbmScanner {
public:
    explicit PbmScanner(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    void skip_separators() {
        while (pos_ < bytes_.size()) {
            const char c = static_cast<char>(bytes_[pos_]);
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n')
                    ++pos_;
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                ++pos_;
            } else {
                return;
            }
        }
    }

    std::string token() {
        skip_separators();
        std::string out;
        while (pos_ < bytes_.size()) {
            const char c = static_cast<char>(bytes_[pos_]);
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v' || c == '#')
                break;
            out += c;
            ++pos_;
        }
        if (out.empty())
            throw ImageParseError("unexpected end of bitmap header");
        return out;
    }

    int digit() {
        skip_separators();
        if (pos_ >= bytes_.size())
            throw ImageParseError("bitmap pixel data is truncated");
        const char c = static_cast<char>(bytes_[pos_++]);
        if (c != '0' && c != '1')
            throw ImageParseError("bitmap contains a pixel that is not 0 or 1");
        return c - '0';
    }

    bool at_end() {
        skip_separators();
        return pos_ >= bytes_.size();
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

int parse_dimension(const std::string& token) {
    if (token.empty() || token.size() > 5)
        throw ImageParseError("bitmap dimension out of range");
    int value = 0;
    for (char c : token) {
        if (c < '0' || c > '9')
            throw ImageParseError("bitmap dimension is not a number");
        value = value * 10 + (c - '0');
    }
    if (value <= 0)
        throw ImageParseError("bitmap dimension must be positive");
    return value;
}

}  // namespace

std::vector<std::uint8_t> render_pbm(const QrMatrix& matrix, const RenderOptions& opts) {
    check_options(matrix, opts);
    const int pixels = (matrix.size + 2 * opts.quiet_zone) * opts.module_scale;

    std::string out = "P1\n" + std::to_string(pixels) + " " + std::to_string(pixels) + "\n";
    for (int y = 0; y < pixels; ++y) {
        int line_len = 0;
        for (int x = 0; x < pixels; ++x) {
            out += dark_pixel(matrix, opts, y, x) ? '1' : '0';
            if (++line_len == 70 && x + 1 < pixels) {  // plain-PBM 70-column limit
                out += '\n';
                line_len = 0;
            }
        }
        out += '\n';
    }
    return {out.begin(), out.end()};
}

std::vector<std::uint8_t> render_png(const QrMatrix& matrix, const RenderOptions& opts) {
    check_options(matrix, opts);
    const int pixels = (matrix.size + 2 * opts.quiet_zone) * opts.module_scale;
    const int row_bytes = (pixels + 7) / 8;

    // filter byte 0 + packed bits per scanline; dark = 0 (black), light = 1
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(pixels) * static_cast<std::size_t>(row_bytes + 1));
    for (int y = 0; y < pixels; ++y) {
        raw.push_back(0);
        std::uint8_t acc = 0;
        for (int x = 0; x < pixels; ++x) {
            if (!dark_pixel(matrix, opts, y, x))
                acc |= static_cast<std::uint8_t>(0x80 >> (x % 8));
            if (x % 8 == 7 || x == pixels - 1) {
                raw.push_back(acc);
                acc = 0;
            }
        }
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw std::runtime_error("render_png: compression failed");
    compressed.resize(compressed_size);

    static const std::uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
    std::vector<std::uint8_t> out(signature, signature + 8);

    std::vector<std::uint8_t> ihdr;
    push_u32be(ihdr, static_cast<std::uint32_t>(pixels));
    push_u32be(ihdr, static_cast<std::uint32_t>(pixels));
    ihdr.push_back(1);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filtering
    ihdr.push_back(0);  // no interlace
    push_chunk(out, "IHDR", ihdr);
    push_chunk(out, "IDAT", compressed);
    push_chunk(out, "IEND", {});
    return out;
}

QrMatrix parse_bitmap(std::span<const std::uint8_t> image) {
    PbmScanner scanner(image);
    if (scanner.token() != "P1")
        throw ImageParseError("not a plain PBM (P1) image");
    const int width = parse_dimension(scanner.token());
    const int height = parse_dimension(scanner.token());
    if (width != height)
        throw ImageParseError("image is not square");

    std::vector<std::uint8_t> dark(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (auto& px : dark)
        px = static_cast<std::uint8_t>(scanner.digit());
    if (!scanner.at_end())
        throw ImageParseError("trailing data after the pixel raster");

    int top = height, bottom = -1, left = width, right = -1;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (dark[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(x)]) {
                top = std::min(top, y);
                bottom = std::max(bottom, y);
                left = std::min(left, x);
                right = std::max(right, x);
            }
    if (bottom < 0)
        throw ImageParseError("image contains no dark modules (no finder pattern)");

    const int box_w = right - left + 1;
    const int box_h = bottom - top + 1;
    if (box_w != box_h)
        throw ImageParseError("symbol bounding box is not square");

    auto at = [&](int y, int x) {
        return dark[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                    static_cast<std::size_t>(x)] != 0;
    };

    // the top edge of the top-left finder pattern is exactly seven modules
    int run = 0;
    while (left + run <= right && at(top, left + run))
        ++run;
    if (run == 0 || run % 7 != 0)
        throw ImageParseError("finder pattern run is not a multiple of seven pixels");
    const int scale = run / 7;
    if (box_w % scale != 0)
        throw ImageParseError("symbol size is not a multiple of the module scale");
    const int size = box_w / scale;
    if (size < 21 || size > 57 || (size - 17) % 4 != 0)
        throw ImageParseError("module count " + std::to_string(size) +
                              " matches no supported version");

    QrMatrix m;
    m.size = size;
    m.version = (size - 17) / 4;
    m.level = EcLevel::L;  // refined by format decoding later
    m.mask_id = -1;
    m.dark.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0);
    m.function.assign(m.dark.size(), 0);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const bool value = at(top + r * scale, left + c * scale);
            for (int dy = 0; dy < scale; ++dy)
                for (int dx = 0; dx < scale; ++dx)
                    if (at(top + r * scale + dy, left + c * scale + dx) != value)
                        throw ImageParseError("module scale is inconsistent");
            m.set_module(r, c, value);
        }
    }
    return m;
}

}  // namespace qrseal::imageio
