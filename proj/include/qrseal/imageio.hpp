#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qrseal/matrix.hpp"

namespace qrseal::imageio {

struct RenderOptions {
    int module_scale = 1;  // pixels per module, >= 1
    int quiet_zone = 4;    // light border in modules, >= 0
};

// Plain-text PBM ("P1"); dark modules render as 1. Output is
// (size + 2*quiet_zone) * module_scale pixels on each side.
std::vector<std::uint8_t> render_pbm(const QrMatrix& matrix, const RenderOptions& opts = {});

// 1-bit grayscale PNG of the same pixel grid; dark modules are black.
std::vector<std::uint8_t> render_png(const QrMatrix& matrix, const RenderOptions& opts = {});

// Parses a plain PBM rendering back to the module grid. The module scale is
// inferred from the top edge of the top-left finder pattern (seven modules),
// so any conformant axis-aligned rendering parses, not only our own output.
QrMatrix parse_bitmap(std::span<const std::uint8_t> image);

}  // namespace qrseal::imageio
