#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qrseal/bitstream.hpp"

namespace qrseal {

// A module grid. Coordinates are (row, col) with (0, 0) the top-left module.
// function marks modules that carry finder/timing/alignment/format/version
// structure rather than data.
struct QrMatrix {
    int version = 0;
    EcLevel level = EcLevel::L;
    int mask_id = -1;  // -1 until a mask has been chosen or decoded
    int size = 0;
    std::vector<std::uint8_t> dark;      // size*size, row-major, 0 or 1
    std::vector<std::uint8_t> function;  // size*size, row-major, 0 or 1

    bool module(int r, int c) const { return dark[idx(r, c)] != 0; }
    void set_module(int r, int c, bool d) { dark[idx(r, c)] = d ? 1 : 0; }
    bool is_function(int r, int c) const { return function[idx(r, c)] != 0; }
    void set_function(int r, int c, bool d) {
        function[idx(r, c)] = 1;
        dark[idx(r, c)] = d ? 1 : 0;
    }

    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(size) +
               static_cast<std::size_t>(c);
    }
};

// Finder, separator, timing and alignment patterns, the fixed dark module,
// version information for versions 7+, and reserved (light) format areas.
QrMatrix build_function_patterns(int version, EcLevel level);

// Generic two-column zigzag: column pairs right to left, alternating upward
// and downward, right column before left within a row. skip_col (-1 for none)
// is hopped over entirely; blocked positions are omitted.
std::vector<std::pair<int, int>> zigzag_walk(int rows, int cols, int skip_col,
                                             const std::function<bool(int, int)>& blocked);

// Placement positions for data modules of this matrix, in write order.
std::vector<std::pair<int, int>> placement_order(const QrMatrix& matrix);

// Writes bits along the placement order; bit count must match exactly.
void place_data(QrMatrix& matrix, const BitString& bits);

// True when the mask formula inverts module (i, j). mask_id in 0..7.
bool mask_condition(int mask_id, int i, int j);

// XORs the mask over all non-function modules (an involution).
void apply_mask(QrMatrix& matrix, int mask_id);

// The four-rule penalty score of the grid as currently drawn.
long penalty_score(const QrMatrix& matrix);

// Penalty of each mask applied to the placed-but-unmasked matrix, format
// bits drawn before scoring. Does not modify the input.
std::array<long, 8> mask_penalties(const QrMatrix& matrix);

// Applies the lowest-penalty mask (ties to the lowest id), draws its format
// information, records it in matrix.mask_id and returns it.
int choose_mask(QrMatrix& matrix);

// The 15-bit format value: level and mask BCH-protected, XOR-masked.
int format_bits(EcLevel level, int mask_id);

// Writes both format information copies for matrix.level and the given mask.
void draw_format_bits(QrMatrix& matrix, int mask_id);

// Module positions of the two format copies, bit 0 first.
std::array<std::pair<int, int>, 15> format_positions_copy1(int size);
std::array<std::pair<int, int>, 15> format_positions_copy2(int size);

// Byte-mode payload to a finished matrix. forced_mask -1 selects by penalty.
QrMatrix encode_matrix(std::span<const std::uint8_t> payload, int version, EcLevel level,
                       int forced_mask = -1);

struct DecodedMatrix {
    int version;
    EcLevel level;
    int mask_id;
    std::vector<RsBlock> blocks;           // de-interleaved, parity attached
    std::vector<std::uint8_t> codewords;   // blocks flattened, data then parity
};

// Reads format information (correcting up to 3 flipped bits per copy), unmasks,
// walks the placement order and de-interleaves. Throws DecodeError.
DecodedMatrix decode_matrix(const QrMatrix& matrix);

struct CorrectedPayload {
    std::vector<std::uint8_t> data_codewords;
    int errors_fixed;
};

// Runs Reed-Solomon correction over every block and concatenates the data
// codewords in block order. Throws UnrecoverableBlockError.
CorrectedPayload corrected_data(const DecodedMatrix& decoded);

}  // namespace qrseal
