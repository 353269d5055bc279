#include "qrseal/matrix.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <stdexcept>

#include "qrseal/errors.hpp"
#include "qrseal/rs.hpp"

namespace qrseal {

namespace {

// Alignment pattern center coordinates, versions 2-10.
const std::vector<int>& alignment_centers(int version) {
    static const std::vector<int> table[11] = {
        {}, {}, {6, 18}, {6, 22}, {6, 26}, {6, 30}, {6, 34},
        {6, 22, 38}, {6, 24, 42}, {6, 26, 46}, {6, 28, 50},
    };
    return table[version];
}

void draw_finder(QrMatrix& m, int center_r, int center_c) {
    for (int dr = -4; dr <= 4; ++dr) {
        for (int dc = -4; dc <= 4; ++dc) {
            int r = center_r + dr, c = center_c + dc;
            if (r < 0 || r >= m.size || c < 0 || c >= m.size)
                continue;
            int dist = std::max(std::abs(dr), std::abs(dc));
            // solid 3x3 core, light ring, dark border, light separator
            m.set_function(r, c, dist <= 1 || dist == 3);
        }
    }
}

void draw_alignment(QrMatrix& m, int center_r, int center_c) {
    for (int dr = -2; dr <= 2; ++dr)
        for (int dc = -2; dc <= 2; ++dc)
            m.set_function(center_r + dr, center_c + dc,
                           std::max(std::abs(dr), std::abs(dc)) != 1);
}

// 18-bit version information: 6-bit version plus 12-bit BCH remainder.
int version_bits(int version) {
    int rem = version;
    for (int i = 0; i < 12; ++i)
        rem = (rem << 1) ^ ((rem >> 11) * 0x1F25);
    return version << 12 | rem;
}

}  // namespace

QrMatrix build_function_patterns(int version, EcLevel level) {
    if (version < 1 || version > 10)
        throw std::invalid_argument("version out of range [1, 10]");

    QrMatrix m;
    m.version = version;
    m.level = level;
    m.size = 17 + 4 * version;
    m.dark.assign(static_cast<std::size_t>(m.size) * static_cast<std::size_t>(m.size), 0);
    m.function.assign(m.dark.size(), 0);

    // timing patterns, drawn first so the finders may overwrite their ends
    for (int i = 0; i < m.size; ++i) {
        m.set_function(6, i, i % 2 == 0);
        m.set_function(i, 6, i % 2 == 0);
    }

    const auto& centers = alignment_centers(version);
    int last = static_cast<int>(centers.size()) - 1;
    for (std::size_t a = 0; a < centers.size(); ++a) {
        for (std::size_t b = 0; b < centers.size(); ++b) {
            bool corner = (a == 0 && b == 0) ||
                          (a == 0 && static_cast<int>(b) == last) ||
                          (static_cast<int>(a) == last && b == 0);
            if (!corner)
                draw_alignment(m, centers[a], centers[b]);
        }
    }

    draw_finder(m, 3, 3);
    draw_finder(m, 3, m.size - 4);
    draw_finder(m, m.size - 4, 3);

    // reserve format areas (light until a mask is committed)
    for (auto [r, c] : format_positions_copy1(m.size))
        m.set_function(r, c, false);
    for (auto [r, c] : format_positions_copy2(m.size))
        m.set_function(r, c, false);
    m.set_function(m.size - 8, 8, true);  // the fixed dark module

    if (version >= 7) {
        int bits = version_bits(version);
        for (int i = 0; i < 18; ++i) {
            bool dark = ((bits >> i) & 1) != 0;
            int a = m.size - 11 + i % 3;
            int b = i / 3;
            m.set_function(b, a, dark);  // top-right block
            m.set_function(a, b, dark);  // bottom-left block
        }
    }
    return m;
}

std::vector<std::pair<int, int>> zigzag_walk(int rows, int cols, int skip_col,
                                             const std::function<bool(int, int)>& blocked) {
    std::vector<std::pair<int, int>> order;
    for (int right = cols - 1; right >= 1; right -= 2) {
        if (right == skip_col)
            --right;  // hop over the vertical timing column
        bool upward = ((right + 1) & 2) == 0;
        for (int vert = 0; vert < rows; ++vert) {
            int row = upward ? rows - 1 - vert : vert;
            for (int j = 0; j < 2; ++j) {
                int col = right - j;
                if (!blocked || !blocked(row, col))
                    order.emplace_back(row, col);
            }
        }
    }
    return order;
}

std::vector<std::pair<int, int>> placement_order(const QrMatrix& matrix) {
    return zigzag_walk(matrix.size, matrix.size, 6,
                       [&matrix](int r, int c) { return matrix.is_function(r, c); });
}

void place_data(QrMatrix& matrix, const BitString& bits) {
    auto order = placement_order(matrix);
    if (bits.size() != order.size())
        throw std::invalid_argument("bit count does not match the matrix data capacity");
    for (std::size_t i = 0; i < order.size(); ++i)
        matrix.set_module(order[i].first, order[i].second, bits.bit(i));
}

bool mask_condition(int mask_id, int i, int j) {
    switch (mask_id) {
        case 0: return (i + j) % 2 == 0;
        case 1: return i % 2 == 0;
        case 2: return j % 3 == 0;
        case 3: return (i + j) % 3 == 0;
        case 4: return (i / 2 + j / 3) % 2 == 0;
        case 5: return (i * j) % 2 + (i * j) % 3 == 0;
        case 6: return ((i * j) % 2 + (i * j) % 3) % 2 == 0;
        case 7: return ((i * j) % 3 + (i + j) % 2) % 2 == 0;
    }
    throw std::invalid_argument("mask id out of range [0, 7]");
}

void apply_mask(QrMatrix& matrix, int mask_id) {
    for (int r = 0; r < matrix.size; ++r)
        for (int c = 0; c < matrix.size; ++c)
            if (!matrix.is_function(r, c) && mask_condition(mask_id, r, c))
                matrix.dark[matrix.idx(r, c)] ^= 1;
}

namespace {

long runs_penalty(const QrMatrix& m, bool by_rows) {
    long score = 0;
    for (int a = 0; a < m.size; ++a) {
        int run = 0;
        bool color = false;
        for (int b = 0; b < m.size; ++b) {
            bool dark = by_rows ? m.module(a, b) : m.module(b, a);
            if (b == 0 || dark != color) {
                if (run >= 5)
                    score += 3 + (run - 5);
                color = dark;
                run = 1;
            } else {
                ++run;
            }
        }
        if (run >= 5)
            score += 3 + (run - 5);
    }
    return score;
}

long finder_like_penalty(const QrMatrix& m, bool by_rows) {
    // dark-light-dark-dark-dark-light-dark with a four-module light flank
    static const int kPattern1[11] = {1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0};
    static const int kPattern2[11] = {0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1};
    long score = 0;
    for (int a = 0; a < m.size; ++a) {
        for (int start = 0; start + 11 <= m.size; ++start) {
            bool match1 = true, match2 = true;
            for (int k = 0; k < 11 && (match1 || match2); ++k) {
                bool dark = by_rows ? m.module(a, start + k) : m.module(start + k, a);
                if (dark != (kPattern1[k] != 0))
                    match1 = false;
                if (dark != (kPattern2[k] != 0))
                    match2 = false;
            }
            if (match1)
                score += 40;
            if (match2)
                score += 40;
        }
    }
    return score;
}

}  // namespace

long penalty_score(const QrMatrix& m) {
    long score = runs_penalty(m, true) + runs_penalty(m, false);

    for (int r = 0; r + 1 < m.size; ++r)
        for (int c = 0; c + 1 < m.size; ++c) {
            bool d = m.module(r, c);
            if (m.module(r, c + 1) == d && m.module(r + 1, c) == d && m.module(r + 1, c + 1) == d)
                score += 3;
        }

    score += finder_like_penalty(m, true) + finder_like_penalty(m, false);

    long dark = 0;
    for (std::uint8_t v : m.dark)
        dark += v;
    long total = static_cast<long>(m.size) * m.size;
    score += 10 * (std::abs(20 * dark - 10 * total) / total);
    return score;
}

int format_bits(EcLevel level, int mask_id) {
    if (mask_id < 0 || mask_id > 7)
        throw std::invalid_argument("mask id out of range [0, 7]");
    static const int kLevelCode[4] = {1, 0, 3, 2};  // L, M, Q, H
    int data = kLevelCode[static_cast<int>(level)] << 3 | mask_id;
    int rem = data;
    for (int i = 0; i < 10; ++i)
        rem = (rem << 1) ^ ((rem >> 9) * 0x537);
    return ((data << 10) | rem) ^ 0x5412;
}

std::array<std::pair<int, int>, 15> format_positions_copy1(int size) {
    (void)size;
    std::array<std::pair<int, int>, 15> pos;
    for (int i = 0; i <= 5; ++i)
        pos[static_cast<std::size_t>(i)] = {i, 8};
    pos[6] = {7, 8};
    pos[7] = {8, 8};
    pos[8] = {8, 7};
    for (int i = 9; i < 15; ++i)
        pos[static_cast<std::size_t>(i)] = {8, 14 - i};
    return pos;
}

std::array<std::pair<int, int>, 15> format_positions_copy2(int size) {
    std::array<std::pair<int, int>, 15> pos;
    for (int i = 0; i < 8; ++i)
        pos[static_cast<std::size_t>(i)] = {8, size - 1 - i};
    for (int i = 8; i < 15; ++i)
        pos[static_cast<std::size_t>(i)] = {size - 15 + i, 8};
    return pos;
}

void draw_format_bits(QrMatrix& matrix, int mask_id) {
    int bits = format_bits(matrix.level, mask_id);
    auto copy1 = format_positions_copy1(matrix.size);
    auto copy2 = format_positions_copy2(matrix.size);
    for (int i = 0; i < 15; ++i) {
        bool dark = ((bits >> i) & 1) != 0;
        matrix.set_function(copy1[static_cast<std::size_t>(i)].first,
                            copy1[static_cast<std::size_t>(i)].second, dark);
        matrix.set_function(copy2[static_cast<std::size_t>(i)].first,
                            copy2[static_cast<std::size_t>(i)].second, dark);
    }
}

std::array<long, 8> mask_penalties(const QrMatrix& matrix) {
    std::array<long, 8> scores{};
    QrMatrix work = matrix;
    for (int mask = 0; mask < 8; ++mask) {
        apply_mask(work, mask);
        draw_format_bits(work, mask);
        scores[static_cast<std::size_t>(mask)] = penalty_score(work);
        apply_mask(work, mask);  // masking is an involution
    }
    return scores;
}

int choose_mask(QrMatrix& matrix) {
    auto scores = mask_penalties(matrix);
    int best = 0;
    for (int mask = 1; mask < 8; ++mask)
        if (scores[static_cast<std::size_t>(mask)] < scores[static_cast<std::size_t>(best)])
            best = mask;  // strict comparison keeps ties at the lowest id
    apply_mask(matrix, best);
    draw_format_bits(matrix, best);
    matrix.mask_id = best;
    return best;
}

QrMatrix encode_matrix(std::span<const std::uint8_t> payload, int version, EcLevel level,
                       int forced_mask) {
    if (forced_mask < -1 || forced_mask > 7)
        throw std::invalid_argument("mask id out of range [0, 7]");
    auto profile = QrProfile::get(version, level);
    auto bits = encode_segment(Segment::byte({payload.begin(), payload.end()}), version);
    auto data = assemble_codewords(bits, profile);
    auto stream = interleave_blocks(data, profile);

    QrMatrix m = build_function_patterns(version, level);
    BitString placement = BitString::from_bytes(stream);
    placement.append_bits(0, profile.remainder_bits);
    place_data(m, placement);

    if (forced_mask >= 0) {
        apply_mask(m, forced_mask);
        draw_format_bits(m, forced_mask);
        m.mask_id = forced_mask;
    } else {
        choose_mask(m);
    }
    return m;
}

namespace {

struct FormatRead {
    EcLevel level;
    int mask_id;
    int distance;
};

FormatRead read_format(const QrMatrix& m) {
    auto copy1 = format_positions_copy1(m.size);
    auto copy2 = format_positions_copy2(m.size);
    int raw1 = 0, raw2 = 0;
    for (int i = 0; i < 15; ++i) {
        if (m.module(copy1[static_cast<std::size_t>(i)].first, copy1[static_cast<std::size_t>(i)].second))
            raw1 |= 1 << i;
        if (m.module(copy2[static_cast<std::size_t>(i)].first, copy2[static_cast<std::size_t>(i)].second))
            raw2 |= 1 << i;
    }

    FormatRead best{EcLevel::L, 0, 16};
    for (EcLevel level : {EcLevel::L, EcLevel::M, EcLevel::Q, EcLevel::H}) {
        for (int mask = 0; mask < 8; ++mask) {
            int pattern = format_bits(level, mask);
            int d = std::min(std::popcount(static_cast<unsigned>(raw1 ^ pattern)),
                             std::popcount(static_cast<unsigned>(raw2 ^ pattern)));
            if (d < best.distance)
                best = {level, mask, d};
        }
    }
    if (best.distance > 3)
        throw DecodeError("format information is damaged beyond repair");
    return best;
}

}  // namespace

DecodedMatrix decode_matrix(const QrMatrix& matrix) {
    if (matrix.size < 21 || matrix.size > 57 || (matrix.size - 17) % 4 != 0)
        throw DecodeError("matrix size matches no supported version");
    int version = (matrix.size - 17) / 4;

    FormatRead format = read_format(matrix);
    auto profile = QrProfile::get(version, format.level);

    // Fresh function map; the input grid's own map is not trusted.
    QrMatrix reference = build_function_patterns(version, format.level);
    auto order = placement_order(reference);

    BitString bits;
    for (auto [r, c] : order)
        bits.append_bit(matrix.module(r, c) ^ mask_condition(format.mask_id, r, c));

    std::size_t needed = static_cast<std::size_t>(profile.total_codewords) * 8;
    if (bits.size() < needed)
        throw DecodeError("matrix does not hold a full codeword stream");
    std::vector<std::uint8_t> stream(static_cast<std::size_t>(profile.total_codewords));
    for (auto& byte : stream)
        byte = static_cast<std::uint8_t>(bits.read_bits(8));

    DecodedMatrix out;
    out.version = version;
    out.level = format.level;
    out.mask_id = format.mask_id;
    out.blocks = deinterleave_blocks(stream, profile);
    for (const RsBlock& b : out.blocks) {
        out.codewords.insert(out.codewords.end(), b.data.begin(), b.data.end());
        out.codewords.insert(out.codewords.end(), b.ec.begin(), b.ec.end());
    }
    return out;
}

CorrectedPayload corrected_data(const DecodedMatrix& decoded) {
    auto profile = QrProfile::get(decoded.version, decoded.level);
    CorrectedPayload out{{}, 0};
    for (const RsBlock& b : decoded.blocks) {
        std::vector<std::uint8_t> word = b.data;
        word.insert(word.end(), b.ec.begin(), b.ec.end());
        auto fixed = rs::correct(word, profile.ec_per_block);
        out.errors_fixed += fixed.errors_fixed;
        out.data_codewords.insert(out.data_codewords.end(), fixed.data.begin(), fixed.data.end());
    }
    return out;
}

}  // namespace qrseal
