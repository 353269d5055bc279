#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qrseal/matrix.hpp"
#include "qrseal/ttjsa.hpp"

namespace qrseal::docauth {

struct Subject {
    std::string code;
    int marks = 0;
    int max_marks = 0;
    bool operator==(const Subject&) const = default;
};

struct MarkSheetRecord {
    std::string institution;
    std::string affiliation;
    std::string programme;
    std::string semester;
    std::string year;
    std::string candidate_name;
    std::string roll;
    std::string registration;
    std::string session;
    std::vector<Subject> subjects;
    std::vector<std::string> class_notes;
    bool operator==(const MarkSheetRecord&) const = default;
};

// Canonical line-oriented form: one "KEY: value" line per scalar field in
// fixed order, then "SUBJ code marks max" lines, then "NOTE text" lines.
// Line feeds and backslashes inside values are escaped, so the mapping is
// injective and the output is byte-identical for equal records.
std::vector<std::uint8_t> serialize_record(const MarkSheetRecord& record);
MarkSheetRecord parse_record(std::span<const std::uint8_t> bytes);

// One framed ciphertext fragment as carried by a single QR code:
// 4-byte magic "QSL1", 2-byte part_index, 2-byte part_count,
// 4-byte original_length (all big-endian), then the body bytes.
struct SealedPayload {
    std::uint16_t part_index = 1;
    std::uint16_t part_count = 1;
    std::uint32_t original_length = 0;
    std::vector<std::uint8_t> body;
    bool operator==(const SealedPayload&) const = default;
};

inline constexpr std::array<std::uint8_t, 4> kPayloadMagic{'Q', 'S', 'L', '1'};
inline constexpr std::size_t kPayloadHeaderSize = 12;

std::vector<std::uint8_t> encode_payload(const SealedPayload& part);
SealedPayload decode_payload(std::span<const std::uint8_t> bytes);

// Decode one matrix down to its framed payload (throws UnsealError).
SealedPayload extract_payload(const QrMatrix& matrix);

// Decode all matrices and reassemble the carried ciphertext (any order).
ttjsa::CipherText collect_ciphertext(const std::vector<QrMatrix>& matrices);

std::vector<QrMatrix> seal(const MarkSheetRecord& record,
                           std::span<const std::uint8_t> passphrase);
MarkSheetRecord unseal(const std::vector<QrMatrix>& matrices,
                       std::span<const std::uint8_t> passphrase);

enum class Verdict { Match, Mismatch, Undecodable };

struct FieldDiff {
    std::string field_path;  // e.g. "subjects[1].marks"
    std::string expected;    // value carried in the QR codes
    std::string found;       // value on the printed copy
    bool operator==(const FieldDiff&) const = default;
};

struct VerifyReport {
    Verdict verdict = Verdict::Undecodable;
    std::vector<FieldDiff> field_diffs;
    double histogram_distance = 0.0;
};

VerifyReport verify(const MarkSheetRecord& printed, const std::vector<QrMatrix>& matrices,
                    std::span<const std::uint8_t> passphrase);

// Field-by-field comparison; expected is the authoritative (sealed) record.
std::vector<FieldDiff> compare_records(const MarkSheetRecord& expected,
                                       const MarkSheetRecord& found);

std::array<std::uint64_t, 256> frequency_histogram(std::span<const std::uint8_t> bytes);
double histogram_distance(const std::array<std::uint64_t, 256>& h1,
                          const std::array<std::uint64_t, 256>& h2);

}  // namespace qrseal::docauth
