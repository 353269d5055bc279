#include "qrseal/docauth.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "qrseal/bitstream.hpp"
#include "qrseal/errors.hpp"

namespace qrseal::docauth {

namespace {

const std::array<std::string, 9> kScalarKeys = {
    "INSTITUTION", "AFFILIATION", "PROGRAMME",    "SEMESTER", "YEAR",
    "CANDIDATE_NAME", "ROLL",     "REGISTRATION", "SESSION"};

std::string& scalar_field(MarkSheetRecord& r, std::size_t idx) {
    switch (idx) {
        case 0: return r.institution;
        case 1: return r.affiliation;
        case 2: return r.programme;
        case 3: return r.semester;
        case 4: return r.year;
        case 5: return r.candidate_name;
        case 6: return r.roll;
        case 7: return r.registration;
        default: return r.session;
    }
}

const std::string& scalar_field(const MarkSheetRecord& r, std::size_t idx) {
    return scalar_field(const_cast<MarkSheetRecord&>(r), idx);
}

std::string escape_value(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        if (ch == '\\')
            out += "\\\\";
        else if (ch == '\n')
            out += "\\n";
        else
            out += ch;
    }
    return out;
}

std::string unescape_value(const std::string& s, int line_no) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (i + 1 >= s.size())
            throw RecordParseError(line_no, "dangling escape at end of value");
        const char next = s[++i];
        if (next == 'n')
            out += '\n';
        else if (next == '\\')
            out += '\\';
        else
            throw RecordParseError(line_no, "unknown escape sequence");
    }
    return out;
}

void validate_record(const MarkSheetRecord& r) {
    if (r.roll.empty() || r.registration.empty())
        throw std::invalid_argument("record: roll and registration must be nonempty");
    for (const auto& s : r.subjects) {
        if (s.code.empty() || s.code.find(' ') != std::string::npos ||
            s.code.find('\n') != std::string::npos || s.code.find('\\') != std::string::npos)
            throw std::invalid_argument("record: subject code must be nonempty, without spaces");
        if (s.marks < 0 || s.max_marks < 0 || s.marks > s.max_marks)
            throw std::invalid_argument("record: marks must satisfy 0 <= marks <= max_marks");
    }
}

int parse_marks(const std::string& token, int line_no) {
    if (token.empty() ||
        !std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); }))
        throw RecordParseError(line_no, "marks must be a non-negative integer");
    int value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw RecordParseError(line_no, "marks value out of range");
    return value;
}

std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] << 8 | b[off + 1]);
}

std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) << 24 | static_cast<std::uint32_t>(b[off + 1]) << 16 |
           static_cast<std::uint32_t>(b[off + 2]) << 8 | static_cast<std::uint32_t>(b[off + 3]);
}

std::size_t byte_mode_capacity(int version, EcLevel level) {
    const auto profile = QrProfile::get(version, level);
    return static_cast<std::size_t>(profile.data_codewords) - (version <= 9 ? 2 : 3);
}

MarkSheetRecord decrypt_and_parse(const ttjsa::CipherText& cipher,
                                  std::span<const std::uint8_t> passphrase) {
    std::vector<std::uint8_t> plain;
    try {
        plain = ttjsa::decrypt(cipher, passphrase);
    } catch (const std::invalid_argument& e) {
        throw UnsealError(UnsealError::Stage::Decrypt, e.what());
    }
    try {
        return parse_record(plain);
    } catch (const RecordParseError& e) {
        throw UnsealError(UnsealError::Stage::RecordParse, e.what());
    }
}

}  // namespace

std::vector<std::uint8_t> serialize_record(const MarkSheetRecord& record) {
    validate_record(record);
    std::string out;
    for (std::size_t k = 0; k < kScalarKeys.size(); ++k) {
        out += kScalarKeys[k];
        out += ": ";
        out += escape_value(scalar_field(record, k));
        out += '\n';
    }
    for (const auto& s : record.subjects) {
        out += "SUBJ ";
        out += s.code;
        out += ' ';
        out += std::to_string(s.marks);
        out += ' ';
        out += std::to_string(s.max_marks);
        out += '\n';
    }
    for (const auto& note : record.class_notes) {
        out += "NOTE ";
        out += escape_value(note);
        out += '\n';
    }
    return {out.begin(), out.end()};
}

MarkSheetRecord parse_record(std::span<const std::uint8_t> bytes) {
    if (bytes.empty())
        throw RecordParseError(1, "empty record");
    const std::string text(bytes.begin(), bytes.end());

    std::vector<std::string> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    if (!lines.empty() && lines.back().empty())
        lines.pop_back();  // canonical form ends with a line feed

    MarkSheetRecord rec;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < kScalarKeys.size(); ++k) {
        const int no = static_cast<int>(idx) + 1;
        if (idx >= lines.size())
            throw RecordParseError(no, "missing " + kScalarKeys[k] + " line");
        const std::string& line = lines[idx++];
        const std::string prefix = kScalarKeys[k] + ": ";
        if (line.rfind(prefix, 0) != 0)
            throw RecordParseError(no, "expected a " + kScalarKeys[k] + " line");
        scalar_field(rec, k) = unescape_value(line.substr(prefix.size()), no);
    }

    bool notes_started = false;
    for (; idx < lines.size(); ++idx) {
        const int no = static_cast<int>(idx) + 1;
        const std::string& line = lines[idx];
        if (line.rfind("SUBJ ", 0) == 0) {
            if (notes_started)
                throw RecordParseError(no, "subject line after note lines");
            const std::string rest = line.substr(5);
            std::vector<std::string> tokens;
            std::size_t pos = 0;
            while (pos <= rest.size()) {
                const std::size_t space = rest.find(' ', pos);
                tokens.push_back(rest.substr(pos, space - pos));
                if (space == std::string::npos)
                    break;
                pos = space + 1;
            }
            if (tokens.size() != 3 || tokens[0].empty())
                throw RecordParseError(no, "subject line must be 'SUBJ code marks max'");
            Subject s;
            s.code = tokens[0];
            s.marks = parse_marks(tokens[1], no);
            s.max_marks = parse_marks(tokens[2], no);
            if (s.marks > s.max_marks)
                throw RecordParseError(no, "marks exceed the maximum");
            rec.subjects.push_back(std::move(s));
        } else if (line.rfind("NOTE ", 0) == 0) {
            notes_started = true;
            rec.class_notes.push_back(unescape_value(line.substr(5), no));
        } else {
            throw RecordParseError(no, "unknown line");
        }
    }

    if (rec.roll.empty())
        throw RecordParseError(7, "roll must be nonempty");
    if (rec.registration.empty())
        throw RecordParseError(8, "registration must be nonempty");
    return rec;
}

std::vector<std::uint8_t> encode_payload(const SealedPayload& part) {
    if (part.part_index == 0 || part.part_count == 0 || part.part_index > part.part_count)
        throw std::invalid_argument("payload: part_index must lie in 1..part_count");
    std::vector<std::uint8_t> out;
    out.reserve(kPayloadHeaderSize + part.body.size());
    out.insert(out.end(), kPayloadMagic.begin(), kPayloadMagic.end());
    out.push_back(static_cast<std::uint8_t>(part.part_index >> 8));
    out.push_back(static_cast<std::uint8_t>(part.part_index & 0xFF));
    out.push_back(static_cast<std::uint8_t>(part.part_count >> 8));
    out.push_back(static_cast<std::uint8_t>(part.part_count & 0xFF));
    for (int shift = 24; shift >= 0; shift -= 8)
        out.push_back(static_cast<std::uint8_t>(part.original_length >> shift));
    out.insert(out.end(), part.body.begin(), part.body.end());
    return out;
}

SealedPayload decode_payload(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kPayloadHeaderSize)
        throw UnsealError(UnsealError::Stage::Framing, "payload shorter than its header");
    if (!std::equal(kPayloadMagic.begin(), kPayloadMagic.end(), bytes.begin()))
        throw UnsealError(UnsealError::Stage::Framing, "payload magic mismatch");
    SealedPayload part;
    part.part_index = read_u16(bytes, 4);
    part.part_count = read_u16(bytes, 6);
    part.original_length = read_u32(bytes, 8);
    if (part.part_index == 0 || part.part_count == 0 || part.part_index > part.part_count)
        throw UnsealError(UnsealError::Stage::Framing, "payload part numbering invalid");
    part.body.assign(bytes.begin() + kPayloadHeaderSize, bytes.end());
    return part;
}

SealedPayload extract_payload(const QrMatrix& matrix) {
    Segment segment;
    try {
        const auto decoded = decode_matrix(matrix);
        const auto fixed = corrected_data(decoded);
        auto stream = BitString::from_bytes(fixed.data_codewords);
        segment = parse_segment(stream, decoded.version);
    } catch (const DecodeError& e) {
        throw UnsealError(UnsealError::Stage::Decode, e.what());
    } catch (const UnrecoverableBlockError& e) {
        throw UnsealError(UnsealError::Stage::Decode, e.what());
    }
    if (segment.mode != SegmentMode::Byte)
        throw UnsealError(UnsealError::Stage::Framing, "carried segment is not byte mode");
    return decode_payload(segment.bytes);
}

ttjsa::CipherText collect_ciphertext(const std::vector<QrMatrix>& matrices) {
    if (matrices.empty())
        throw UnsealError(UnsealError::Stage::Framing, "no QR matrices supplied");
    std::vector<SealedPayload> parts;
    parts.reserve(matrices.size());
    for (const auto& m : matrices)
        parts.push_back(extract_payload(m));

    const std::uint16_t count = parts[0].part_count;
    const std::uint32_t original_length = parts[0].original_length;
    for (const auto& p : parts)
        if (p.part_count != count || p.original_length != original_length)
            throw UnsealError(UnsealError::Stage::Framing, "parts disagree about the payload shape");
    if (parts.size() != count)
        throw UnsealError(UnsealError::Stage::Framing,
                          "expected " + std::to_string(count) + " parts, got " +
                              std::to_string(parts.size()));
    std::sort(parts.begin(), parts.end(),
              [](const SealedPayload& a, const SealedPayload& b) { return a.part_index < b.part_index; });
    for (std::size_t i = 0; i < parts.size(); ++i)
        if (parts[i].part_index != i + 1)
            throw UnsealError(UnsealError::Stage::Framing, "duplicate or missing part index");

    ttjsa::CipherText cipher;
    cipher.original_length = original_length;
    for (const auto& p : parts)
        cipher.bytes.insert(cipher.bytes.end(), p.body.begin(), p.body.end());
    if (cipher.bytes.empty() || cipher.bytes.size() % 32 != 0)
        throw UnsealError(UnsealError::Stage::Framing,
                          "carried ciphertext length is not a positive 32-byte multiple");
    if (cipher.original_length > cipher.bytes.size())
        throw UnsealError(UnsealError::Stage::Framing,
                          "declared length exceeds the carried ciphertext");
    return cipher;
}

std::vector<QrMatrix> seal(const MarkSheetRecord& record,
                           std::span<const std::uint8_t> passphrase) {
    const auto plain = serialize_record(record);
    const auto cipher = ttjsa::encrypt(plain, passphrase);
    const std::size_t n = cipher.bytes.size();
    if (cipher.original_length > 0xFFFFFFFFull)
        throw CapacityError("record too large to seal");
    const auto original_length = static_cast<std::uint32_t>(cipher.original_length);

    // smallest version whose high-EC profile carries the whole payload
    for (int version = 1; version <= 10; ++version) {
        if (kPayloadHeaderSize + n <= byte_mode_capacity(version, EcLevel::H)) {
            SealedPayload part{1, 1, original_length, cipher.bytes};
            return {encode_matrix(encode_payload(part), version, EcLevel::H)};
        }
    }

    // otherwise split across version-10 low-EC codes
    const std::size_t body_capacity = byte_mode_capacity(10, EcLevel::L) - kPayloadHeaderSize;
    const std::size_t part_count = (n + body_capacity - 1) / body_capacity;
    if (part_count > 0xFFFF)
        throw CapacityError("record too large to seal");
    std::vector<QrMatrix> out;
    out.reserve(part_count);
    for (std::size_t i = 0; i < part_count; ++i) {
        const std::size_t from = i * body_capacity;
        const std::size_t to = std::min(n, from + body_capacity);
        SealedPayload part{static_cast<std::uint16_t>(i + 1), static_cast<std::uint16_t>(part_count),
                           original_length,
                           {cipher.bytes.begin() + static_cast<std::ptrdiff_t>(from),
                            cipher.bytes.begin() + static_cast<std::ptrdiff_t>(to)}};
        out.push_back(encode_matrix(encode_payload(part), 10, EcLevel::L));
    }
    return out;
}

MarkSheetRecord unseal(const std::vector<QrMatrix>& matrices,
                       std::span<const std::uint8_t> passphrase) {
    return decrypt_and_parse(collect_ciphertext(matrices), passphrase);
}

std::vector<FieldDiff> compare_records(const MarkSheetRecord& expected,
                                       const MarkSheetRecord& found) {
    std::vector<FieldDiff> diffs;
    static const std::array<std::string, 9> paths = {
        "institution", "affiliation", "programme",    "semester", "year",
        "candidate_name", "roll",     "registration", "session"};
    for (std::size_t k = 0; k < paths.size(); ++k) {
        const std::string& e = scalar_field(expected, k);
        const std::string& f = scalar_field(found, k);
        if (e != f)
            diffs.push_back({paths[k], e, f});
    }

    if (expected.subjects.size() != found.subjects.size())
        diffs.push_back({"subjects.count", std::to_string(expected.subjects.size()),
                         std::to_string(found.subjects.size())});
    const std::size_t subjects = std::min(expected.subjects.size(), found.subjects.size());
    for (std::size_t i = 0; i < subjects; ++i) {
        const auto& e = expected.subjects[i];
        const auto& f = found.subjects[i];
        const std::string base = "subjects[" + std::to_string(i) + "].";
        if (e.code != f.code)
            diffs.push_back({base + "code", e.code, f.code});
        if (e.marks != f.marks)
            diffs.push_back({base + "marks", std::to_string(e.marks), std::to_string(f.marks)});
        if (e.max_marks != f.max_marks)
            diffs.push_back(
                {base + "max_marks", std::to_string(e.max_marks), std::to_string(f.max_marks)});
    }

    if (expected.class_notes.size() != found.class_notes.size())
        diffs.push_back({"class_notes.count", std::to_string(expected.class_notes.size()),
                         std::to_string(found.class_notes.size())});
    const std::size_t notes = std::min(expected.class_notes.size(), found.class_notes.size());
    for (std::size_t i = 0; i < notes; ++i)
        if (expected.class_notes[i] != found.class_notes[i])
            diffs.push_back({"class_notes[" + std::to_string(i) + "]", expected.class_notes[i],
                             found.class_notes[i]});
    return diffs;
}

VerifyReport verify(const MarkSheetRecord& printed, const std::vector<QrMatrix>& matrices,
                    std::span<const std::uint8_t> passphrase) {
    ttjsa::CipherText carried;
    MarkSheetRecord sealed_record;
    try {
        carried = collect_ciphertext(matrices);
        sealed_record = decrypt_and_parse(carried, passphrase);
    } catch (const UnsealError&) {
        return {Verdict::Undecodable, {}, 0.0};
    }

    VerifyReport report;
    report.field_diffs = compare_records(sealed_record, printed);
    report.verdict = report.field_diffs.empty() ? Verdict::Match : Verdict::Mismatch;
    const auto reencrypted = ttjsa::encrypt(serialize_record(printed), passphrase);
    report.histogram_distance = histogram_distance(frequency_histogram(carried.bytes),
                                                   frequency_histogram(reencrypted.bytes));
    return report;
}

std::array<std::uint64_t, 256> frequency_histogram(std::span<const std::uint8_t> bytes) {
    std::array<std::uint64_t, 256> counts{};
    for (std::uint8_t b : bytes)
        ++counts[b];
    return counts;
}

double histogram_distance(const std::array<std::uint64_t, 256>& h1,
                          const std::array<std::uint64_t, 256>& h2) {
    std::uint64_t t1 = 0, t2 = 0;
    for (int i = 0; i < 256; ++i) {
        t1 += h1[static_cast<std::size_t>(i)];
        t2 += h2[static_cast<std::size_t>(i)];
    }
    if (t1 == 0 || t2 == 0)
        throw std::invalid_argument("histogram_distance: zero-total histogram");
    double sum = 0.0;
    for (int i = 0; i < 256; ++i) {
        const double p1 = static_cast<double>(h1[static_cast<std::size_t>(i)]) / static_cast<double>(t1);
        const double p2 = static_cast<double>(h2[static_cast<std::size_t>(i)]) / static_cast<double>(t2);
        sum += p1 > p2 ? p1 - p2 : p2 - p1;
    }
    return sum / 2.0;
}

}  // namespace qrseal::docauth
