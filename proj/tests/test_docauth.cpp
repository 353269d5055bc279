#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "qrseal/docauth.hpp"
#include "qrseal/errors.hpp"

using namespace qrseal;
using namespace qrseal::docauth;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) {
    return {s.begin(), s.end()};
}

std::vector<std::uint8_t> key() {
    return bytes_of("marksheet sealing passphrase");
}

MarkSheetRecord sample_record() {
    MarkSheetRecord r;
    r.institution = "ABC College (Autonomous)";
    r.affiliation = "University of XXXXX";
    r.programme = "COMPUTER Sc. (HONS.)";
    r.semester = "1st";
    r.year = "20XX";
    r.candidate_name = "DEF";
    r.roll = "0-00-00-0002";
    r.registration = "A00-0000-0000-02";
    r.session = "NOV - DEC 20XX";
    r.subjects = {{"CMSA3101", 70, 100},
                  {"CMSA3151", 45, 50},
                  {"MBNG1101", 40, 50},
                  {"MTMG2101", 50, 75},
                  {"PHSG2101", 35, 50}};
    r.class_notes = {"1ST CLASS : 60%", "2nd CLASS : 40%"};
    return r;
}

MarkSheetRecord original_record() {
    MarkSheetRecord r = sample_record();
    r.candidate_name = "XYZ";
    r.roll = "0-00-00-0001";
    r.registration = "A00-0000-0000-01";
    r.subjects = {{"CMSA3101", 66, 100},
                  {"CMSA3151", 43, 50},
                  {"MBNG1101", 30, 50},
                  {"MTMG2101", 50, 75},
                  {"PHSG2101", 28, 50}};
    return r;
}

MarkSheetRecord tampered_record() {
    MarkSheetRecord r = original_record();
    r.subjects[1].marks = 45;  // the one-subject alteration under test
    return r;
}

MarkSheetRecord minimal_record() {
    MarkSheetRecord r;
    r.roll = "1";
    r.registration = "2";
    return r;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string text_of(const std::vector<std::uint8_t>& bytes) {
    return {bytes.begin(), bytes.end()};
}

}  // namespace

TEST_CASE("canonical serialization matches the golden file") {
    const auto golden = read_file(std::string(TESTS_DATA_DIR) + "/sample_record.txt");
    CHECK(serialize_record(sample_record()) == golden);
    CHECK(parse_record(golden) == sample_record());
}

TEST_CASE("records round-trip through the canonical form") {
    std::vector<MarkSheetRecord> records{sample_record(), original_record(), tampered_record(),
                                         minimal_record()};

    MarkSheetRecord tricky = minimal_record();
    tricky.institution = "line one\nline two";
    tricky.affiliation = "back\\slash";
    tricky.session = "trailing backslash \\";
    tricky.class_notes = {"", "note with\nbreak", "plain"};
    records.push_back(tricky);

    MarkSheetRecord no_subjects = sample_record();
    no_subjects.subjects.clear();
    no_subjects.class_notes.clear();
    records.push_back(no_subjects);

    for (const auto& r : records)
        CHECK(parse_record(serialize_record(r)) == r);
}

TEST_CASE("escaped values keep the format line-oriented") {
    MarkSheetRecord r = minimal_record();
    r.institution = "A\nB";
    r.class_notes = {"x\\y\nz"};
    const auto bytes = serialize_record(r);
    const std::string text = text_of(bytes);
    CHECK(std::count(text.begin(), text.end(), '\n') == 10);  // 9 scalars + 1 note
    CHECK(text.find("INSTITUTION: A\\nB\n") != std::string::npos);
    CHECK(text.find("NOTE x\\\\y\\nz\n") != std::string::npos);
}

TEST_CASE("serialization is injective on look-alike records") {
    MarkSheetRecord a = minimal_record();
    a.institution = "X\nAFFILIATION: Y";
    MarkSheetRecord b = minimal_record();
    b.institution = "X";
    b.affiliation = "Y";
    CHECK(serialize_record(a) != serialize_record(b));

    MarkSheetRecord one_note = minimal_record();
    one_note.class_notes = {"a\nb"};
    MarkSheetRecord two_notes = minimal_record();
    two_notes.class_notes = {"a", "b"};
    CHECK(serialize_record(one_note) != serialize_record(two_notes));
}

TEST_CASE("serializer rejects invalid records") {
    MarkSheetRecord no_roll = minimal_record();
    no_roll.roll.clear();
    CHECK_THROWS_AS(serialize_record(no_roll), std::invalid_argument);

    MarkSheetRecord bad_marks = minimal_record();
    bad_marks.subjects = {{"X", 70, 50}};
    CHECK_THROWS_AS(serialize_record(bad_marks), std::invalid_argument);

    MarkSheetRecord negative = minimal_record();
    negative.subjects = {{"X", -1, 50}};
    CHECK_THROWS_AS(serialize_record(negative), std::invalid_argument);

    MarkSheetRecord spaced_code = minimal_record();
    spaced_code.subjects = {{"A B", 1, 2}};
    CHECK_THROWS_AS(serialize_record(spaced_code), std::invalid_argument);

    MarkSheetRecord empty_code = minimal_record();
    empty_code.subjects = {{"", 1, 2}};
    CHECK_THROWS_AS(serialize_record(empty_code), std::invalid_argument);
}

TEST_CASE("parser rejects malformed input and names the line") {
    auto parse_text = [](const std::string& s) { return parse_record(bytes_of(s)); };

    CHECK_THROWS_AS(parse_text(""), RecordParseError);

    const std::string golden = text_of(read_file(std::string(TESTS_DATA_DIR) + "/sample_record.txt"));

    // truncated after the fifth line
    std::string truncated;
    int newlines = 0;
    for (char c : golden) {
        truncated += c;
        if (c == '\n' && ++newlines == 5)
            break;
    }
    CHECK_THROWS_AS(parse_text(truncated), RecordParseError);

    // out-of-order header
    std::string swapped = golden;
    swapped.replace(0, 11, "AFFILIATION");
    CHECK_THROWS_AS(parse_text(swapped), RecordParseError);

    // unknown key
    CHECK_THROWS_AS(parse_text("MYSTERY: x\n" + golden), RecordParseError);

    // marks above maximum, reported with its line number
    try {
        parse_text(golden + "SUBJ X 70 50\n");
        FAIL("expected a parse error");
    } catch (const RecordParseError& e) {
        CHECK(e.line == 17);
        CHECK(std::string(e.what()).find("line 17:") == 0);
    }

    CHECK_THROWS_AS(parse_text(golden + "SUBJ X 7\n"), RecordParseError);
    CHECK_THROWS_AS(parse_text(golden + "SUBJ X 7a 50\n"), RecordParseError);
    CHECK_THROWS_AS(parse_text(golden + "SUBJ X 99999999999999999999 1\n"), RecordParseError);
    CHECK_THROWS_AS(parse_text(golden + "NOTE late\nSUBJ X 1 2\n"), RecordParseError);
    CHECK_THROWS_AS(parse_text(golden + "stray line\n"), RecordParseError);

    // broken escapes inside a value
    std::string dangling = golden;
    dangling.replace(dangling.find("0-00-00-0002"), 12, "0-00-00-000\\");
    CHECK_THROWS_AS(parse_text(dangling), RecordParseError);
    std::string unknown_escape = golden;
    unknown_escape.replace(unknown_escape.find("0-00-00-0002"), 12, "0-00-00-00\\q");
    CHECK_THROWS_AS(parse_text(unknown_escape), RecordParseError);
}

TEST_CASE("payload framing has a fixed big-endian layout") {
    SealedPayload part{2, 3, 0x01020304, {0xAA, 0xBB}};
    const std::vector<std::uint8_t> expected{'Q', 'S', 'L', '1', 0, 2, 0, 3,
                                             1,   2,   3,   4,   0xAA, 0xBB};
    CHECK(encode_payload(part) == expected);
    CHECK(decode_payload(expected) == part);
}

TEST_CASE("payload codec round-trips and validates") {
    std::mt19937 rng(64);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 30; ++trial) {
        SealedPayload part;
        part.part_count = static_cast<std::uint16_t>(1 + trial * 17 % 400);
        part.part_index = static_cast<std::uint16_t>(1 + trial % part.part_count);
        part.original_length = static_cast<std::uint32_t>(rng());
        part.body.resize(static_cast<std::size_t>(trial * 7 % 300));
        for (auto& b : part.body)
            b = static_cast<std::uint8_t>(byte(rng));
        CHECK(decode_payload(encode_payload(part)) == part);
    }

    CHECK_THROWS_AS(encode_payload(SealedPayload{0, 1, 0, {}}), std::invalid_argument);
    CHECK_THROWS_AS(encode_payload(SealedPayload{3, 2, 0, {}}), std::invalid_argument);

    CHECK_THROWS_AS(decode_payload(std::vector<std::uint8_t>(11, 0)), UnsealError);
    auto bad_magic = encode_payload(SealedPayload{1, 1, 4, {1, 2, 3}});
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_payload(bad_magic), UnsealError);
    auto zero_index = encode_payload(SealedPayload{1, 1, 4, {1, 2, 3}});
    zero_index[5] = 0;
    CHECK_THROWS_AS(decode_payload(zero_index), UnsealError);
}

TEST_CASE("sealing a full record produces two linked version-10 codes") {
    const auto record = sample_record();
    const auto matrices = seal(record, key());
    REQUIRE(matrices.size() == 2);

    const auto cipher = ttjsa::encrypt(serialize_record(record), key());
    std::vector<std::uint8_t> bodies;
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        CHECK(matrices[i].version == 10);
        CHECK(matrices[i].level == EcLevel::L);
        const auto part = extract_payload(matrices[i]);
        CHECK(part.part_index == i + 1);
        CHECK(part.part_count == 2);
        CHECK(part.original_length == cipher.original_length);
        bodies.insert(bodies.end(), part.body.begin(), part.body.end());
    }
    CHECK(bodies == cipher.bytes);

    const auto collected = collect_ciphertext(matrices);
    CHECK(collected.bytes == cipher.bytes);
    CHECK(collected.original_length == cipher.original_length);
}

TEST_CASE("a minimal record still needs one version-10 code") {
    const auto matrices = seal(minimal_record(), key());
    REQUIRE(matrices.size() == 1);
    CHECK(matrices[0].version == 10);
    const auto part = extract_payload(matrices[0]);
    CHECK(part.part_index == 1);
    CHECK(part.part_count == 1);
}

TEST_CASE("oversized records split into consecutive parts") {
    MarkSheetRecord r = minimal_record();
    r.class_notes = {std::string(1500, 'x')};
    const auto matrices = seal(r, key());
    REQUIRE(matrices.size() >= 5);
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        const auto part = extract_payload(matrices[i]);
        CHECK(part.part_index == i + 1);
        CHECK(part.part_count == matrices.size());
    }
    CHECK(unseal(matrices, key()) == r);
}

TEST_CASE("unseal restores the record regardless of part order") {
    const auto record = sample_record();
    auto matrices = seal(record, key());
    CHECK(unseal(matrices, key()) == record);
    std::reverse(matrices.begin(), matrices.end());
    CHECK(unseal(matrices, key()) == record);
}

TEST_CASE("unseal reports the failing stage") {
    const auto record = sample_record();
    const auto matrices = seal(record, key());
    REQUIRE(matrices.size() == 2);

    try {
        unseal({matrices[0]}, key());
        FAIL("expected a missing-part failure");
    } catch (const UnsealError& e) {
        CHECK(e.stage == UnsealError::Stage::Framing);
    }

    try {
        unseal({matrices[0], matrices[0]}, key());
        FAIL("expected a duplicate-part failure");
    } catch (const UnsealError& e) {
        CHECK(e.stage == UnsealError::Stage::Framing);
    }

    try {
        unseal({}, key());
        FAIL("expected an empty-input failure");
    } catch (const UnsealError& e) {
        CHECK(e.stage == UnsealError::Stage::Framing);
    }

    try {
        unseal(matrices, bytes_of("not the sealing key"));
        FAIL("expected a wrong-key failure");
    } catch (const UnsealError& e) {
        CHECK(e.stage == UnsealError::Stage::RecordParse);
    }
}

TEST_CASE("verify matches an untouched printed copy") {
    const auto record = original_record();
    const auto matrices = seal(record, key());
    const auto report = verify(record, matrices, key());
    CHECK(report.verdict == Verdict::Match);
    CHECK(report.field_diffs.empty());
    CHECK(report.histogram_distance == 0.0);
}

TEST_CASE("verify pinpoints a single altered subject mark") {
    const auto matrices = seal(original_record(), key());
    const auto report = verify(tampered_record(), matrices, key());
    REQUIRE(report.verdict == Verdict::Mismatch);
    REQUIRE(report.field_diffs.size() == 1);
    CHECK(report.field_diffs[0].field_path == "subjects[1].marks");
    CHECK(report.field_diffs[0].expected == "43");
    CHECK(report.field_diffs[0].found == "45");
    CHECK(report.histogram_distance > 0.0);
}

TEST_CASE("verify lists every tampered field") {
    const auto matrices = seal(original_record(), key());

    MarkSheetRecord doctored = original_record();
    doctored.candidate_name = "ZZZ";
    doctored.subjects[4].marks = 40;
    const auto report = verify(doctored, matrices, key());
    REQUIRE(report.verdict == Verdict::Mismatch);
    REQUIRE(report.field_diffs.size() == 2);
    CHECK(report.field_diffs[0].field_path == "candidate_name");
    CHECK(report.field_diffs[1].field_path == "subjects[4].marks");

    MarkSheetRecord shrunk = original_record();
    shrunk.subjects.pop_back();
    const auto count_report = verify(shrunk, matrices, key());
    REQUIRE(count_report.verdict == Verdict::Mismatch);
    CHECK(count_report.field_diffs[0].field_path == "subjects.count");
    CHECK(count_report.field_diffs[0].expected == "5");
    CHECK(count_report.field_diffs[0].found == "4");
}

TEST_CASE("every single-field tamper is flagged alone") {
    const auto record = original_record();
    const auto matrices = seal(record, key());

    const std::vector<std::pair<std::string, void (*)(MarkSheetRecord&)>> tampers{
        {"institution", [](MarkSheetRecord& r) { r.institution += "?"; }},
        {"affiliation", [](MarkSheetRecord& r) { r.affiliation += "?"; }},
        {"programme", [](MarkSheetRecord& r) { r.programme += "?"; }},
        {"semester", [](MarkSheetRecord& r) { r.semester += "?"; }},
        {"year", [](MarkSheetRecord& r) { r.year += "?"; }},
        {"candidate_name", [](MarkSheetRecord& r) { r.candidate_name += "?"; }},
        {"roll", [](MarkSheetRecord& r) { r.roll += "?"; }},
        {"registration", [](MarkSheetRecord& r) { r.registration += "?"; }},
        {"session", [](MarkSheetRecord& r) { r.session += "?"; }},
        {"subjects[0].code", [](MarkSheetRecord& r) { r.subjects[0].code = "CMSA3102"; }},
        {"subjects[2].marks", [](MarkSheetRecord& r) { r.subjects[2].marks = 31; }},
        {"subjects[3].max_marks", [](MarkSheetRecord& r) { r.subjects[3].max_marks = 80; }},
        {"class_notes[0]", [](MarkSheetRecord& r) { r.class_notes[0] = "altered"; }},
    };
    for (const auto& [path, apply] : tampers) {
        MarkSheetRecord copy = record;
        apply(copy);
        const auto report = verify(copy, matrices, key());
        REQUIRE(report.verdict == Verdict::Mismatch);
        REQUIRE(report.field_diffs.size() == 1);
        CHECK(report.field_diffs[0].field_path == path);
    }
}

TEST_CASE("verify degrades to undecodable") {
    const auto record = original_record();
    const auto matrices = seal(record, key());

    auto wrong_key = verify(record, matrices, bytes_of("some other key"));
    CHECK(wrong_key.verdict == Verdict::Undecodable);
    CHECK(wrong_key.field_diffs.empty());

    auto missing = verify(record, {}, key());
    CHECK(missing.verdict == Verdict::Undecodable);
}

TEST_CASE("random records survive seal and unseal") {
    std::mt19937 rng(7321);
    std::uniform_int_distribution<int> marks(0, 100);
    std::uniform_int_distribution<int> subject_count(0, 8);
    std::uniform_int_distribution<int> text_len(0, 40);
    std::uniform_int_distribution<int> letter('A', 'Z');

    auto random_text = [&](int min_len = 0) {
        const int n = std::max(min_len, text_len(rng));
        std::string s;
        for (int i = 0; i < n; ++i)
            s += static_cast<char>(letter(rng));
        return s;
    };

    for (int trial = 0; trial < 25; ++trial) {
        MarkSheetRecord r;
        r.institution = random_text();
        r.affiliation = random_text();
        r.programme = random_text();
        r.semester = random_text();
        r.year = random_text();
        r.candidate_name = random_text();
        r.roll = random_text(1);
        r.registration = random_text(1);
        r.session = random_text();
        const int n_subj = subject_count(rng);
        for (int s = 0; s < n_subj; ++s) {
            const int max = 1 + marks(rng);
            r.subjects.push_back({random_text(4), marks(rng) % (max + 1), max});
        }
        if (trial % 3 == 0)
            r.class_notes = {random_text(), random_text()};

        auto pass = bytes_of("trial key " + std::to_string(trial));
        REQUIRE(unseal(seal(r, pass), pass) == r);
    }
}

TEST_CASE("frequency histogram basics") {
    auto zero = frequency_histogram({});
    for (auto c : zero)
        CHECK(c == 0);

    auto aaa = frequency_histogram(bytes_of("AAA"));
    CHECK(aaa[65] == 3);
    std::uint64_t total = 0;
    for (auto c : aaa)
        total += c;
    CHECK(total == 3);

    std::mt19937 rng(4141);
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> a(300), b(500);
    for (auto& x : a)
        x = static_cast<std::uint8_t>(byte(rng));
    for (auto& x : b)
        x = static_cast<std::uint8_t>(byte(rng));
    auto ha = frequency_histogram(a);
    auto hb = frequency_histogram(b);
    std::vector<std::uint8_t> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    auto hab = frequency_histogram(ab);
    for (int i = 0; i < 256; ++i)
        REQUIRE(hab[static_cast<std::size_t>(i)] ==
                ha[static_cast<std::size_t>(i)] + hb[static_cast<std::size_t>(i)]);
}

TEST_CASE("histogram distance is a normalized L1 metric") {
    auto ha = frequency_histogram(bytes_of("AAAA"));
    auto hb = frequency_histogram(bytes_of("BBBB"));
    CHECK(histogram_distance(ha, ha) == 0.0);
    CHECK(histogram_distance(ha, hb) == 1.0);

    auto hc = frequency_histogram(bytes_of("AABB"));
    CHECK(histogram_distance(ha, hc) == doctest::Approx(0.5));
    CHECK(histogram_distance(hc, ha) == doctest::Approx(0.5));

    std::array<std::uint64_t, 256> empty{};
    CHECK_THROWS_AS(histogram_distance(ha, empty), std::invalid_argument);
}
