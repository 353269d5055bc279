#pragma once

#include <stdexcept>
#include <string>

namespace qrseal {

// Payload does not fit the selected QR profile.
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Module grid that cannot be decoded (unsupported size, damaged format info, ...).
class DecodeError : public std::runtime_error {
public:
    explicit DecodeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Reed-Solomon block with more errors than the code can correct.
class UnrecoverableBlockError : public std::runtime_error {
public:
    explicit UnrecoverableBlockError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bitmap bytes that do not parse back into a module grid.
class ImageParseError : public std::runtime_error {
public:
    explicit ImageParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Record text that violates the canonical format. line is 1-based.
class RecordParseError : public std::runtime_error {
public:
    RecordParseError(int line_no, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
    int line;
};

// Failure while reconstructing a record from QR matrices.
class UnsealError : public std::runtime_error {
public:
    enum class Stage { Decode, Framing, Decrypt, RecordParse };
    UnsealError(Stage s, const std::string& msg) : std::runtime_error(msg), stage(s) {}
    Stage stage;
};

}  // namespace qrseal
