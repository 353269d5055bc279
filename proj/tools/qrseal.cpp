// qrseal — seal mark-sheet records into QR code images and verify printed
// copies against them.
//
// Exit codes: 0 success or verified match, 1 verify mismatch,
// 2 input/format error, 3 undecodable images or decrypt failure.

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "qrseal/bitstream.hpp"
#include "qrseal/docauth.hpp"
#include "qrseal/errors.hpp"
#include "qrseal/imageio.hpp"
#include "qrseal/matrix.hpp"

namespace {

using namespace qrseal;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;
constexpr int kExitUndecodable = 3;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open " + path);
    std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                    std::istreambuf_iterator<char>()};
    if (in.bad())
        throw std::invalid_argument("cannot read " + path);
    return bytes;
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::invalid_argument("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw std::invalid_argument("cannot write " + path);
}

std::vector<std::uint8_t> key_bytes(const std::string& key) {
    return {key.begin(), key.end()};
}

docauth::MarkSheetRecord load_record(const std::string& path) {
    return docauth::parse_record(read_file(path));
}

std::vector<QrMatrix> load_images(const std::vector<std::string>& paths) {
    std::vector<QrMatrix> matrices;
    matrices.reserve(paths.size());
    for (const auto& p : paths)
        matrices.push_back(imageio::parse_bitmap(read_file(p)));
    return matrices;
}

std::string format_distance(double d) {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(6);
    out << d;
    return out.str();
}

int cmd_seal(const std::string& record_path, const std::string& key, const std::string& prefix,
             bool png, int scale) {
    const auto record = load_record(record_path);
    const auto matrices = docauth::seal(record, key_bytes(key));
    const imageio::RenderOptions opts{scale, 4};
    for (std::size_t i = 0; i < matrices.size(); ++i) {
        const std::string path =
            prefix + "-" + std::to_string(i + 1) + (png ? ".png" : ".pbm");
        write_file(path, png ? imageio::render_png(matrices[i], opts)
                             : imageio::render_pbm(matrices[i], opts));
        std::cout << path << "\n";
    }
    return kExitOk;
}

int cmd_unseal(const std::string& key, const std::string& out_path,
               const std::vector<std::string>& images) {
    const auto record = docauth::unseal(load_images(images), key_bytes(key));
    write_file(out_path, docauth::serialize_record(record));
    return kExitOk;
}

// "subjects[1].marks" names the row by index; add the code from the printed
// record so the report reads without counting lines.
std::string subject_hint(const docauth::MarkSheetRecord& printed, const std::string& path) {
    if (!path.starts_with("subjects[") || path.ends_with(".code"))
        return {};
    const auto close = path.find(']');
    if (close == std::string::npos)
        return {};
    const std::size_t index = std::stoul(path.substr(9, close - 9));
    if (index >= printed.subjects.size())
        return {};
    return " (" + printed.subjects[index].code + ")";
}

int cmd_verify(const std::string& record_path, const std::string& key,
               const std::vector<std::string>& images) {
    const auto printed = load_record(record_path);
    const auto report = docauth::verify(printed, load_images(images), key_bytes(key));

    switch (report.verdict) {
    case docauth::Verdict::Match:
        std::cout << "verdict: match\n";
        std::cout << "histogram distance: " << format_distance(report.histogram_distance)
                  << "\n";
        return kExitOk;
    case docauth::Verdict::Mismatch:
        std::cout << "verdict: mismatch\n";
        for (const auto& d : report.field_diffs)
            std::cout << "  " << d.field_path << subject_hint(printed, d.field_path)
                      << ": sealed \"" << d.expected << "\", printed \"" << d.found << "\"\n";
        std::cout << "histogram distance: " << format_distance(report.histogram_distance)
                  << "\n";
        return kExitMismatch;
    case docauth::Verdict::Undecodable:
    default:
        std::cout << "verdict: undecodable\n";
        std::cout << "the images could not be decoded with the given key\n";
        return kExitUndecodable;
    }
}

int cmd_inspect(const std::string& image_path) {
    const auto matrix = imageio::parse_bitmap(read_file(image_path));
    const auto decoded = decode_matrix(matrix);
    std::cout << "version: " << decoded.version << "\n";
    std::cout << "ec level: " << ec_level_letter(decoded.level) << "\n";
    std::cout << "mask: " << decoded.mask_id << "\n";
    std::cout << "codewords: " << decoded.codewords.size() << "\n";
    return kExitOk;
}

int cmd_freq(const std::string& in_path, const std::string& compare_path) {
    const auto h1 = docauth::frequency_histogram(read_file(in_path));
    if (compare_path.empty()) {
        for (int i = 0; i < 256; ++i)
            std::cout << i << "," << h1[static_cast<std::size_t>(i)] << "\n";
        return kExitOk;
    }
    const auto h2 = docauth::frequency_histogram(read_file(compare_path));
    for (int i = 0; i < 256; ++i)
        std::cout << i << "," << h1[static_cast<std::size_t>(i)] << ","
                  << h2[static_cast<std::size_t>(i)] << "\n";
    std::cout << "distance," << format_distance(docauth::histogram_distance(h1, h2)) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seal records into QR code images and verify printed copies"};
    app.require_subcommand(1);

    std::string record_path, key, out, compare_path;
    std::vector<std::string> images;
    bool png = false;
    int scale = 1;

    auto* seal = app.add_subcommand("seal", "Encrypt a record file into QR code images");
    seal->add_option("--record", record_path, "record file to seal")->required();
    seal->add_option("--key", key, "passphrase")->required();
    seal->add_option("--out", out, "output prefix (writes PREFIX-1.pbm ...)")->required();
    seal->add_flag("--png", png, "write PNG instead of PBM");
    seal->add_option("--scale", scale, "pixels per module")->check(CLI::PositiveNumber);

    auto* unseal = app.add_subcommand("unseal", "Reconstruct the record file from images");
    unseal->add_option("--key", key, "passphrase")->required();
    unseal->add_option("--out", out, "output record file")->required();
    unseal->add_option("images", images, "QR code images (PBM)")->required();

    auto* verify = app.add_subcommand("verify", "Check a printed record against its images");
    verify->add_option("--record", record_path, "printed record file")->required();
    verify->add_option("--key", key, "passphrase")->required();
    verify->add_option("images", images, "QR code images (PBM)")->required();

    auto* inspect = app.add_subcommand("inspect", "Print symbol parameters of one image");
    inspect->add_option("image", record_path, "QR code image (PBM)")->required();

    auto* freq = app.add_subcommand("freq", "Print a byte-frequency histogram");
    freq->add_option("--in", record_path, "input file")->required();
    freq->add_option("--compare", compare_path, "second file to compare against");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitInput;
    }

    try {
        if (seal->parsed())
            return cmd_seal(record_path, key, out, png, scale);
        if (unseal->parsed())
            return cmd_unseal(key, out, images);
        if (verify->parsed())
            return cmd_verify(record_path, key, images);
        if (inspect->parsed())
            return cmd_inspect(record_path);
        if (freq->parsed())
            return cmd_freq(record_path, compare_path);
        std::cerr << app.help();
        return kExitInput;
    } catch (const UnsealError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUndecodable;
    } catch (const DecodeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUndecodable;
    } catch (const UnrecoverableBlockError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUndecodable;
    } catch (const std::exception& e) {
        // remaining failures are bad inputs: unreadable files, malformed
        // records or bitmaps, oversized payloads, invalid options
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}
