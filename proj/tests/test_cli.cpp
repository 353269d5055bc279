#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qrseal/docauth.hpp"
#include "qrseal/imageio.hpp"
#include "qrseal/matrix.hpp"

namespace fs = std::filesystem;
using namespace qrseal;

namespace {

struct RunResult {
    int code = -1;
    std::string out;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QRSEAL_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0)
        r.out.append(buf, n);
    const int status = pclose(pipe);
    REQUIRE(WIFEXITED(status));
    r.code = WEXITSTATUS(status);
    return r;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "qrseal_cli_XXXXXX").string();
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        path = tmpl;
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string sample_record_path() {
    return std::string(TESTS_DATA_DIR) + "/sample_record.txt";
}

std::vector<std::uint8_t> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    REQUIRE(out.good());
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

// seal the sample record into dir and return the written image paths
std::vector<std::string> seal_sample(const TempDir& dir, const std::string& key,
                                     const std::string& extra = "") {
    const auto r = run_cli("seal --record " + sample_record_path() + " --key \"" + key +
                           "\" --out " + dir.file("code") + extra);
    REQUIRE(r.code == 0);
    const auto paths = lines_of(r.out);
    REQUIRE(!paths.empty());
    for (const auto& p : paths)
        REQUIRE(fs::exists(p));
    return paths;
}

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts)
        out += " " + p;
    return out;
}

}  // namespace

TEST_CASE("seal writes numbered images and unseal reconstructs the record") {
    TempDir dir;
    const auto paths = seal_sample(dir, "secret pass");
    REQUIRE(paths.size() == 2);
    CHECK(paths[0] == dir.file("code-1.pbm"));
    CHECK(paths[1] == dir.file("code-2.pbm"));

    const auto r = run_cli("unseal --key \"secret pass\" --out " + dir.file("back.txt") +
                           join(paths));
    CHECK(r.code == 0);
    CHECK(slurp(dir.file("back.txt")) == slurp(sample_record_path()));
}

TEST_CASE("unseal accepts the images in any order") {
    TempDir dir;
    auto paths = seal_sample(dir, "k1");
    std::reverse(paths.begin(), paths.end());
    const auto r = run_cli("unseal --key k1 --out " + dir.file("back.txt") + join(paths));
    CHECK(r.code == 0);
    CHECK(slurp(dir.file("back.txt")) == slurp(sample_record_path()));
}

TEST_CASE("verify reports a match with exit code 0") {
    TempDir dir;
    const auto paths = seal_sample(dir, "k2");
    const auto r = run_cli("verify --record " + sample_record_path() + " --key k2" + join(paths));
    CHECK(r.code == 0);
    CHECK(r.out.find("verdict: match") != std::string::npos);
    CHECK(r.out.find("histogram distance: 0.000000") != std::string::npos);
}

TEST_CASE("verify pinpoints an edited mark with exit code 1") {
    TempDir dir;
    const auto paths = seal_sample(dir, "k3");

    auto text = std::string(reinterpret_cast<const char*>(slurp(sample_record_path()).data()),
                            slurp(sample_record_path()).size());
    const auto pos = text.find("SUBJ CMSA3151 45 50");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 19, "SUBJ CMSA3151 44 50");
    spit(dir.file("tampered.txt"), text);

    const auto r = run_cli("verify --record " + dir.file("tampered.txt") + " --key k3" +
                           join(paths));
    CHECK(r.code == 1);
    CHECK(r.out.find("verdict: mismatch") != std::string::npos);
    CHECK(r.out.find("subjects[1].marks") != std::string::npos);
    CHECK(r.out.find("CMSA3151") != std::string::npos);
    CHECK(r.out.find("sealed \"45\", printed \"44\"") != std::string::npos);
    CHECK(r.out.find("histogram distance: 0.000000") == std::string::npos);
}

TEST_CASE("verify with the wrong key is undecodable with exit code 3") {
    TempDir dir;
    const auto paths = seal_sample(dir, "right key");
    const auto r = run_cli("verify --record " + sample_record_path() + " --key wrong" +
                           join(paths));
    CHECK(r.code == 3);
    CHECK(r.out.find("verdict: undecodable") != std::string::npos);
}

TEST_CASE("unseal with a part missing fails with exit code 3") {
    TempDir dir;
    const auto paths = seal_sample(dir, "k4");
    const auto r = run_cli("unseal --key k4 --out " + dir.file("back.txt") + " " + paths[0]);
    CHECK(r.code == 3);
}

TEST_CASE("unseal of a corrupted symbol fails with exit code 3") {
    TempDir dir;
    const auto paths = seal_sample(dir, "k5");

    // flip a block of data modules well past the correction capacity
    auto m = imageio::parse_bitmap(slurp(paths[0]));
    for (int r = 33; r < 48; ++r)
        for (int c = 33; c < 48; ++c)
            m.set_module(r, c, !m.module(r, c));
    std::ofstream out(paths[0], std::ios::binary | std::ios::trunc);
    const auto img = imageio::render_pbm(m, {1, 4});
    out.write(reinterpret_cast<const char*>(img.data()), static_cast<std::streamsize>(img.size()));
    out.close();

    const auto r = run_cli("unseal --key k5 --out " + dir.file("back.txt") + join(paths));
    CHECK(r.code == 3);
}

TEST_CASE("inspect prints the symbol parameters") {
    TempDir dir;
    const auto paths = seal_sample(dir, "k6");
    const auto r = run_cli("inspect " + paths[0]);
    CHECK(r.code == 0);
    CHECK(r.out.find("version: 10") != std::string::npos);
    CHECK(r.out.find("ec level: L") != std::string::npos);
    CHECK(r.out.find("mask: ") != std::string::npos);
    CHECK(r.out.find("codewords: 346") != std::string::npos);
}

TEST_CASE("freq prints one row per byte value") {
    TempDir dir;
    spit(dir.file("blob.bin"), std::string("aaab"));
    const auto r = run_cli("freq --in " + dir.file("blob.bin"));
    CHECK(r.code == 0);
    const auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 256);
    CHECK(rows[static_cast<std::size_t>('a')] == std::to_string(int('a')) + ",3");
    CHECK(rows[static_cast<std::size_t>('b')] == std::to_string(int('b')) + ",1");
    CHECK(rows[0] == "0,0");
    CHECK(rows[255] == "255,0");
}

TEST_CASE("freq --compare appends the normalized distance") {
    TempDir dir;
    spit(dir.file("a.bin"), "aaaa");
    spit(dir.file("b.bin"), "bbbb");

    auto r = run_cli("freq --in " + dir.file("a.bin") + " --compare " + dir.file("a.bin"));
    CHECK(r.code == 0);
    auto rows = lines_of(r.out);
    REQUIRE(rows.size() == 257);
    CHECK(rows[static_cast<std::size_t>('a')] == std::to_string(int('a')) + ",4,4");
    CHECK(rows[256] == "distance,0.000000");

    r = run_cli("freq --in " + dir.file("a.bin") + " --compare " + dir.file("b.bin"));
    CHECK(r.code == 0);
    rows = lines_of(r.out);
    CHECK(rows[256] == "distance,1.000000");
}

TEST_CASE("identical invocations write byte-identical files") {
    TempDir one, two;
    const auto a = seal_sample(one, "same key");
    const auto b = seal_sample(two, "same key");
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(slurp(a[i]) == slurp(b[i]));
}

TEST_CASE("seal --png writes PNG files and --scale enlarges modules") {
    TempDir dir;
    const auto pngs = seal_sample(dir, "k7", " --png");
    CHECK(pngs[0] == dir.file("code-1.png"));
    const auto bytes = slurp(pngs[0]);
    REQUIRE(bytes.size() > 8);
    CHECK(bytes[0] == 0x89);
    CHECK(bytes[1] == 'P');

    const auto small = seal_sample(dir, "k7");
    TempDir big_dir;
    const auto big = seal_sample(big_dir, "k7", " --scale 3");
    CHECK(slurp(big[0]).size() > slurp(small[0]).size());

    // scale inference makes the enlarged rendering unseal identically
    const auto r = run_cli("unseal --key k7 --out " + big_dir.file("back.txt") + join(big));
    CHECK(r.code == 0);
    CHECK(slurp(big_dir.file("back.txt")) == slurp(sample_record_path()));
}

TEST_CASE("bad invocations exit with code 2 and a usage message") {
    TempDir dir;
    auto r = run_cli("seal --record x --key k --out y --bogus");
    CHECK(r.code == 2);
    CHECK(r.out.find("Usage") != std::string::npos);

    r = run_cli("frobnicate");
    CHECK(r.code == 2);

    r = run_cli("seal --record x");
    CHECK(r.code == 2);

    r = run_cli("");
    CHECK(r.code == 2);
}

TEST_CASE("bad inputs exit with code 2") {
    TempDir dir;
    auto r = run_cli("seal --record " + dir.file("missing.txt") + " --key k --out " +
                     dir.file("o"));
    CHECK(r.code == 2);
    CHECK(r.out.find("error") != std::string::npos);

    spit(dir.file("broken.txt"), "NOT A RECORD\n");
    r = run_cli("seal --record " + dir.file("broken.txt") + " --key k --out " + dir.file("o"));
    CHECK(r.code == 2);

    spit(dir.file("junk.pbm"), "P1 garbage");
    r = run_cli("inspect " + dir.file("junk.pbm"));
    CHECK(r.code == 2);

    r = run_cli("seal --record " + sample_record_path() + " --key \"\" --out " + dir.file("o"));
    CHECK(r.code == 2);

    r = run_cli("seal --record " + sample_record_path() + " --key k --out " + dir.file("o") +
                " --scale 0");
    CHECK(r.code == 2);

    r = run_cli("freq --in " + dir.file("missing.bin"));
    CHECK(r.code == 2);
}

TEST_CASE("--help exits 0") {
    const auto r = run_cli("--help");
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
    CHECK(r.out.find("seal") != std::string::npos);
}
