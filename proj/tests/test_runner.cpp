#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mirrorsim/runner.hpp"

using namespace mirrorsim;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = MIRRORSIM_CORPUS_DIR;

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mirrorsim_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("format list parsing") {
    RunConfig c;
    CHECK(parse_formats("svg", c));
    CHECK(c.svg);
    CHECK_FALSE(c.csv);
    CHECK_FALSE(c.text);
    CHECK(parse_formats("csv,text,svg", c));
    CHECK((c.csv && c.text && c.svg));
    CHECK_FALSE(parse_formats("csv,pdf", c));
}

TEST_CASE("run writes the sweep CSV with one row per point") {
    const auto out = scratch("basic");
    RunConfig cfg;
    cfg.input = kCorpus / "basic_cm.cir";
    cfg.output_dir = out;
    std::ostringstream err;
    const auto r = run(cfg, err);
    REQUIRE(r.exit_code == kExitOk);
    CHECK(err.str().empty());
    std::ifstream csv(out / "basic_cm.dc.csv");
    REQUIRE(csv.good());
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    CHECK(line.rfind("axis,", 0) == 0);
    CHECK(line.find("Ic(Q2)") != std::string::npos);
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 101);
    CHECK(fs::exists(out / "basic_cm.op.txt"));
    CHECK(fs::exists(out / "basic_cm.power.txt"));
}

TEST_CASE("CSV output is byte-for-byte deterministic") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& dir : {a, b}) {
        RunConfig cfg;
        cfg.input = kCorpus / "widlar.cir";
        cfg.output_dir = dir;
        std::ostringstream err;
        REQUIRE(run(cfg, err).exit_code == kExitOk);
    }
    CHECK(slurp(a / "widlar.tran.csv") == slurp(b / "widlar.tran.csv"));
    CHECK(slurp(a / "widlar.four.txt") == slurp(b / "widlar.four.txt"));
}

TEST_CASE("svg format produces plots including the memristor loop") {
    const auto out = scratch("svg");
    RunConfig cfg;
    cfg.input = kCorpus / "memristor_sine.cir";
    cfg.output_dir = out;
    REQUIRE(parse_formats("svg", cfg));
    std::ostringstream err;
    REQUIRE(run(cfg, err).exit_code == kExitOk);
    CHECK(fs::exists(out / "memristor_sine.tran.svg"));
    CHECK(slurp(out / "memristor_sine.tran.iv.svg").find("<polyline") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "memristor_sine.tran.csv"));
}

TEST_CASE("parse errors exit 1 with a located diagnostic and no files") {
    const auto out = scratch("parse");
    const auto bad = out / "bad.cir";
    std::ofstream(bad) << "bad\nV1 a 0 DC 1\nR1 a 0 1x%\n.op\n";
    RunConfig cfg;
    cfg.input = bad;
    cfg.output_dir = out / "results";
    std::ostringstream err;
    const auto r = run(cfg, err);
    CHECK(r.exit_code == kExitParse);
    CHECK(r.files.empty());
    CHECK(err.str().find("bad.cir:3:") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "results"));
}

TEST_CASE("a .four signal that does not exist is a parse error") {
    const auto out = scratch("four");
    const auto bad = out / "four.cir";
    std::ofstream(bad) << "four\nV1 a 0 SIN(0 1 1k)\nR1 a 0 1k\n.tran 10u 2m\n.four 1k V(zz)\n";
    RunConfig cfg;
    cfg.input = bad;
    cfg.output_dir = out;
    std::ostringstream err;
    CHECK(run(cfg, err).exit_code == kExitParse);
}

TEST_CASE("missing input exits 3") {
    RunConfig cfg;
    cfg.input = "/nonexistent/none.cir";
    std::ostringstream err;
    CHECK(run(cfg, err).exit_code == kExitIo);
}

TEST_CASE("an unsolvable circuit exits 2") {
    const auto out = scratch("conv");
    const auto bad = out / "island.cir";
    std::ofstream(bad) << "island\nV1 a 0 DC 1\nR1 a 0 1k\nR2 b c 1k\nR3 c b 1k\n.op\n";
    RunConfig cfg;
    cfg.input = bad;
    cfg.output_dir = out / "results";
    std::ostringstream err;
    CHECK(run(cfg, err).exit_code == kExitConvergence);
    CHECK_FALSE(fs::exists(out / "results"));
}

TEST_CASE("comparing a file with itself is equal") {
    std::ostringstream err;
    const auto thd = compare(kCorpus / "widlar.cir", kCorpus / "widlar.cir", Metric::Thd, err);
    CHECK(thd.exit_code == kExitOk);
    CHECK(thd.verdict == "equal");
    CHECK(thd.table.find("A:widlar.cir") != std::string::npos);
    const auto pw = compare(kCorpus / "basic_cm.cir", kCorpus / "basic_cm.cir", Metric::Power, err);
    CHECK(pw.verdict == "equal");
}

TEST_CASE("memristor variant has lower THD and power") {
    std::ostringstream err;
    const auto a = kCorpus / "widlar.cir", b = kCorpus / "widlar_mem.cir";
    const auto thd = compare(a, b, Metric::Thd, err);
    REQUIRE(thd.exit_code == kExitOk);
    CHECK(thd.verdict == "widlar_mem.cir < widlar.cir");
    CHECK(thd.table.find("verdict: widlar_mem.cir < widlar.cir") != std::string::npos);
    const auto pw = compare(a, b, Metric::Power, err);
    CHECK(pw.verdict == "widlar_mem.cir < widlar.cir");
}

TEST_CASE("THD compare without .four exits 2") {
    std::ostringstream err;
    const auto r = compare(kCorpus / "basic_cm.cir", kCorpus / "widlar.cir", Metric::Thd, err);
    CHECK(r.exit_code == kExitConvergence);
    CHECK(err.str().find("basic_cm.cir") != std::string::npos);
}
