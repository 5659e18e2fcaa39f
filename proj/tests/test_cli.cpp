#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "nearnormal/gallery.hpp"
#include "nearnormal/io.hpp"

#ifndef NEARNORMAL_CLI
#error "NEARNORMAL_CLI must point at the command line tool"
#endif

namespace fs = std::filesystem;
using namespace nearnormal;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("nearnormal_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    int run(const std::string& args) const
    {
        const std::string cmd = std::string("cd '") + dir_.string() + "' && '" + NEARNORMAL_CLI + "' " +
                                args + " > '" + path("stdout.txt") + "' 2> '" + path("stderr.txt") + "'";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string slurp(const std::string& name) const
    {
        std::ifstream in(path(name), std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    void put(const std::string& name, const std::string& text) const
    {
        std::ofstream(path(name), std::ios::binary) << text;
    }

    fs::path dir_;
};

} // namespace

TEST_F(Cli, GalleryShiftWritesMatrixFile)
{
    ASSERT_EQ(run("gallery shift --m 8 -o s.json"), 0);
    const MatrixFile f = load_matrix(path("s.json"));
    EXPECT_EQ(f.matrix, shift_example(8));
    EXPECT_EQ(f.metadata.generator, "shift_example");
    EXPECT_EQ(f.metadata.config["m"], 8);
}

TEST_F(Cli, GalleryShiftOddIsUsageError)
{
    EXPECT_EQ(run("gallery shift --m 7 -o s.json"), 2);
    EXPECT_NE(slurp("stderr.txt").find("m must be even"), std::string::npos);
}

TEST_F(Cli, GalleryPairWritesTwoCertifiedFiles)
{
    ASSERT_EQ(run("gallery pair --m 16"), 0);
    const MatrixFile a = load_matrix(path("A.json"));
    const MatrixFile b = load_matrix(path("B.json"));
    EXPECT_NO_THROW(certify_almost_commuting_pair(a.matrix, b.matrix, 16));
    EXPECT_LE(b.metadata.properties["norm_bb"].get<double>(), 0.25);
    const Json report = Json::parse(slurp("stdout.txt"));
    EXPECT_EQ(report["result"]["norm_a"], 1.0);
}

TEST_F(Cli, NearestOnShift)
{
    ASSERT_EQ(run("gallery shift --m 8 -o s.json"), 0);
    ASSERT_EQ(run("nearest s.json --seed 3 -o r.json --witness w.json"), 0);
    const Json r = Json::parse(slurp("r.json"));
    EXPECT_NEAR(r["result"]["frobenius_exact"].get<double>(), std::sqrt(2.0), 1e-8);
    EXPECT_EQ(r["config"]["seed"], 3);
    EXPECT_EQ(r["artifact"]["name"], "nearnormal");
    EXPECT_LT(normality_defect(load_matrix(path("w.json")).matrix), 1e-12);
}

TEST_F(Cli, NearestOnNormalInputAndCsvInput)
{
    put("n.csv", "1,0 0\n0 0,1\n");
    ASSERT_EQ(run("nearest n.csv -o r.json"), 0);
    const Json r = Json::parse(slurp("r.json"));
    EXPECT_LT(r["result"]["frobenius_exact"].get<double>(), 1e-12);
}

TEST_F(Cli, NearestSameSeedIsByteIdentical)
{
    ASSERT_EQ(run("gallery perturbed --dim 6 --delta 0.2 --seed 4 -o p.json"), 0);
    ASSERT_EQ(run("nearest p.json --seed 9 --threads 1 -o r1.json"), 0);
    ASSERT_EQ(run("nearest p.json --seed 9 --threads 4 -o r2.json"), 0);
    EXPECT_EQ(slurp("r1.json"), slurp("r2.json"));
}

TEST_F(Cli, PartitionReportsPass)
{
    ASSERT_EQ(run("gallery normal --dim 8 --seed 2 -o n.json"), 0);
    ASSERT_EQ(run("partition n.json --side 0.1 -o r.json --approximant t.json --projections p.json"), 0);
    const Json r = Json::parse(slurp("r.json"));
    EXPECT_TRUE(r["result"]["pass"].get<bool>());
    EXPECT_LE(r["result"]["error_actual"].get<double>(), 0.2 * std::sqrt(2.0));
    EXPECT_LT(r["result"]["projection_defects"]["sum_to_identity"].get<double>(), 1e-8);
    EXPECT_TRUE(fs::exists(path("t.json")));
    EXPECT_TRUE(fs::exists(path("p.json")));
}

TEST_F(Cli, PartitionWithCoverFile)
{
    put("d.csv", "0.1 0\n0 2\n");
    put("cover.json", R"({"regions": [{"kind": "disc", "center": [0, 0], "radius": 0.5},
                                      {"kind": "square", "center": [2, 0], "side": 1}]})");
    ASSERT_EQ(run("partition d.csv --cover cover.json -o r.json"), 0);
    const Json r = Json::parse(slurp("r.json"));
    EXPECT_NEAR(r["result"]["error_actual"].get<double>(), 0.0, 1e-15);
    put("tiny.json", R"({"regions": [{"kind": "disc", "center": [0, 0], "radius": 0.5}]})");
    EXPECT_EQ(run("partition d.csv --cover tiny.json"), 3);
    EXPECT_NE(slurp("stderr.txt").find("UncoveredSpectrum"), std::string::npos);
}

TEST_F(Cli, PartitionErrors)
{
    ASSERT_EQ(run("gallery shift --m 4 -o s.json"), 0);
    EXPECT_EQ(run("partition s.json --side 0.1"), 3);
    EXPECT_NE(slurp("stderr.txt").find("NotNormal(defect="), std::string::npos);
    ASSERT_EQ(run("gallery normal --dim 3 -o n.json"), 0);
    EXPECT_EQ(run("partition n.json --side 0"), 2);
    EXPECT_EQ(run("partition n.json"), 2);
    EXPECT_EQ(run("partition n.json --side 0.1 --cover c.json"), 2);
}

TEST_F(Cli, SurgeryRemoveDisc)
{
    put("d.csv", "0 0\n0 5\n");
    ASSERT_EQ(run("surgery d.csv --op remove-disc --center 0,0 --radius 1 --anchor 0,0 --matrix-out o.json -o r.json"), 0);
    const CMatrix out = load_matrix(path("o.json")).matrix;
    CMatrix expected = CMatrix::Zero(2, 2);
    expected(0, 0) = 1.0;
    expected(1, 1) = 5.0;
    EXPECT_LT((out - expected).norm(), 1e-15);
}

TEST_F(Cli, SurgeryRemoveArcOffChord)
{
    put("d.csv", "0,0.5 0\n0 3\n");
    EXPECT_EQ(run("surgery d.csv --op remove-arc --radius 1 --minus=-1,0 --plus 1,0"), 3);
    EXPECT_NE(slurp("stderr.txt").find("SpectrumOffContour"), std::string::npos);
}

TEST_F(Cli, SurgeryGraphAndTransport)
{
    ASSERT_EQ(run("gallery normal --dim 6 --seed 5 -o n.json"), 0);
    ASSERT_EQ(run("surgery n.json --op graph --eps 0.1 -o g.json"), 0);
    const Json g = Json::parse(slurp("g.json"));
    EXPECT_LE(g["result"]["output_defect"].get<double>(), 1e-9);
    EXPECT_TRUE(g["result"]["pass"].get<bool>());
    ASSERT_EQ(run("surgery n.json --op transport --map affine --a 2 --b 0,1 -o t.json"), 0);
    ASSERT_EQ(run("surgery n.json --op transport --map radial --radius 0.5 -o t.json"), 0);
    EXPECT_EQ(run("surgery n.json --op bogus"), 2);
    EXPECT_EQ(run("surgery n.json --op graph --eps 0"), 2);
}

TEST_F(Cli, TruncateShiftSymbol)
{
    ASSERT_EQ(run("truncate --symbol shift --K 32 --lambda 4 8 12 16 -o t.csv"), 0);
    std::istringstream in(slurp("t.csv"));
    std::string line;
    int rows = 0;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0)
            continue;
        if (!header) {
            header = true;
            continue;
        }
        ++rows;
        EXPECT_NE(line.find(",true,"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 4);
    EXPECT_EQ(run("truncate --K 8 --lambda 5"), 2);
    EXPECT_EQ(run("truncate --K 8 --lambda 0"), 3);
}

TEST_F(Cli, PseudospecDiagZeroOne)
{
    put("d.csv", "0 0\n0 1\n");
    ASSERT_EQ(run("pseudospec d.csv --eps 0.1 --reference 0 --reference 1 -o p.csv"), 0);
    const std::string text = slurp("p.csv");
    const auto pos = text.find("# members: ");
    ASSERT_NE(pos, std::string::npos);
    const long members = std::stol(text.substr(pos + 11));
    const double h = 2.0 * 1.1 / 200.0;
    long expected = 0;
    for (int row = 0; row < 201; ++row)
        for (int col = 0; col < 201; ++col) {
            const Complex z(-1.1 + col * h, -1.1 + row * h);
            expected += (std::abs(z) < 0.1 || std::abs(z - 1.0) < 0.1) ? 1 : 0;
        }
    EXPECT_EQ(members, expected);
}

TEST_F(Cli, ScatterShiftRatio)
{
    std::string members;
    for (int m = 2; m <= 16; m += 2)
        members += " --member shift:m=" + std::to_string(m);
    ASSERT_EQ(run("scatter" + members + " -o s.csv"), 0);
    std::istringstream in(slurp("s.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.rfind("shift:", 0) != 0)
            continue;
        ++rows;
        const double ratio = std::stod(line.substr(line.rfind(',') + 1));
        EXPECT_NEAR(ratio, 0.5, 1e-9);
    }
    EXPECT_EQ(rows, 8);
    EXPECT_EQ(run("scatter --member blob:m=2"), 2);
}

TEST_F(Cli, ConfigFileRejectsUnknownKeysAndCommandLineWins)
{
    put("c.json", R"({"m": 6, "output": "s.json"})");
    ASSERT_EQ(run("gallery shift --config c.json"), 0);
    EXPECT_EQ(load_matrix(path("s.json")).matrix.rows(), 6);
    ASSERT_EQ(run("gallery shift --config c.json --m 4"), 0);
    EXPECT_EQ(load_matrix(path("s.json")).matrix.rows(), 4);
    put("bad.json", R"({"m": 6, "colour": "red"})");
    EXPECT_EQ(run("gallery shift --config bad.json"), 2);
    EXPECT_NE(slurp("stderr.txt").find("colour"), std::string::npos);
    put("near.json", R"({"input": "s.json", "p": ["2", "inf"], "seed": 3})");
    ASSERT_EQ(run("nearest --config near.json -o r.json"), 0);
    const Json r = Json::parse(slurp("r.json"));
    EXPECT_EQ(r["config"]["p"].size(), 2u);
}

TEST_F(Cli, UsageErrors)
{
    EXPECT_EQ(run(""), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("nearest"), 2);
    EXPECT_EQ(run("nearest missing.json"), 2);
    EXPECT_EQ(run("nearest --help"), 0);
    EXPECT_EQ(run("--version"), 0);
}
