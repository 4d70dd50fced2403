#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "gridreg/config.hpp"
#include "gridreg/image_io.hpp"
#include "gridreg/metrics.hpp"
#include "gridreg/synth.hpp"
#include "test_support.hpp"

#ifdef GRIDREG_CLI_PATH

namespace gridreg {
namespace {

using nlohmann::json;

int run(const std::string& args, const std::string& env = {}) {
    const std::string cmd = env + (env.empty() ? "" : " ") + GRIDREG_CLI_PATH + " " + args +
                            " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new test::TempDir("cli");
        save_png(make_textured_base(512, 512, 12), dir_->file("img.png"), 16);
        save_png(make_textured_base(256, 256, 13), dir_->file("small.png"));
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static std::string f(const std::string& name) { return dir_->file(name); }
    static test::TempDir* dir_;
};

test::TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, RegisterSelfIsNearIdentityAndReproducible) {
    const std::string common = "register --sar " + f("img.png") + " --ref " + f("img.png") +
                               " --descriptor baseline --iterations 2000 --seed 7";
    ASSERT_EQ(run(common + " --out " + f("r1.json")), 0);
    ASSERT_EQ(run(common + " --out " + f("r2.json"), "GRIDREG_THREADS=1"), 0);
    const std::string a = slurp(f("r1.json"));
    EXPECT_EQ(a, slurp(f("r2.json")));
    const json j = json::parse(a);
    EXPECT_EQ(j["n_grid_src"], 289);
    EXPECT_EQ(j["n_grid_ref"], 289);
    EXPECT_TRUE(j.contains("diagnostics"));
    const AffineTransform2D t = parse_transform_json(a);
    EXPECT_LE(mee(t, AffineTransform2D{}, {512, 512}, {512, 512}), 2.0);
    EXPECT_NEAR(j["l_min"].get<double>(), -289.0, 1e-4);
}

TEST_F(Cli, RegisterErrors) {
    EXPECT_EQ(run("register --sar /nonexistent.png --ref " + f("img.png")), 1);
    EXPECT_EQ(run("register --sar " + f("img.png")), 1);
    EXPECT_EQ(run("register --bogus-flag"), 1);
    std::ofstream(f("bad.json")) << R"({"stpe": 16})";
    EXPECT_EQ(run("register --sar " + f("img.png") + " --ref " + f("img.png") + " --config " +
                  f("bad.json")),
              1);
    // A single grid point cannot support a three-point sample.
    EXPECT_EQ(run("register --sar " + f("small.png") + " --ref " + f("img.png") +
                  " --iterations 10 --out " + f("none.json")),
              2);
}

TEST_F(Cli, RegisterFromConfigFile) {
    EngineConfig c;
    c.patch = 128;
    c.step = 32;
    c.iterations = 500;
    c.iter_f_g = 100;
    c.seed = 3;
    std::ofstream(f("c.json")) << to_json(c);
    ASSERT_EQ(run("register --sar " + f("img.png") + " --ref " + f("img.png") + " --config " +
                  f("c.json") + " --out " + f("c_out.json")),
              0);
    EXPECT_EQ(json::parse(slurp(f("c_out.json")))["n_grid_src"], 13 * 13);
}

TEST_F(Cli, DescriptorExportInspectAndRegister) {
    ASSERT_EQ(run("descriptors export --image " + f("img.png") + " --out " + f("img.grds") +
                  " --patch 128 --step 16"),
              0);
    ASSERT_EQ(run("descriptors inspect " + f("img.grds") + " --out " + f("inspect.json")), 0);
    const json h = json::parse(slurp(f("inspect.json")));
    EXPECT_EQ(h["n_w"], 25);
    EXPECT_EQ(h["n_h"], 25);
    EXPECT_EQ(h["patch"], 128);
    EXPECT_EQ(h["step"], 16);
    EXPECT_EQ(h["dim"], 256);
    EXPECT_NEAR(h["min_row_norm"].get<double>(), 1.0, 1e-5);
    EXPECT_NEAR(h["max_row_norm"].get<double>(), 1.0, 1e-5);

    const std::string reg = "register --desc-sar " + f("img.grds") + " --desc-ref " +
                            f("img.grds") + " --iterations 1000 --seed 2";
    ASSERT_EQ(run(reg + " --out " + f("d1.json")), 0);
    ASSERT_EQ(run(reg + " --out " + f("d2.json")), 0);
    EXPECT_EQ(slurp(f("d1.json")), slurp(f("d2.json")));
    const AffineTransform2D t = parse_transform_json(slurp(f("d1.json")));
    EXPECT_LE(mee(t, AffineTransform2D{}, {512, 512}, {512, 512}), 2.0);

    std::ofstream(f("junk.grds")) << "XXXXjunk";
    EXPECT_EQ(run("descriptors inspect " + f("junk.grds")), 1);
}

TEST_F(Cli, Eval) {
    const AffineTransform2D gt = AffineTransform2D::translation(10, 20);
    std::ofstream(f("gt.json")) << transform_to_json(gt);
    std::ofstream(f("p5.json")) << transform_to_json(AffineTransform2D::translation(3, 4).compose(gt));
    std::ofstream(f("far.json")) << transform_to_json(AffineTransform2D::translation(5000, 0));
    std::ofstream(f("broken.json")) << "{\"affine\": [[1, 0, 0]";

    const std::string dims = " --sar-dims 100x80 --ref-dims 200x200";
    ASSERT_EQ(run("eval --pred " + f("gt.json") + " --gt " + f("gt.json") + dims + " --out " +
                  f("e0.json")),
              0);
    const json e0 = json::parse(slurp(f("e0.json")));
    EXPECT_EQ(e0["mee"].get<double>(), 0.0);
    for (const char* th : {"25", "50", "75", "100"}) EXPECT_TRUE(e0["success"][th].get<bool>());

    ASSERT_EQ(run("eval --pred " + f("p5.json") + " --gt " + f("gt.json") + dims + " --out " +
                  f("e5.json")),
              0);
    EXPECT_EQ(json::parse(slurp(f("e5.json")))["mee"].get<double>(), 5.0);

    EXPECT_EQ(run("eval --pred " + f("broken.json") + " --gt " + f("gt.json") + dims), 1);
    EXPECT_EQ(run("eval --pred " + f("gt.json") + " --gt " + f("far.json") + dims), 2);
    EXPECT_EQ(run("eval --pred " + f("gt.json") + " --gt " + f("gt.json") +
                  " --sar-dims 100 --ref-dims 200x200"),
              1);
}

TEST_F(Cli, BenchSweepShapeAndDeterminism) {
    const std::string args =
        "bench --base-size 512 --levels L1 --seeds 4 --step 16,32 --iter-cap 2000"
        " --descriptor polar --config " + f("bench_cfg.json") + " --no-timing --out ";
    EngineConfig c;
    c.patch = 128;
    std::ofstream(f("bench_cfg.json")) << to_json(c);
    ASSERT_EQ(run(args + f("b1.csv")), 0);
    ASSERT_EQ(run(args + f("b2.csv"), "GRIDREG_THREADS=2"), 0);
    const std::string csv = slurp(f("b1.csv"));
    EXPECT_EQ(csv, slurp(f("b2.csv")));
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line,
              "case_id,level,seed,mee_px,success25,success50,success75,success100,wall_ms,step,beta");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        EXPECT_EQ(line.rfind("L1_s4,L1,4,", 0), 0u) << line;
    }
    EXPECT_EQ(rows, 2);
    EXPECT_EQ(run("bench --levels L7"), 1);
}

}  // namespace
}  // namespace gridreg

#endif  // GRIDREG_CLI_PATH
