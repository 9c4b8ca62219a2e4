// SPDX-License-Identifier: Apache-2.0

#include "campaign.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace mmrt;
using namespace mmrt::cli;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cli {
    std::string out, err;

    int operator()(std::vector<std::string> args)
    {
        args.insert(args.begin(), "mmrt");
        std::vector<char*> argv;
        for (auto& a : args)
            argv.push_back(a.data());
        std::ostringstream o, e;
        const int rc = run(static_cast<int>(argv.size()), argv.data(), o, e);
        out = o.str();
        err = e.str();
        return rc;
    }
};

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("mmrt-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST(Config, JsonRoundTrip)
{
    CampaignConfig c;
    c.scene = "indoor1";
    c.eta_max = {1, 2};
    c.gamma_th_db = {-kInf, -20.0};
    c.baseline_eta_max = 2;
    c.tx_position_m = Point3{1, 2, 3};
    c.samples = 77;
    c.tx_array = parse_array_size("4x2");
    c.trace_format = "jsonl";
    const auto back = CampaignConfig::from_json(nlohmann::json::parse(c.to_json().dump()));
    EXPECT_EQ(back, c);
    EXPECT_EQ(back.tx_array.rows, 4);
    EXPECT_EQ(back.tx_array.cols, 2);
    EXPECT_EQ(back.gamma_th_db[0], -kInf);
}

TEST(Config, Validation)
{
    CampaignConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.effective_baseline_eta(), 4);
    EXPECT_EQ(c.effective_baseline_gamma(), -kInf);
    c.baseline_eta_max = 5;
    EXPECT_THROW(c.validate(), UsageError);
    c = CampaignConfig{};
    c.gamma_th_db = {3.0};
    EXPECT_THROW(c.validate(), UsageError);
    c = CampaignConfig{};
    c.eta_max.clear();
    EXPECT_THROW(c.validate(), UsageError);
    EXPECT_THROW(parse_array_size("8by8"), UsageError);
    EXPECT_THROW(parse_array_size("0x8"), UsageError);
    EXPECT_EQ(cell_stem(2, -40), "eta2_gamma-40");
    EXPECT_EQ(cell_stem(4, -kInf), "eta4_gamma-inf");
}

TEST_F(CliTest, UsageErrorsExitOne)
{
    Cli cli;
    EXPECT_EQ(cli({}), kExitUsage);
    EXPECT_EQ(cli({"frobnicate"}), kExitUsage);
    EXPECT_EQ(cli({"trace", "--eta-max"}), kExitUsage);
    EXPECT_EQ(cli({"trace", "--gamma-th-db", "loud"}), kExitUsage);
    EXPECT_EQ(cli({"trace", "--scene", "no-such-place", "--out-dir", path("o")}), kExitUsage);
    EXPECT_EQ(cli({"scenario", "atrium"}), kExitUsage);
    EXPECT_EQ(cli({"snr"}), kExitUsage);
    EXPECT_EQ(cli({"compare", "--baseline", path("x.snr.csv")}), kExitUsage);
    EXPECT_NE(cli.err.find("error"), std::string::npos);
    EXPECT_EQ(cli({"--help"}), kExitOk);
}

TEST_F(CliTest, DataErrorsExitTwo)
{
    Cli cli;
    std::ofstream(path("bad.scene")) << "materials 1\nm 10\ntriangles 1\n0 0 0 1 0 0 0 1 0 4\n";
    save_position(path("bad.tx"), {0, 0, 1});
    std::ofstream(path("bad.traj")) << "dt 0.005\n1 1 1\n";
    EXPECT_EQ(cli({"trace", "--scene", path("bad.scene"), "--out-dir", path("o")}), kExitData);
    EXPECT_NE(cli.err.find("bad.scene:4"), std::string::npos);
    std::ofstream(path("broken.trace.csv")) << "hello\n";
    EXPECT_EQ(cli({"snr", "--trace", path("broken.trace.csv")}), kExitData);
}

TEST_F(CliTest, ScenarioFilesLoadBack)
{
    Cli cli;
    ASSERT_EQ(cli({"scenario", "lroom", "--out-dir", path("s"), "--samples", "50"}), kExitOk) << cli.err;
    const auto scene = load_scene(path("s/lroom.scene"));
    EXPECT_EQ(scene, make_lroom().scene);
    EXPECT_EQ(load_trajectory(path("s/lroom.traj")).size(), 50u);
    EXPECT_EQ(load_position(path("s/lroom.tx")), make_lroom().tx.position);
}

TEST_F(CliTest, FullPipeline)
{
    Cli cli;
    ASSERT_EQ(cli({"scenario", "lroom", "--out-dir", path("s"), "--samples", "60"}), kExitOk);
    ASSERT_EQ(cli({"trace", "--scene", path("s/lroom.scene"), "--eta-max", "1", "--eta-max", "2", "--gamma-th-db",
                   "-inf", "--gamma-th-db", "-30", "--out-dir", path("o"), "--workers", "2"}),
              kExitOk)
        << cli.err;
    for (const char* stem : {"eta1_gamma-inf", "eta1_gamma-30", "eta2_gamma-inf", "eta2_gamma-30"}) {
        EXPECT_TRUE(fs::exists(path(std::string("o/") + stem + ".trace.csv"))) << stem;
        EXPECT_TRUE(fs::exists(path(std::string("o/") + stem + ".timing.json"))) << stem;
    }
    const auto cfg = load_config(path("o/config.json"));
    EXPECT_EQ(cfg.eta_max, (std::vector<int>{1, 2}));
    EXPECT_EQ(cfg.gamma_th_db[0], -kInf);

    ASSERT_EQ(cli({"snr", "--dir", path("o")}), kExitOk) << cli.err;
    const auto snr = load_snr(path("o/eta2_gamma-inf.snr.csv"));
    EXPECT_EQ(snr.samples.size(), 60u);
    EXPECT_EQ(snr.header.max_reflection_order, 2);
    const auto timing = nlohmann::json::parse(slurp(path("o/eta2_gamma-inf.timing.json")));
    EXPECT_TRUE(timing.contains("t_rt_s"));
    EXPECT_TRUE(timing.contains("t_ns_s"));

    ASSERT_EQ(cli({"compare", "--dir", path("o"), "--baseline-eta", "2", "--baseline-gamma-db=-inf", "--n-runs",
                   "100"}),
              kExitOk)
        << cli.err;
    const auto table = slurp(path("o/tradeoff.csv"));
    EXPECT_EQ(table.rfind("eta_max,gamma_th_db,nrmse,outage_mismatch,total_mpcs,speedup\n2,-inf,0,0,", 0), 0u)
        << table;
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);

    ASSERT_EQ(cli({"compare", "--baseline", path("o/eta2_gamma-inf.snr.csv"), "--test",
                   path("o/eta1_gamma-30.snr.csv"), "--out", path("pair.csv")}),
              kExitOk);
    EXPECT_NE(cli.out.find("nrmse="), std::string::npos);
    EXPECT_EQ(cli({"compare", "--dir", path("o"), "--baseline-eta", "3"}), kExitUsage);
}

TEST_F(CliTest, SpaceSeparatedNegativeInfinity)
{
    Cli cli;
    ASSERT_EQ(cli({"trace", "--scene", "lroom", "--samples", "5", "--eta-max", "1", "--gamma-th-db", "-inf",
                   "--gamma-th-db", "-12.5", "--out-dir", path("o")}),
              kExitOk)
        << cli.err;
    EXPECT_TRUE(fs::exists(path("o/eta1_gamma-inf.trace.csv")));
    EXPECT_TRUE(fs::exists(path("o/eta1_gamma-12.5.trace.csv")));
}

TEST_F(CliTest, ConfigFileAndJsonlTraces)
{
    Cli cli;
    CampaignConfig c;
    c.scene = "indoor1";
    c.samples = 10;
    c.eta_max = {1};
    c.gamma_th_db = {-kInf};
    c.trace_format = "jsonl";
    c.out_dir = path("o");
    save_config(path("campaign.json"), c);
    ASSERT_EQ(cli({"trace", "--config", path("campaign.json")}), kExitOk) << cli.err;
    ASSERT_TRUE(fs::exists(path("o/eta1_gamma-inf.trace.jsonl")));
    ASSERT_EQ(cli({"snr", "--trace", path("o/eta1_gamma-inf.trace.jsonl"), "--rx-array", "2x2"}), kExitOk);
    EXPECT_EQ(load_snr(path("o/eta1_gamma-inf.snr.csv")).samples.size(), 10u);
}

TEST_F(CliTest, Bench)
{
    Cli cli;
    ASSERT_EQ(cli({"bench", "--scene", "lroom", "--samples", "20", "--eta-max", "1", "--eta-max", "2", "--repeats",
                   "2", "--csv", path("bench.csv")}),
              kExitOk)
        << cli.err;
    const auto csv = slurp(path("bench.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
    EXPECT_NE(csv.find("\n2,-inf,"), std::string::npos);
}

TEST_F(CliTest, TraceCellEqualsDirectCall)
{
    Scene corridor;
    corridor.materials = {{"wall", 10}};
    Triangle a, b;
    a.vertices = {Point3{0, 0, 0}, Point3{20, 0, 0}, Point3{0, 0, 3}};
    b.vertices = {Point3{0, 2, 0}, Point3{0, 2, 3}, Point3{20, 2, 0}};
    b.id = 1;
    corridor.triangles = {a, b};
    save_scene(path("corridor.scene"), corridor);
    Trajectory t;
    for (int i = 0; i < 30; ++i)
        t.positions.push_back({2.0 + 0.1 * i, 1.0, 1.0});
    save_trajectory(path("corridor.traj"), t);

    CampaignConfig c;
    c.scene = path("corridor.scene");
    c.tx_position_m = Point3{1, 1.5, 1.5};
    c.eta_max = {1};
    c.gamma_th_db = {-kInf};
    c.out_dir = path("o");
    const auto cells = cmd_trace(c);
    ASSERT_EQ(cells.size(), 1u);

    TraceConfig tc;
    tc.max_reflection_order = 1;
    const auto direct = trace_trajectory(corridor, {1, 1.5, 1.5}, t, tc);
    TraceHeader h;
    h.timesteps = direct.size();
    h.sample_interval_s = t.sample_interval_s;
    h.max_reflection_order = 1;
    h.relative_threshold_db = -kInf;
    std::ostringstream expected;
    write_trace_csv(expected, h, direct);
    EXPECT_EQ(slurp(cells[0].trace_path), expected.str());

    // Effective config reparses to the campaign definition.
    auto back = load_config(path("o/config.json"));
    back.out_dir = c.out_dir;
    back.workers = c.workers;
    EXPECT_EQ(back, c);
}

TEST_F(CliTest, ScalarArraysLoseExactlyTheArrayGain)
{
    TraceHeader h;
    h.timesteps = 3;
    h.max_reflection_order = 0;
    h.relative_threshold_db = -kInf;
    std::vector<TraceResult> steps(3);
    steps[0] = trace_timestep(Scene{}, {0, 0, 0}, {0, 1, 0}, TraceConfig{});
    steps[2] = trace_timestep(Scene{}, {0, 0, 0}, {0, 3, 0}, TraceConfig{});
    save_trace(path("los.trace.csv"), h, steps);
    std::ofstream(path("los.timing.json")) << R"({"t_rt_s": 0.5})";

    const auto big = cmd_snr(path("los.trace.csv"), LinkBudget{}, ArrayConfig{8, 8}, ArrayConfig{4, 4},
                             fs::path(path("big.snr.csv")));
    const auto one = cmd_snr(path("los.trace.csv"), LinkBudget{}, ArrayConfig{1, 1}, ArrayConfig{1, 1},
                             fs::path(path("one.snr.csv")));
    const double hand = 30.0 + 20.0 * std::log10(kSpeedOfLight / 60e9 / (4.0 * std::numbers::pi)) +
                        10.0 * std::log10(1024.0) - (-174.0 + 10.0 * std::log10(400e6) + 5.0);
    EXPECT_NEAR(big.snr.samples[0].snr_db, hand, 1e-9);
    EXPECT_NEAR(big.snr.samples[0].snr_db, 75.08, 0.01);
    EXPECT_NEAR(big.snr.samples[0].snr_db - one.snr.samples[0].snr_db, 10.0 * std::log10(1024.0), 1e-9);
    EXPECT_TRUE(std::isinf(big.snr.samples[1].snr_db));
    EXPECT_NE(slurp(path("big.snr.csv")).find("\n1,0.005,-inf,0,0\n"), std::string::npos);

    Cli cli;
    EXPECT_EQ(cli({"compare", "--baseline", path("big.snr.csv"), "--test", path("big.snr.csv")}), kExitOk) << cli.err;
    EXPECT_NE(cli.out.find("nrmse=0 speedup=1 "), std::string::npos) << cli.out;
    EXPECT_TRUE(fs::exists(path("tradeoff.csv")));
}

TEST(Campaign, WorkingPointAccuracy)
{
    auto b = make_lroom();
    b.rx = b.rx.truncated(500);
    const PreparedScene ps(b.scene);
    auto series = [&](int eta, double gamma) {
        TraceConfig tc;
        tc.max_reflection_order = eta;
        tc.relative_threshold_db = gamma;
        TraceFile tf;
        tf.header.timesteps = b.rx.size();
        tf.steps = trace_trajectory(ps, b.tx.position, b.rx, tc);
        CampaignReport r;
        for (const auto& s : evaluate_snr(tf, LinkBudget{}, ArrayConfig{8, 8}, ArrayConfig{4, 4}).samples)
            r.snr_db.push_back(s.snr_db);
        r.t_rt_s = eta;
        r.t_ns_s = 0.01;
        return r;
    };
    const auto base = series(4, -kInf);
    const auto work = series(2, -40.0);
    const auto one = compare_campaigns(base, work, 1);
    const auto many = compare_campaigns(base, work, 1000);
    EXPECT_LT(one.nrmse, 0.01);
    EXPECT_EQ(one.nrmse, many.nrmse);
    EXPECT_NE(one.speedup, many.speedup);
}
