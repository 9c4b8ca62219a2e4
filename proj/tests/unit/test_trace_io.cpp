// SPDX-License-Identifier: Apache-2.0

#include "mmrt/errors.hpp"
#include "mmrt/scenarios.hpp"
#include "mmrt/trace_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace mmrt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sample {
    TraceHeader header;
    std::vector<TraceResult> steps;
};

Sample lroom_sample(double gamma)
{
    auto b = make_lroom();
    b.rx = b.rx.truncated(40);
    TraceConfig cfg;
    cfg.max_reflection_order = 2;
    cfg.relative_threshold_db = gamma;
    Sample s;
    s.steps = trace_trajectory(b.scene, b.tx.position, b.rx, cfg);
    s.header.timesteps = s.steps.size();
    s.header.sample_interval_s = b.rx.sample_interval_s;
    s.header.max_reflection_order = 2;
    s.header.relative_threshold_db = gamma;
    return s;
}

void expect_same_paths(const std::vector<TraceResult>& a, const std::vector<TraceResult>& b)
{
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ASSERT_EQ(a[i].mpcs.size(), b[i].mpcs.size()) << "step " << i;
        for (std::size_t k = 0; k < a[i].mpcs.size(); ++k) {
            const auto& x = a[i].mpcs[k];
            const auto& y = b[i].mpcs[k];
            EXPECT_EQ(x.order, y.order);
            EXPECT_EQ(x.surface_ids, y.surface_ids);
            EXPECT_EQ(x.path_length_m, y.path_length_m);
            EXPECT_EQ(x.delay_s, y.delay_s);
            EXPECT_EQ(x.gain_db, y.gain_db);
            EXPECT_EQ(x.phase_rad, y.phase_rad);
            EXPECT_EQ(x.aod.azimuth_rad, y.aod.azimuth_rad);
            EXPECT_EQ(x.aod.elevation_rad, y.aod.elevation_rad);
            EXPECT_EQ(x.aoa.azimuth_rad, y.aoa.azimuth_rad);
            EXPECT_EQ(x.aoa.elevation_rad, y.aoa.elevation_rad);
        }
    }
}

std::size_t csv_error_line(const std::string& text)
{
    std::istringstream in(text);
    try {
        read_trace_csv(in);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

const char* kHeader = "# mmrt-trace v1 timesteps=2 sample_interval_s=0.005 eta_max=1 gamma_th_db=-inf "
                      "carrier_frequency_hz=6e+10\n"
                      "timestep,order,surface_ids,d_m,delay_s,gain_db,phase_rad,aod_az,aod_el,aoa_az,aoa_el\n";

} // namespace

TEST(TraceCsv, RoundTripIsExact)
{
    for (double gamma : {-kInf, -25.0}) {
        const auto s = lroom_sample(gamma);
        std::ostringstream out;
        write_trace_csv(out, s.header, s.steps);
        std::istringstream in(out.str());
        const auto back = read_trace_csv(in);
        EXPECT_EQ(back.header, s.header);
        expect_same_paths(back.steps, s.steps);

        std::ostringstream again;
        write_trace_csv(again, back.header, back.steps);
        EXPECT_EQ(again.str(), out.str());
    }
}

TEST(TraceJsonl, RoundTripIsExact)
{
    const auto s = lroom_sample(-kInf);
    std::ostringstream out;
    write_trace_jsonl(out, s.header, s.steps);
    std::istringstream in(out.str());
    const auto back = read_trace_jsonl(in);
    EXPECT_EQ(back.header, s.header);
    expect_same_paths(back.steps, s.steps);
}

TEST(TraceCsv, EmptyTimestepsSurvive)
{
    TraceHeader h;
    h.timesteps = 3;
    h.max_reflection_order = 1;
    h.relative_threshold_db = -kInf;
    std::vector<TraceResult> steps(3);
    Mpc los;
    los.path_length_m = 2.0;
    los.gain_db = -74.0;
    steps[1].mpcs.push_back(los);
    std::ostringstream out;
    write_trace_csv(out, h, steps);
    std::istringstream in(out.str());
    const auto back = read_trace_csv(in);
    ASSERT_EQ(back.steps.size(), 3u);
    EXPECT_TRUE(back.steps[0].mpcs.empty());
    EXPECT_EQ(back.steps[1].mpcs.size(), 1u);
    EXPECT_TRUE(back.steps[2].mpcs.empty());
}

TEST(TraceCsv, ErrorsCarryLineNumbers)
{
    EXPECT_EQ(csv_error_line("timestep,order\n"), 1u);
    EXPECT_EQ(csv_error_line(std::string(kHeader) + "0,0,,1,1,1,1,1,1,1\n"), 3u);
    EXPECT_EQ(csv_error_line(std::string(kHeader) + "0,0,,1,1,1,1,1,1,1,1\n5,0,,1,1,1,1,1,1,1,1\n"), 4u);
    EXPECT_EQ(csv_error_line(std::string(kHeader) + "0,1,,1,1,1,1,1,1,1,1\n"), 3u);
    EXPECT_EQ(csv_error_line(std::string(kHeader) + "0,1,3,x,1,1,1,1,1,1,1\n"), 3u);
    EXPECT_EQ(csv_error_line(std::string(kHeader) + "0,2,3|a,1,1,1,1,1,1,1,1\n"), 3u);
}

TEST(TraceFiles, FormatFollowsExtension)
{
    EXPECT_EQ(trace_format_for("a/b.trace.jsonl"), TraceFormat::JsonLines);
    EXPECT_EQ(trace_format_for("a/b.trace.csv"), TraceFormat::Csv);
    const auto s = lroom_sample(-40.0);
    const auto dir = std::filesystem::temp_directory_path();
    for (const char* name : {"mmrt_io_test.trace.csv", "mmrt_io_test.trace.jsonl"}) {
        save_trace(dir / name, s.header, s.steps);
        const auto back = load_trace(dir / name);
        expect_same_paths(back.steps, s.steps);
        std::filesystem::remove(dir / name);
    }
    EXPECT_THROW(load_trace(dir / "mmrt_does_not_exist.trace.csv"), Error);
}

TEST(SnrCsv, RoundTrip)
{
    SnrFile f;
    f.header.timesteps = 3;
    f.header.max_reflection_order = 3;
    f.header.relative_threshold_db = -25;
    f.samples = {{0, 0.0, 71.25, 12, 0.01}, {1, 0.005, -kInf, 0, 0.0}, {2, 0.01, 1.0 / 3.0, 1, 1e-7}};
    std::ostringstream out;
    write_snr_csv(out, f);
    EXPECT_NE(out.str().find("-inf"), std::string::npos);
    std::istringstream in(out.str());
    const auto back = read_snr_csv(in);
    EXPECT_EQ(back.header, f.header);
    ASSERT_EQ(back.samples.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.samples[i].snr_db, f.samples[i].snr_db);
        EXPECT_EQ(back.samples[i].num_mpcs, f.samples[i].num_mpcs);
        EXPECT_EQ(back.samples[i].sigma1, f.samples[i].sigma1);
    }
}

TEST(SnrCsv, Errors)
{
    std::istringstream missing("timestep,time_s,snr_db,num_mpcs,sigma1\n");
    EXPECT_THROW(read_snr_csv(missing), ParseError);
    std::istringstream short_file("# mmrt-snr v1 timesteps=2 sample_interval_s=0.005 eta_max=1 gamma_th_db=-inf "
                                  "carrier_frequency_hz=6e+10\ntimestep,time_s,snr_db,num_mpcs,sigma1\n"
                                  "0,0,50,1,0.1\n");
    EXPECT_THROW(read_snr_csv(short_file), ParseError);
}

TEST(Threshold, Formatting)
{
    EXPECT_EQ(format_threshold(-kInf), "-inf");
    EXPECT_EQ(format_threshold(-40.0), "-40");
    EXPECT_EQ(format_threshold(-2.5), "-2.5");
}
