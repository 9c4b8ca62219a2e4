// SPDX-License-Identifier: Apache-2.0
//
// Batch front-end behind the `mmrt` tool: scenario export, tracing over an
// (eta_max, gamma_th) grid, SNR evaluation and campaign comparison. Every
// command is a plain function so tests can drive it without a subprocess.

#pragma once

#include "mmrt/channel.hpp"
#include "mmrt/metrics.hpp"
#include "mmrt/scenarios.hpp"
#include "mmrt/trace_io.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mmrt::cli {

// Bad flags or inconsistent configuration; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

struct CampaignConfig {
    std::string scene = "lroom"; // file path or builtin scenario name
    std::string trajectory;      // empty: builtin or <scene stem>.traj
    std::optional<Point3> tx_position_m;
    std::vector<int> eta_max{4};
    std::vector<double> gamma_th_db{-std::numeric_limits<double>::infinity()};
    std::optional<int> baseline_eta_max;
    std::optional<double> baseline_gamma_th_db;
    LinkBudget link;
    ArrayConfig tx_array{8, 8};
    ArrayConfig rx_array{4, 4};
    std::filesystem::path out_dir = "out";
    unsigned workers = 1;
    std::optional<std::size_t> samples;
    std::size_t n_runs = 1000;
    std::uint64_t seed = 0; // reserved: the tracer is deterministic
    std::string trace_format = "csv"; // csv | jsonl

    // Throws UsageError on empty grids, a baseline outside the grid product
    // or invalid link/array parameters.
    void validate() const;
    int effective_baseline_eta() const;
    double effective_baseline_gamma() const;
    TraceConfig trace_config(int eta, double gamma) const;

    nlohmann::ordered_json to_json() const;
    static CampaignConfig from_json(const nlohmann::json& j);

    bool operator==(const CampaignConfig&) const;
};

CampaignConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const CampaignConfig& cfg);

// Parses "8x8" style array sizes.
ArrayConfig parse_array_size(const std::string& s, const ArrayConfig& base = {});

struct ResolvedInputs {
    Scene scene;
    Point3 tx;
    Trajectory rx;
};

ResolvedInputs resolve_inputs(const CampaignConfig& cfg);

std::string cell_stem(int eta, double gamma_db);

struct ScenarioFiles {
    std::filesystem::path scene, trajectory, tx;
    std::size_t triangles = 0;
    std::size_t samples = 0;
};

ScenarioFiles cmd_scenario(const std::string& name, const std::filesystem::path& out_dir,
                           std::optional<std::size_t> samples = std::nullopt);

struct TraceCell {
    int eta_max = 0;
    double gamma_th_db = 0.0;
    std::filesystem::path trace_path;
    std::filesystem::path timing_path;
    double t_rt_s = 0.0;
    std::uint64_t candidates = 0;
    std::uint64_t mpcs = 0;
};

// One trace file per grid cell plus `config.json` with the effective config.
std::vector<TraceCell> cmd_trace(const CampaignConfig& cfg);

struct SnrRun {
    std::filesystem::path snr_path;
    double t_ns_s = 0.0;
    SnrFile snr;
};

// Evaluates every timestep of a trace; evaluation time is merged into the
// cell's timing sidecar.
SnrRun cmd_snr(const std::filesystem::path& trace_path, const LinkBudget& link, const ArrayConfig& tx_array,
               const ArrayConfig& rx_array, std::optional<std::filesystem::path> out_path = std::nullopt);

// Evaluates a trace in memory; the building block of cmd_snr.
SnrFile evaluate_snr(const TraceFile& trace, const LinkBudget& link, const ArrayConfig& tx_array,
                     const ArrayConfig& rx_array);

// Reads an SNR series and its timing sidecar.
CampaignReport load_campaign_report(const std::filesystem::path& snr_path);

struct CompareResult {
    std::vector<TradeoffRow> rows;
    std::vector<ComparisonReport> comparisons; // one per test, in order
    std::filesystem::path table_path;
};

CompareResult cmd_compare(const std::filesystem::path& baseline_snr, const std::vector<std::filesystem::path>& test_snrs,
                          std::size_t n_runs, const std::filesystem::path& table_path);

// Same as above over every *.snr.csv in a directory; the baseline is the
// file for (baseline_eta, baseline_gamma).
CompareResult cmd_compare_dir(const std::filesystem::path& dir, int baseline_eta, double baseline_gamma,
                              std::size_t n_runs, const std::filesystem::path& table_path);

struct BenchRow {
    int eta_max = 0;
    double gamma_th_db = 0.0;
    double median_t_rt_s = 0.0;
    double min_t_rt_s = 0.0;
    double max_t_rt_s = 0.0;
    std::uint64_t candidates = 0;
    std::uint64_t mpcs = 0;
};

// Traces every grid cell `repeats` times (no files written except the
// optional CSV summary).
std::vector<BenchRow> cmd_bench(const CampaignConfig& cfg, int repeats,
                                std::optional<std::filesystem::path> out_csv = std::nullopt);

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows);

// Entry point used by main(); returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace mmrt::cli
