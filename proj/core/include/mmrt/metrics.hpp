// SPDX-License-Identifier: Apache-2.0
//
// Accuracy and cost metrics for comparing a simplified tracing campaign with
// a baseline: SNR NRMSE, empirical SNR CDFs and the total-campaign speedup
// T_TOT = T_RT + n_runs * T_NS.

#pragma once

#include "mmrt/tracer.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mmrt {

struct CampaignReport {
    TraceConfig config;
    std::vector<double> snr_db;          // one entry per timestep, -inf on outage
    std::vector<std::size_t> mpc_counts; // one entry per timestep
    double t_rt_s = 0.0;                 // tracer wall-clock
    double t_ns_s = 0.0;                 // channel + SNR evaluation wall-clock
};

struct NrmseResult {
    double nrmse = 0.0;
    std::size_t compared = 0;              // timesteps finite in both series
    std::size_t outage_mismatch_count = 0; // timesteps in outage in exactly one series
};

// RMSE(baseline, test) / std(baseline), in dB, over timesteps where both
// values are finite; population standard deviation on that same support.
// Throws MetricsError on length mismatch, an empty common support or a
// constant baseline.
NrmseResult nrmse_detailed(const std::vector<double>& baseline, const std::vector<double>& test);
double nrmse(const std::vector<double>& baseline, const std::vector<double>& test);

struct CdfPoint {
    double snr_db;
    double probability; // P(SNR <= snr_db) over all samples, outages included in the denominator
};

struct SnrCdf {
    std::vector<CdfPoint> points;
    double outage_probability = 0.0;
};

SnrCdf snr_cdf(const std::vector<double>& series);

// (T_RT_base + n*T_NS_base) / (T_RT_test + n*T_NS_test).
double campaign_speedup(const CampaignReport& baseline, const CampaignReport& test, std::size_t n_runs);

struct ComparisonReport {
    double nrmse = 0.0;
    double speedup = 1.0;
    std::size_t n_runs = 1;
    std::size_t outage_mismatch_count = 0;
};

ComparisonReport compare_campaigns(const CampaignReport& baseline, const CampaignReport& test, std::size_t n_runs);

struct TradeoffRow {
    int max_reflection_order = 0;
    double relative_threshold_db = 0.0;
    double nrmse = 0.0;
    double speedup = 1.0;
    std::size_t outage_mismatch_count = 0;
    std::size_t total_mpcs = 0;
};

// One row per report, in input order. Throws MetricsError if baseline_index
// is out of range.
std::vector<TradeoffRow> tradeoff_table(const std::vector<CampaignReport>& reports, std::size_t baseline_index,
                                        std::size_t n_runs);

} // namespace mmrt
