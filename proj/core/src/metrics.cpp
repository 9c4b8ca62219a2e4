// SPDX-License-Identifier: Apache-2.0

#include "mmrt/metrics.hpp"

#include "mmrt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mmrt {

NrmseResult nrmse_detailed(const std::vector<double>& baseline, const std::vector<double>& test)
{
    if (baseline.size() != test.size())
        throw MetricsError("NRMSE series length mismatch (" + std::to_string(baseline.size()) + " vs " +
                           std::to_string(test.size()) + ")");
    NrmseResult r;
    double sum = 0.0;
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        const bool fb = std::isfinite(baseline[i]);
        const bool ft = std::isfinite(test[i]);
        if (fb && ft) {
            ++r.compared;
            sum += baseline[i];
        } else if (fb != ft) {
            ++r.outage_mismatch_count;
        }
    }
    if (r.compared == 0)
        throw MetricsError("NRMSE has no timestep where both series are finite");

    const double n = static_cast<double>(r.compared);
    const double mean = sum / n;
    double var = 0.0;
    double sq_err = 0.0;
    for (std::size_t i = 0; i < baseline.size(); ++i) {
        if (!std::isfinite(baseline[i]) || !std::isfinite(test[i]))
            continue;
        var += (baseline[i] - mean) * (baseline[i] - mean);
        sq_err += (baseline[i] - test[i]) * (baseline[i] - test[i]);
    }
    const double sigma = std::sqrt(var / n);
    if (!(sigma > 0.0))
        throw MetricsError("degenerate baseline: SNR standard deviation is zero");
    r.nrmse = std::sqrt(sq_err / n) / sigma;
    return r;
}

double nrmse(const std::vector<double>& baseline, const std::vector<double>& test)
{
    return nrmse_detailed(baseline, test).nrmse;
}

SnrCdf snr_cdf(const std::vector<double>& series)
{
    SnrCdf cdf;
    if (series.empty())
        return cdf;
    std::vector<double> finite;
    finite.reserve(series.size());
    for (double v : series)
        if (std::isfinite(v))
            finite.push_back(v);
    std::sort(finite.begin(), finite.end());

    const double total = static_cast<double>(series.size());
    cdf.outage_probability = static_cast<double>(series.size() - finite.size()) / total;
    for (std::size_t i = 0; i < finite.size(); ++i) {
        // One step per distinct value, at the last occurrence.
        if (i + 1 < finite.size() && finite[i + 1] == finite[i])
            continue;
        cdf.points.push_back({finite[i], static_cast<double>(i + 1) / total});
    }
    return cdf;
}

double campaign_speedup(const CampaignReport& baseline, const CampaignReport& test, std::size_t n_runs)
{
    if (n_runs < 1)
        throw MetricsError("n_runs must be >= 1");
    for (double t : {baseline.t_rt_s, baseline.t_ns_s, test.t_rt_s, test.t_ns_s})
        if (!(t > 0.0) || !std::isfinite(t))
            throw MetricsError("campaign times must be positive");
    const double n = static_cast<double>(n_runs);
    return (baseline.t_rt_s + n * baseline.t_ns_s) / (test.t_rt_s + n * test.t_ns_s);
}

ComparisonReport compare_campaigns(const CampaignReport& baseline, const CampaignReport& test, std::size_t n_runs)
{
    const auto acc = nrmse_detailed(baseline.snr_db, test.snr_db);
    ComparisonReport r;
    r.nrmse = acc.nrmse;
    r.outage_mismatch_count = acc.outage_mismatch_count;
    r.n_runs = n_runs;
    r.speedup = campaign_speedup(baseline, test, n_runs);
    return r;
}

std::vector<TradeoffRow> tradeoff_table(const std::vector<CampaignReport>& reports, std::size_t baseline_index,
                                        std::size_t n_runs)
{
    if (baseline_index >= reports.size())
        throw MetricsError("baseline campaign not found among the reports");
    const auto& base = reports[baseline_index];
    std::vector<TradeoffRow> rows;
    rows.reserve(reports.size());
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        TradeoffRow row;
        row.max_reflection_order = r.config.max_reflection_order;
        row.relative_threshold_db = r.config.relative_threshold_db;
        row.total_mpcs = std::accumulate(r.mpc_counts.begin(), r.mpc_counts.end(), std::size_t{0});
        if (i == baseline_index) {
            // Exact by definition, and well-defined even for a constant baseline.
            row.nrmse = 0.0;
            row.speedup = 1.0;
        } else {
            const auto c = compare_campaigns(base, r, n_runs);
            row.nrmse = c.nrmse;
            row.speedup = c.speedup;
            row.outage_mismatch_count = c.outage_mismatch_count;
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace mmrt
