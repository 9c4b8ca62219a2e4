// SPDX-License-Identifier: Apache-2.0

#include "campaign.hpp"

#include "mmrt/errors.hpp"
#include "mmrt/text.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace mmrt::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double elapsed_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ordered_json threshold_json(double g)
{
    if (std::isfinite(g))
        return g;
    return format_threshold(g);
}

double threshold_from_json(const json& j)
{
    if (j.is_number())
        return j.get<double>();
    if (j.is_string()) {
        if (const auto v = text::parse_double(j.get<std::string>()))
            return *v;
    }
    throw UsageError("invalid threshold value in config: " + j.dump());
}

double parse_threshold(const std::string& s)
{
    const auto v = text::parse_double(s);
    if (!v || std::isnan(*v))
        throw UsageError("invalid threshold '" + s + "' (expected dB value or -inf)");
    return *v;
}

Point3 parse_point(const std::string& s)
{
    auto f = text::split(s, ',');
    if (f.size() != 3)
        f = text::split_ws(s);
    if (f.size() != 3)
        throw UsageError("expected 'x,y,z', got '" + s + "'");
    Point3 p;
    double* dst[3] = {&p.x, &p.y, &p.z};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto v = text::parse_double(f[i]);
        if (!v || !std::isfinite(*v))
            throw UsageError("invalid coordinate in '" + s + "'");
        *dst[i] = *v;
    }
    return p;
}

ordered_json vec_json(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }
Vec3 vec_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

ordered_json array_json(const ArrayConfig& a)
{
    ordered_json j;
    j["rows"] = a.rows;
    j["cols"] = a.cols;
    j["element_spacing_wavelengths"] = a.element_spacing_wavelengths;
    j["boresight"] = vec_json(a.boresight);
    j["up"] = vec_json(a.up);
    return j;
}

ArrayConfig array_from_json(const json& j, const ArrayConfig& base)
{
    ArrayConfig a = base;
    if (j.is_string())
        return parse_array_size(j.get<std::string>(), base);
    a.rows = j.value("rows", a.rows);
    a.cols = j.value("cols", a.cols);
    a.element_spacing_wavelengths = j.value("element_spacing_wavelengths", a.element_spacing_wavelengths);
    if (j.contains("boresight"))
        a.boresight = vec_from_json(j["boresight"]);
    if (j.contains("up"))
        a.up = vec_from_json(j["up"]);
    return a;
}

fs::path sibling_with(const fs::path& p, const std::string& suffix)
{
    return p.parent_path() / (p.stem().string() + suffix);
}

// "<cell>.snr.csv" -> "<cell>"; other names lose their last extension.
fs::path cell_base(const fs::path& p)
{
    const std::string name = p.filename().string();
    for (const char* suffix : {".trace.csv", ".trace.jsonl", ".snr.csv"}) {
        const std::string s(suffix);
        if (name.size() > s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0)
            return p.parent_path() / name.substr(0, name.size() - s.size());
    }
    return p.parent_path() / p.stem();
}

fs::path timing_path_for(const fs::path& p)
{
    return fs::path(cell_base(p).string() + ".timing.json");
}

json read_json_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + p.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

void write_json_file(const fs::path& p, const ordered_json& j)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + p.string() + "' for writing");
    out << j.dump(2) << '\n';
}

void merge_timing(const fs::path& p, const char* key, double value)
{
    ordered_json j = ordered_json::object();
    if (fs::exists(p)) {
        std::ifstream in(p, std::ios::binary);
        j = ordered_json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            j = ordered_json::object();
    }
    j[key] = value;
    write_json_file(p, j);
}

void ensure_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw Error("cannot create output directory '" + dir.string() + "'");
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

// ---------------------------------------------------------------------------
// CampaignConfig

void CampaignConfig::validate() const
{
    if (eta_max.empty())
        throw UsageError("eta_max grid is empty");
    if (gamma_th_db.empty())
        throw UsageError("gamma_th_db grid is empty");
    for (int e : eta_max)
        if (e < 0)
            throw UsageError("eta_max values must be >= 0");
    for (double g : gamma_th_db)
        if (std::isnan(g) || g > 0.0)
            throw UsageError("gamma_th_db values must be <= 0 dB or -inf");
    if (std::find(eta_max.begin(), eta_max.end(), effective_baseline_eta()) == eta_max.end() ||
        std::find(gamma_th_db.begin(), gamma_th_db.end(), effective_baseline_gamma()) == gamma_th_db.end())
        throw UsageError("baseline (eta_max=" + std::to_string(effective_baseline_eta()) +
                         ", gamma_th_db=" + format_threshold(effective_baseline_gamma()) + ") is not in the grid");
    if (!(link.bandwidth_hz > 0.0) || !(link.carrier_frequency_hz > 0.0))
        throw UsageError("bandwidth and carrier frequency must be positive");
    if (workers < 1)
        throw UsageError("workers must be >= 1");
    if (n_runs < 1)
        throw UsageError("n_runs must be >= 1");
    if (trace_format != "csv" && trace_format != "jsonl")
        throw UsageError("trace format must be 'csv' or 'jsonl'");
    try {
        tx_array.validate();
        rx_array.validate();
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

int CampaignConfig::effective_baseline_eta() const
{
    if (baseline_eta_max)
        return *baseline_eta_max;
    return eta_max.empty() ? 0 : *std::max_element(eta_max.begin(), eta_max.end());
}

double CampaignConfig::effective_baseline_gamma() const
{
    if (baseline_gamma_th_db)
        return *baseline_gamma_th_db;
    return gamma_th_db.empty() ? kNegInf : *std::min_element(gamma_th_db.begin(), gamma_th_db.end());
}

TraceConfig CampaignConfig::trace_config(int eta, double gamma) const
{
    TraceConfig t;
    t.max_reflection_order = eta;
    t.relative_threshold_db = gamma;
    t.carrier_frequency_hz = link.carrier_frequency_hz;
    return t;
}

ordered_json CampaignConfig::to_json() const
{
    ordered_json j;
    j["scene"] = scene;
    j["trajectory"] = trajectory;
    j["tx_position_m"] = tx_position_m ? vec_json(*tx_position_m) : ordered_json(nullptr);
    j["eta_max"] = eta_max;
    auto& g = j["gamma_th_db"] = ordered_json::array();
    for (double v : gamma_th_db)
        g.push_back(threshold_json(v));
    j["baseline_eta_max"] = effective_baseline_eta();
    j["baseline_gamma_th_db"] = threshold_json(effective_baseline_gamma());
    j["tx_power_dbm"] = link.tx_power_dbm;
    j["noise_figure_db"] = link.noise_figure_db;
    j["bandwidth_hz"] = link.bandwidth_hz;
    j["carrier_frequency_hz"] = link.carrier_frequency_hz;
    j["tx_array"] = array_json(tx_array);
    j["rx_array"] = array_json(rx_array);
    j["out_dir"] = out_dir.generic_string();
    j["workers"] = workers;
    j["samples"] = samples ? ordered_json(*samples) : ordered_json(nullptr);
    j["n_runs"] = n_runs;
    j["seed"] = seed;
    j["trace_format"] = trace_format;
    return j;
}

CampaignConfig CampaignConfig::from_json(const json& j)
{
    CampaignConfig c;
    try {
        c.scene = j.value("scene", c.scene);
        c.trajectory = j.value("trajectory", c.trajectory);
        if (j.contains("tx_position_m") && !j["tx_position_m"].is_null())
            c.tx_position_m = vec_from_json(j["tx_position_m"]);
        if (j.contains("eta_max"))
            c.eta_max = j["eta_max"].get<std::vector<int>>();
        if (j.contains("gamma_th_db")) {
            c.gamma_th_db.clear();
            for (const auto& v : j["gamma_th_db"])
                c.gamma_th_db.push_back(threshold_from_json(v));
        }
        if (j.contains("baseline_eta_max") && !j["baseline_eta_max"].is_null())
            c.baseline_eta_max = j["baseline_eta_max"].get<int>();
        if (j.contains("baseline_gamma_th_db") && !j["baseline_gamma_th_db"].is_null())
            c.baseline_gamma_th_db = threshold_from_json(j["baseline_gamma_th_db"]);
        c.link.tx_power_dbm = j.value("tx_power_dbm", c.link.tx_power_dbm);
        c.link.noise_figure_db = j.value("noise_figure_db", c.link.noise_figure_db);
        c.link.bandwidth_hz = j.value("bandwidth_hz", c.link.bandwidth_hz);
        c.link.carrier_frequency_hz = j.value("carrier_frequency_hz", c.link.carrier_frequency_hz);
        if (j.contains("tx_array"))
            c.tx_array = array_from_json(j["tx_array"], c.tx_array);
        if (j.contains("rx_array"))
            c.rx_array = array_from_json(j["rx_array"], c.rx_array);
        c.out_dir = j.value("out_dir", c.out_dir.generic_string());
        c.workers = j.value("workers", c.workers);
        if (j.contains("samples") && !j["samples"].is_null())
            c.samples = j["samples"].get<std::size_t>();
        c.n_runs = j.value("n_runs", c.n_runs);
        c.seed = j.value("seed", c.seed);
        c.trace_format = j.value("trace_format", c.trace_format);
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid config: ") + e.what());
    }
    return c;
}

bool CampaignConfig::operator==(const CampaignConfig& o) const
{
    return to_json() == o.to_json();
}

CampaignConfig load_config(const fs::path& path)
{
    return CampaignConfig::from_json(read_json_file(path));
}

void save_config(const fs::path& path, const CampaignConfig& cfg)
{
    write_json_file(path, cfg.to_json());
}

ArrayConfig parse_array_size(const std::string& s, const ArrayConfig& base)
{
    const auto x = s.find_first_of("xX");
    const auto rows = x == std::string::npos ? std::nullopt : text::parse_int(std::string_view(s).substr(0, x));
    const auto cols = x == std::string::npos ? std::nullopt : text::parse_int(std::string_view(s).substr(x + 1));
    if (!rows || !cols || *rows < 1 || *cols < 1)
        throw UsageError("array size must look like '8x8', got '" + s + "'");
    ArrayConfig a = base;
    a.rows = static_cast<int>(*rows);
    a.cols = static_cast<int>(*cols);
    return a;
}

// ---------------------------------------------------------------------------
// Inputs

ResolvedInputs resolve_inputs(const CampaignConfig& cfg)
{
    ResolvedInputs in;
    const fs::path scene_path(cfg.scene);
    const bool is_file = fs::exists(scene_path);
    if (!is_file) {
        auto bundle = make_builtin_scenario(cfg.scene);
        if (!bundle)
            throw UsageError("scene '" + cfg.scene + "' is neither a file nor a builtin scenario (indoor1, lroom, parking)");
        in.scene = std::move(bundle->scene);
        in.tx = bundle->tx.position;
        in.rx = std::move(bundle->rx);
    } else {
        in.scene = load_scene(scene_path);
        const fs::path tx_file = sibling_with(scene_path, ".tx");
        if (!cfg.tx_position_m) {
            if (!fs::exists(tx_file))
                throw UsageError("no TX position: pass --tx or provide '" + tx_file.string() + "'");
            in.tx = load_position(tx_file);
        }
        if (cfg.trajectory.empty()) {
            const fs::path traj_file = sibling_with(scene_path, ".traj");
            if (!fs::exists(traj_file))
                throw UsageError("no trajectory: pass --trajectory or provide '" + traj_file.string() + "'");
            in.rx = load_trajectory(traj_file);
        }
    }
    if (cfg.tx_position_m)
        in.tx = *cfg.tx_position_m;
    if (!cfg.trajectory.empty())
        in.rx = load_trajectory(cfg.trajectory);
    if (cfg.samples)
        in.rx = in.rx.truncated(*cfg.samples);
    return in;
}

std::string cell_stem(int eta, double gamma_db)
{
    return "eta" + std::to_string(eta) + "_gamma" + format_threshold(gamma_db);
}

// ---------------------------------------------------------------------------
// Commands

ScenarioFiles cmd_scenario(const std::string& name, const fs::path& out_dir, std::optional<std::size_t> samples)
{
    auto bundle = make_builtin_scenario(name);
    if (!bundle)
        throw UsageError("unknown scenario '" + name + "' (expected indoor1, lroom or parking)");
    if (samples)
        bundle->rx = bundle->rx.truncated(*samples);
    ensure_dir(out_dir);
    ScenarioFiles f;
    f.scene = out_dir / (name + ".scene");
    f.trajectory = out_dir / (name + ".traj");
    f.tx = out_dir / (name + ".tx");
    save_scene(f.scene, bundle->scene);
    save_trajectory(f.trajectory, bundle->rx);
    save_position(f.tx, bundle->tx.position);
    f.triangles = bundle->scene.triangles.size();
    f.samples = bundle->rx.size();
    return f;
}

std::vector<TraceCell> cmd_trace(const CampaignConfig& cfg)
{
    cfg.validate();
    const auto in = resolve_inputs(cfg);
    ensure_dir(cfg.out_dir);
    // Worker count and output location do not affect results; leaving them
    // out keeps config.json identical across reruns.
    auto effective = cfg.to_json();
    effective.erase("workers");
    effective.erase("out_dir");
    write_json_file(cfg.out_dir / "config.json", effective);

    std::vector<TraceCell> cells;
    for (int eta : cfg.eta_max) {
        for (double gamma : cfg.gamma_th_db) {
            const TraceConfig tc = cfg.trace_config(eta, gamma);
            const PreparedScene prepared(in.scene, tc.tolerances);

            const auto t0 = std::chrono::steady_clock::now();
            const auto results = trace_trajectory(prepared, in.tx, in.rx, tc, cfg.workers);
            const double t_rt = elapsed_since(t0);

            TraceHeader h;
            h.timesteps = results.size();
            h.sample_interval_s = in.rx.sample_interval_s;
            h.max_reflection_order = eta;
            h.relative_threshold_db = gamma;
            h.carrier_frequency_hz = tc.carrier_frequency_hz;

            TraceCell cell;
            cell.eta_max = eta;
            cell.gamma_th_db = gamma;
            const std::string stem = cell_stem(eta, gamma);
            cell.trace_path = cfg.out_dir / (stem + (cfg.trace_format == "jsonl" ? ".trace.jsonl" : ".trace.csv"));
            cell.timing_path = cfg.out_dir / (stem + ".timing.json");
            cell.t_rt_s = t_rt;
            for (const auto& r : results) {
                cell.candidates += r.candidates_examined;
                cell.mpcs += r.mpcs.size();
            }
            save_trace(cell.trace_path, h, results);
            ordered_json timing;
            timing["t_rt_s"] = t_rt;
            write_json_file(cell.timing_path, timing);
            cells.push_back(cell);
        }
    }
    return cells;
}

SnrFile evaluate_snr(const TraceFile& trace, const LinkBudget& link, const ArrayConfig& tx_array,
                     const ArrayConfig& rx_array)
{
    LinkBudget budget = link;
    budget.carrier_frequency_hz = trace.header.carrier_frequency_hz;
    const double lambda = budget.wavelength_m();

    SnrFile out;
    out.header = trace.header;
    out.samples.reserve(trace.steps.size());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        const auto& mpcs = trace.steps[i].mpcs;
        const auto h = assemble_channel(mpcs, tx_array, rx_array, lambda);
        SnrSample s;
        s.timestep = i;
        s.time_s = trace.header.sample_interval_s * static_cast<double>(i);
        s.sigma1 = largest_singular_value(h);
        s.snr_db = beamforming_snr_db(h, budget);
        s.num_mpcs = mpcs.size();
        out.samples.push_back(s);
    }
    return out;
}

SnrRun cmd_snr(const fs::path& trace_path, const LinkBudget& link, const ArrayConfig& tx_array,
               const ArrayConfig& rx_array, std::optional<fs::path> out_path)
{
    tx_array.validate();
    rx_array.validate();
    const auto trace = load_trace(trace_path);

    SnrRun run;
    const auto t0 = std::chrono::steady_clock::now();
    run.snr = evaluate_snr(trace, link, tx_array, rx_array);
    run.t_ns_s = elapsed_since(t0);

    run.snr_path = out_path ? *out_path : fs::path(cell_base(trace_path).string() + ".snr.csv");
    save_snr(run.snr_path, run.snr);
    const fs::path timing = timing_path_for(run.snr_path);
    const fs::path trace_timing = timing_path_for(trace_path);
    if (timing != trace_timing && fs::exists(trace_timing)) {
        const auto j = read_json_file(trace_timing);
        if (j.contains("t_rt_s"))
            merge_timing(timing, "t_rt_s", j["t_rt_s"].get<double>());
    }
    merge_timing(timing, "t_ns_s", run.t_ns_s);
    return run;
}

CampaignReport load_campaign_report(const fs::path& snr_path)
{
    const auto snr = load_snr(snr_path);
    CampaignReport r;
    r.config.max_reflection_order = snr.header.max_reflection_order;
    r.config.relative_threshold_db = snr.header.relative_threshold_db;
    r.config.carrier_frequency_hz = snr.header.carrier_frequency_hz;
    for (const auto& s : snr.samples) {
        r.snr_db.push_back(s.snr_db);
        r.mpc_counts.push_back(s.num_mpcs);
    }
    const fs::path timing = timing_path_for(snr_path);
    if (!fs::exists(timing))
        throw Error("missing timing sidecar '" + timing.string() + "'");
    const auto j = read_json_file(timing);
    if (!j.contains("t_rt_s") || !j.contains("t_ns_s"))
        throw Error("timing sidecar '" + timing.string() + "' needs t_rt_s and t_ns_s");
    r.t_rt_s = j["t_rt_s"].get<double>();
    r.t_ns_s = j["t_ns_s"].get<double>();
    return r;
}

void write_tradeoff_csv(std::ostream& out, const std::vector<TradeoffRow>& rows)
{
    out << "eta_max,gamma_th_db,nrmse,outage_mismatch,total_mpcs,speedup\n";
    for (const auto& r : rows)
        out << r.max_reflection_order << ',' << format_threshold(r.relative_threshold_db) << ','
            << text::format_double(r.nrmse) << ',' << r.outage_mismatch_count << ',' << r.total_mpcs << ','
            << text::format_double(r.speedup) << '\n';
}

CompareResult cmd_compare(const fs::path& baseline_snr, const std::vector<fs::path>& test_snrs, std::size_t n_runs,
                          const fs::path& table_path)
{
    if (n_runs < 1)
        throw UsageError("--n-runs must be >= 1");
    std::vector<CampaignReport> reports;
    reports.push_back(load_campaign_report(baseline_snr));
    for (const auto& p : test_snrs)
        reports.push_back(load_campaign_report(p));

    CompareResult res;
    res.rows = tradeoff_table(reports, 0, n_runs);
    for (std::size_t i = 1; i < reports.size(); ++i)
        res.comparisons.push_back(compare_campaigns(reports[0], reports[i], n_runs));
    res.table_path = table_path;
    if (!table_path.empty()) {
        if (table_path.has_parent_path())
            ensure_dir(table_path.parent_path());
        std::ofstream out(table_path, std::ios::binary);
        if (!out)
            throw Error("cannot open '" + table_path.string() + "' for writing");
        write_tradeoff_csv(out, res.rows);
    }
    return res;
}

CompareResult cmd_compare_dir(const fs::path& dir, int baseline_eta, double baseline_gamma, std::size_t n_runs,
                              const fs::path& table_path)
{
    if (!fs::is_directory(dir))
        throw UsageError("'" + dir.string() + "' is not a directory");
    // Sort by (eta, gamma) so the table layout does not depend on directory order.
    std::vector<std::pair<std::pair<int, double>, fs::path>> found;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (!name.ends_with(".snr.csv"))
            continue;
        const auto snr = load_snr(e.path());
        found.push_back({{snr.header.max_reflection_order, snr.header.relative_threshold_db}, e.path()});
    }
    std::sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    const auto base = std::find_if(found.begin(), found.end(), [&](const auto& f) {
        return f.first.first == baseline_eta && f.first.second == baseline_gamma;
    });
    if (base == found.end())
        throw UsageError("baseline " + cell_stem(baseline_eta, baseline_gamma) + " not found in '" + dir.string() + "'");
    std::vector<fs::path> tests;
    for (auto it = found.begin(); it != found.end(); ++it)
        if (it != base)
            tests.push_back(it->second);
    return cmd_compare(base->second, tests, n_runs, table_path);
}

std::vector<BenchRow> cmd_bench(const CampaignConfig& cfg, int repeats, std::optional<fs::path> out_csv)
{
    cfg.validate();
    if (repeats < 1)
        throw UsageError("--repeats must be >= 1");
    const auto in = resolve_inputs(cfg);
    std::vector<BenchRow> rows;
    for (int eta : cfg.eta_max) {
        for (double gamma : cfg.gamma_th_db) {
            const TraceConfig tc = cfg.trace_config(eta, gamma);
            const PreparedScene prepared(in.scene, tc.tolerances);
            std::vector<double> times;
            BenchRow row;
            row.eta_max = eta;
            row.gamma_th_db = gamma;
            for (int k = 0; k < repeats; ++k) {
                const auto t0 = std::chrono::steady_clock::now();
                const auto results = trace_trajectory(prepared, in.tx, in.rx, tc, cfg.workers);
                times.push_back(elapsed_since(t0));
                if (k == 0)
                    for (const auto& r : results) {
                        row.candidates += r.candidates_examined;
                        row.mpcs += r.mpcs.size();
                    }
            }
            row.median_t_rt_s = median(times);
            row.min_t_rt_s = *std::min_element(times.begin(), times.end());
            row.max_t_rt_s = *std::max_element(times.begin(), times.end());
            rows.push_back(row);
        }
    }
    if (out_csv) {
        std::ofstream out(*out_csv, std::ios::binary);
        if (!out)
            throw Error("cannot open '" + out_csv->string() + "' for writing");
        out << "eta_max,gamma_th_db,median_t_rt_s,min_t_rt_s,max_t_rt_s,candidates,mpcs\n";
        for (const auto& r : rows)
            out << r.eta_max << ',' << format_threshold(r.gamma_th_db) << ',' << text::format_double(r.median_t_rt_s)
                << ',' << text::format_double(r.min_t_rt_s) << ',' << text::format_double(r.max_t_rt_s) << ','
                << r.candidates << ',' << r.mpcs << '\n';
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Command line

namespace {

// Options shared by `trace` and `bench`.
struct GridFlags {
    std::string config_path;
    std::string scene, trajectory, tx;
    std::vector<int> eta;
    std::vector<std::string> gamma;
    std::optional<std::size_t> samples;
    std::optional<unsigned> workers;
    std::string out_dir;
    std::optional<double> carrier_hz;
    std::string format;

    void attach(CLI::App& app)
    {
        app.add_option("--config", config_path, "JSON campaign config; flags override its values");
        app.add_option("--scene", scene, "Scene file or builtin name (indoor1, lroom, parking)");
        app.add_option("--trajectory", trajectory, "RX trajectory file");
        app.add_option("--tx", tx, "TX position 'x,y,z' in metres");
        app.add_option("--eta-max", eta, "Maximum reflection order (repeatable)");
        app.add_option("--gamma-th-db", gamma, "Relative threshold in dB, or -inf (repeatable)");
        app.add_option("--samples", samples, "Use only the first N trajectory samples");
        app.add_option("--workers", workers, "Parallel timestep workers");
        app.add_option("--out-dir", out_dir, "Output directory");
        app.add_option("--carrier-hz", carrier_hz, "Carrier frequency in Hz");
        app.add_option("--format", format, "Trace format: csv or jsonl");
    }

    CampaignConfig build() const
    {
        CampaignConfig c = config_path.empty() ? CampaignConfig{} : load_config(config_path);
        if (!scene.empty())
            c.scene = scene;
        if (!trajectory.empty())
            c.trajectory = trajectory;
        if (!tx.empty())
            c.tx_position_m = parse_point(tx);
        if (!eta.empty())
            c.eta_max = eta;
        if (!gamma.empty()) {
            c.gamma_th_db.clear();
            for (const auto& g : gamma)
                c.gamma_th_db.push_back(parse_threshold(g));
        }
        if (samples)
            c.samples = *samples;
        if (workers)
            c.workers = *workers;
        if (!out_dir.empty())
            c.out_dir = out_dir;
        if (carrier_hz)
            c.link.carrier_frequency_hz = *carrier_hz;
        if (!format.empty())
            c.trace_format = format;
        return c;
    }
};

struct LinkFlags {
    std::string tx_array = "8x8", rx_array = "4x4";
    double tx_power_dbm = 30.0, noise_figure_db = 5.0, bandwidth_hz = 400e6;

    void attach(CLI::App& app)
    {
        app.add_option("--tx-array", tx_array, "TX planar array size")->capture_default_str();
        app.add_option("--rx-array", rx_array, "RX planar array size")->capture_default_str();
        app.add_option("--tx-power-dbm", tx_power_dbm, "Transmit power")->capture_default_str();
        app.add_option("--noise-figure-db", noise_figure_db, "Receiver noise figure")->capture_default_str();
        app.add_option("--bandwidth-hz", bandwidth_hz, "Noise bandwidth")->capture_default_str();
    }

    LinkBudget budget() const
    {
        LinkBudget b;
        b.tx_power_dbm = tx_power_dbm;
        b.noise_figure_db = noise_figure_db;
        b.bandwidth_hz = bandwidth_hz;
        if (!(b.bandwidth_hz > 0.0))
            throw UsageError("--bandwidth-hz must be positive");
        return b;
    }
};

// CLI11 reads a bare "-inf" as a short flag; glue it onto the option that
// expects a threshold.
std::vector<std::string> normalize_args(int argc, char** argv)
{
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if ((a == "-inf" || a == "-Inf" || a == "-INF") && !args.empty() &&
            (args.back() == "--gamma-th-db" || args.back() == "--baseline-gamma-db")) {
            args.back() += "=" + a;
            continue;
        }
        args.push_back(std::move(a));
    }
    std::reverse(args.begin(), args.end()); // CLI11 consumes a reversed vector
    return args;
}

} // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"mmrt - specular image-method ray tracer for mmWave channels"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    // scenario
    auto* sc = app.add_subcommand("scenario", "Write a builtin scenario (scene, trajectory, TX) to disk");
    std::string sc_name, sc_out = ".";
    std::optional<std::size_t> sc_samples;
    sc->add_option("name", sc_name, "indoor1 | lroom | parking")->required();
    sc->add_option("--out-dir", sc_out, "Output directory")->capture_default_str();
    sc->add_option("--samples", sc_samples, "Truncate the trajectory to N samples");

    // trace
    auto* tr = app.add_subcommand("trace", "Trace every (eta_max, gamma_th) cell of a campaign grid");
    GridFlags tr_flags;
    tr_flags.attach(*tr);

    // snr
    auto* sn = app.add_subcommand("snr", "Compute the beamforming SNR series of MPC traces");
    std::vector<std::string> sn_traces;
    std::string sn_dir, sn_out;
    LinkFlags sn_link;
    sn->add_option("--trace", sn_traces, "Trace file (repeatable)");
    sn->add_option("--dir", sn_dir, "Process every trace in this directory");
    sn->add_option("--out", sn_out, "Output SNR file (single --trace only)");
    sn_link.attach(*sn);

    // compare
    auto* cp = app.add_subcommand("compare", "NRMSE / speedup of campaigns against a baseline");
    std::string cp_base, cp_dir, cp_out, cp_base_gamma = "-inf";
    std::vector<std::string> cp_tests;
    int cp_base_eta = 4;
    std::size_t cp_runs = 1000;
    cp->add_option("--baseline", cp_base, "Baseline SNR file");
    cp->add_option("--test", cp_tests, "SNR file to compare (repeatable)");
    cp->add_option("--dir", cp_dir, "Compare every SNR file in a directory");
    cp->add_option("--baseline-eta", cp_base_eta, "Baseline eta_max for --dir")->capture_default_str();
    cp->add_option("--baseline-gamma-db", cp_base_gamma, "Baseline gamma_th for --dir")->capture_default_str();
    cp->add_option("--n-runs", cp_runs, "Simulations reusing the traces")->capture_default_str();
    cp->add_option("--out", cp_out, "Trade-off table CSV (default: tradeoff.csv next to the inputs)");

    // bench
    auto* bn = app.add_subcommand("bench", "Time the tracer over a campaign grid");
    GridFlags bn_flags;
    int bn_repeats = 3;
    std::string bn_csv;
    bn_flags.attach(*bn);
    bn->add_option("--repeats", bn_repeats, "Runs per cell; the median is reported")->capture_default_str();
    bn->add_option("--csv", bn_csv, "Write the summary as CSV");

    try {
        app.parse(normalize_args(argc, argv));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*sc) {
            const auto f = cmd_scenario(sc_name, sc_out, sc_samples);
            out << "scene " << f.scene.string() << " (" << f.triangles << " triangles)\n"
                << "trajectory " << f.trajectory.string() << " (" << f.samples << " samples)\n"
                << "tx " << f.tx.string() << '\n';
        } else if (*tr) {
            const auto cfg = tr_flags.build();
            for (const auto& c : cmd_trace(cfg))
                out << c.trace_path.string() << " eta_max=" << c.eta_max
                    << " gamma_th_db=" << format_threshold(c.gamma_th_db) << " mpcs=" << c.mpcs
                    << " candidates=" << c.candidates << " t_rt_s=" << text::format_double(c.t_rt_s) << '\n';
        } else if (*sn) {
            std::vector<fs::path> traces(sn_traces.begin(), sn_traces.end());
            if (!sn_dir.empty()) {
                if (!fs::is_directory(sn_dir))
                    throw UsageError("'" + sn_dir + "' is not a directory");
                std::set<fs::path> found;
                for (const auto& e : fs::directory_iterator(sn_dir)) {
                    const auto name = e.path().filename().string();
                    if (name.ends_with(".trace.csv") || name.ends_with(".trace.jsonl"))
                        found.insert(e.path());
                }
                traces.insert(traces.end(), found.begin(), found.end());
            }
            if (traces.empty())
                throw UsageError("snr needs --trace or --dir");
            if (!sn_out.empty() && traces.size() != 1)
                throw UsageError("--out needs exactly one trace");
            const auto budget = sn_link.budget();
            const auto tx_arr = parse_array_size(sn_link.tx_array);
            const auto rx_arr = parse_array_size(sn_link.rx_array);
            for (const auto& t : traces) {
                const auto r = cmd_snr(t, budget, tx_arr, rx_arr,
                                       sn_out.empty() ? std::nullopt : std::optional<fs::path>(sn_out));
                std::size_t outages = 0;
                for (const auto& s : r.snr.samples)
                    outages += std::isfinite(s.snr_db) ? 0 : 1;
                out << r.snr_path.string() << " timesteps=" << r.snr.samples.size() << " outages=" << outages
                    << " t_ns_s=" << text::format_double(r.t_ns_s) << '\n';
            }
        } else if (*cp) {
            CompareResult res;
            if (!cp_dir.empty()) {
                const fs::path table = cp_out.empty() ? fs::path(cp_dir) / "tradeoff.csv" : fs::path(cp_out);
                res = cmd_compare_dir(cp_dir, cp_base_eta, parse_threshold(cp_base_gamma), cp_runs, table);
            } else {
                if (cp_base.empty() || cp_tests.empty())
                    throw UsageError("compare needs --baseline and --test, or --dir");
                const fs::path table =
                    cp_out.empty() ? fs::path(cp_base).parent_path() / "tradeoff.csv" : fs::path(cp_out);
                res = cmd_compare(cp_base, std::vector<fs::path>(cp_tests.begin(), cp_tests.end()), cp_runs, table);
            }
            for (const auto& c : res.comparisons)
                out << "nrmse=" << text::format_double(c.nrmse) << " speedup=" << text::format_double(c.speedup)
                    << " n_runs=" << c.n_runs << " outage_mismatch=" << c.outage_mismatch_count << '\n';
            write_tradeoff_csv(out, res.rows);
        } else if (*bn) {
            const auto cfg = bn_flags.build();
            const auto rows =
                cmd_bench(cfg, bn_repeats, bn_csv.empty() ? std::nullopt : std::optional<fs::path>(bn_csv));
            for (const auto& r : rows)
                out << "eta_max=" << r.eta_max << " gamma_th_db=" << format_threshold(r.gamma_th_db)
                    << " median_t_rt_s=" << text::format_double(r.median_t_rt_s) << " candidates=" << r.candidates
                    << " mpcs=" << r.mpcs << '\n';
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

} // namespace mmrt::cli
