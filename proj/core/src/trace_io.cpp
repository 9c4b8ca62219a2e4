// SPDX-License-Identifier: Apache-2.0

#include "mmrt/trace_io.hpp"

#include "mmrt/errors.hpp"
#include "mmrt/text.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace mmrt {

namespace {

constexpr const char* kTraceMagic = "# mmrt-trace v1";
constexpr const char* kSnrMagic = "# mmrt-snr v1";
constexpr const char* kTraceColumns =
    "timestep,order,surface_ids,d_m,delay_s,gain_db,phase_rad,aod_az,aod_el,aoa_az,aoa_el";
constexpr const char* kSnrColumns = "timestep,time_s,snr_db,num_mpcs,sigma1";

using text::format_double;

std::string header_fields(const TraceHeader& h)
{
    std::ostringstream s;
    s << "timesteps=" << h.timesteps << " sample_interval_s=" << format_double(h.sample_interval_s)
      << " eta_max=" << h.max_reflection_order << " gamma_th_db=" << format_threshold(h.relative_threshold_db)
      << " carrier_frequency_hz=" << format_double(h.carrier_frequency_hz);
    return s.str();
}

TraceHeader parse_header_fields(std::string_view rest, const std::string& source)
{
    std::map<std::string, std::string, std::less<>> kv;
    for (auto tok : text::split_ws(rest)) {
        const auto eq = tok.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(source, 1, "malformed header field '" + std::string(tok) + "'");
        kv.emplace(std::string(tok.substr(0, eq)), std::string(tok.substr(eq + 1)));
    }
    auto get = [&](const char* key) -> const std::string& {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw ParseError(source, 1, std::string("header is missing '") + key + "'");
        return it->second;
    };
    TraceHeader h;
    const auto ts = text::parse_int(get("timesteps"));
    const auto dt = text::parse_double(get("sample_interval_s"));
    const auto eta = text::parse_int(get("eta_max"));
    const auto gamma = text::parse_double(get("gamma_th_db"));
    const auto fc = text::parse_double(get("carrier_frequency_hz"));
    if (!ts || *ts < 0 || !dt || !eta || !gamma || !fc)
        throw ParseError(source, 1, "malformed header value");
    h.timesteps = static_cast<std::size_t>(*ts);
    h.sample_interval_s = *dt;
    h.max_reflection_order = static_cast<int>(*eta);
    h.relative_threshold_db = *gamma;
    h.carrier_frequency_hz = *fc;
    return h;
}

std::string join_ids(const std::vector<int>& ids)
{
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i)
            s += '|';
        s += std::to_string(ids[i]);
    }
    return s;
}

std::vector<TraceResult> empty_steps(std::size_t n)
{
    std::vector<TraceResult> steps(n);
    for (std::size_t i = 0; i < n; ++i)
        steps[i].timestep = i;
    return steps;
}

} // namespace

std::string format_threshold(double gamma_db)
{
    return format_double(gamma_db);
}

TraceFormat trace_format_for(const std::filesystem::path& path)
{
    return path.extension() == ".jsonl" ? TraceFormat::JsonLines : TraceFormat::Csv;
}

void write_trace_csv(std::ostream& out, const TraceHeader& header, const std::vector<TraceResult>& steps)
{
    out << kTraceMagic << ' ' << header_fields(header) << '\n' << kTraceColumns << '\n';
    for (std::size_t i = 0; i < steps.size(); ++i) {
        for (const auto& m : steps[i].mpcs) {
            out << i << ',' << m.order << ',' << join_ids(m.surface_ids) << ',' << format_double(m.path_length_m) << ','
                << format_double(m.delay_s) << ',' << format_double(m.gain_db) << ',' << format_double(m.phase_rad)
                << ',' << format_double(m.aod.azimuth_rad) << ',' << format_double(m.aod.elevation_rad) << ','
                << format_double(m.aoa.azimuth_rad) << ',' << format_double(m.aoa.elevation_rad) << '\n';
        }
    }
}

TraceFile read_trace_csv(std::istream& in, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line) || !line.starts_with(kTraceMagic))
        throw ParseError(source, 1, "not an mmrt trace file (missing '# mmrt-trace v1' header)");
    TraceFile f;
    f.header = parse_header_fields(std::string_view(line).substr(std::char_traits<char>::length(kTraceMagic)), source);
    if (!std::getline(in, line) || text::trim(line) != kTraceColumns)
        throw ParseError(source, 2, "unexpected column header");
    f.steps = empty_steps(f.header.timesteps);

    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        const auto cols = text::split(text::trim(line), ',');
        if (cols.size() != 11)
            throw ParseError(source, line_no, "expected 11 fields, got " + std::to_string(cols.size()));
        const auto ts = text::parse_int(cols[0]);
        const auto order = text::parse_int(cols[1]);
        if (!ts || *ts < 0 || static_cast<std::size_t>(*ts) >= f.header.timesteps)
            throw ParseError(source, line_no, "timestep out of range");
        if (!order || *order < 0)
            throw ParseError(source, line_no, "invalid order");
        Mpc m;
        m.order = static_cast<int>(*order);
        if (!cols[2].empty()) {
            for (auto id : text::split(cols[2], '|')) {
                const auto v = text::parse_int(id);
                if (!v)
                    throw ParseError(source, line_no, "invalid surface id '" + std::string(id) + "'");
                m.surface_ids.push_back(static_cast<int>(*v));
            }
        }
        if (m.surface_ids.size() != static_cast<std::size_t>(m.order))
            throw ParseError(source, line_no, "surface id count does not match order");
        double vals[8];
        for (std::size_t k = 0; k < 8; ++k) {
            const auto v = text::parse_double(cols[3 + k]);
            if (!v || !std::isfinite(*v))
                throw ParseError(source, line_no, "invalid number in field " + std::to_string(4 + k));
            vals[k] = *v;
        }
        m.path_length_m = vals[0];
        m.delay_s = vals[1];
        m.gain_db = vals[2];
        m.phase_rad = vals[3];
        m.aod = {vals[4], vals[5]};
        m.aoa = {vals[6], vals[7]};
        f.steps[static_cast<std::size_t>(*ts)].mpcs.push_back(std::move(m));
    }
    return f;
}

void write_trace_jsonl(std::ostream& out, const TraceHeader& header, const std::vector<TraceResult>& steps)
{
    nlohmann::ordered_json h;
    h["format"] = "mmrt-trace";
    h["version"] = 1;
    h["timesteps"] = header.timesteps;
    h["sample_interval_s"] = header.sample_interval_s;
    h["eta_max"] = header.max_reflection_order;
    h["gamma_th_db"] = format_threshold(header.relative_threshold_db);
    h["carrier_frequency_hz"] = header.carrier_frequency_hz;
    out << h.dump() << '\n';
    for (std::size_t i = 0; i < steps.size(); ++i) {
        nlohmann::ordered_json rec;
        rec["timestep"] = i;
        auto& arr = rec["mpcs"] = nlohmann::ordered_json::array();
        for (const auto& m : steps[i].mpcs) {
            nlohmann::ordered_json j;
            j["order"] = m.order;
            j["surface_ids"] = m.surface_ids;
            j["d_m"] = m.path_length_m;
            j["delay_s"] = m.delay_s;
            j["gain_db"] = m.gain_db;
            j["phase_rad"] = m.phase_rad;
            j["aod_az"] = m.aod.azimuth_rad;
            j["aod_el"] = m.aod.elevation_rad;
            j["aoa_az"] = m.aoa.azimuth_rad;
            j["aoa_el"] = m.aoa.elevation_rad;
            arr.push_back(std::move(j));
        }
        out << rec.dump() << '\n';
    }
}

TraceFile read_trace_jsonl(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    TraceFile f;
    try {
        if (!std::getline(in, line))
            throw ParseError(source, 1, "empty trace");
        line_no = 1;
        const auto h = nlohmann::json::parse(line);
        if (h.value("format", "") != "mmrt-trace" || h.value("version", 0) != 1)
            throw ParseError(source, 1, "not an mmrt trace (format/version)");
        f.header.timesteps = h.at("timesteps").get<std::size_t>();
        f.header.sample_interval_s = h.at("sample_interval_s").get<double>();
        f.header.max_reflection_order = h.at("eta_max").get<int>();
        const auto gamma = text::parse_double(h.at("gamma_th_db").get<std::string>());
        if (!gamma)
            throw ParseError(source, 1, "invalid gamma_th_db");
        f.header.relative_threshold_db = *gamma;
        f.header.carrier_frequency_hz = h.at("carrier_frequency_hz").get<double>();
        f.steps = empty_steps(f.header.timesteps);

        while (std::getline(in, line)) {
            ++line_no;
            if (text::trim(line).empty())
                continue;
            const auto rec = nlohmann::json::parse(line);
            const auto ts = rec.at("timestep").get<std::size_t>();
            if (ts >= f.header.timesteps)
                throw ParseError(source, line_no, "timestep out of range");
            for (const auto& j : rec.at("mpcs")) {
                Mpc m;
                m.order = j.at("order").get<int>();
                m.surface_ids = j.at("surface_ids").get<std::vector<int>>();
                if (m.order < 0 || m.surface_ids.size() != static_cast<std::size_t>(m.order))
                    throw ParseError(source, line_no, "surface id count does not match order");
                m.path_length_m = j.at("d_m").get<double>();
                m.delay_s = j.at("delay_s").get<double>();
                m.gain_db = j.at("gain_db").get<double>();
                m.phase_rad = j.at("phase_rad").get<double>();
                m.aod = {j.at("aod_az").get<double>(), j.at("aod_el").get<double>()};
                m.aoa = {j.at("aoa_az").get<double>(), j.at("aoa_el").get<double>()};
                f.steps[ts].mpcs.push_back(std::move(m));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, line_no, e.what());
    }
    return f;
}

void save_trace(const std::filesystem::path& path, const TraceHeader& header, const std::vector<TraceResult>& steps)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    if (trace_format_for(path) == TraceFormat::JsonLines)
        write_trace_jsonl(out, header, steps);
    else
        write_trace_csv(out, header, steps);
}

TraceFile load_trace(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    return trace_format_for(path) == TraceFormat::JsonLines ? read_trace_jsonl(in, path.string())
                                                            : read_trace_csv(in, path.string());
}

void write_snr_csv(std::ostream& out, const SnrFile& snr)
{
    out << kSnrMagic << ' ' << header_fields(snr.header) << '\n' << kSnrColumns << '\n';
    for (const auto& s : snr.samples)
        out << s.timestep << ',' << format_double(s.time_s) << ',' << format_double(s.snr_db) << ',' << s.num_mpcs << ','
            << format_double(s.sigma1) << '\n';
}

SnrFile read_snr_csv(std::istream& in, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line) || !line.starts_with(kSnrMagic))
        throw ParseError(source, 1, "not an mmrt SNR file (missing '# mmrt-snr v1' header)");
    SnrFile f;
    f.header = parse_header_fields(std::string_view(line).substr(std::char_traits<char>::length(kSnrMagic)), source);
    if (!std::getline(in, line) || text::trim(line) != kSnrColumns)
        throw ParseError(source, 2, "unexpected column header");
    std::size_t line_no = 2;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty())
            continue;
        const auto cols = text::split(text::trim(line), ',');
        if (cols.size() != 5)
            throw ParseError(source, line_no, "expected 5 fields");
        const auto ts = text::parse_int(cols[0]);
        const auto t = text::parse_double(cols[1]);
        const auto snr = text::parse_double(cols[2]);
        const auto n = text::parse_int(cols[3]);
        const auto s1 = text::parse_double(cols[4]);
        if (!ts || *ts < 0 || !t || !snr || !n || *n < 0 || !s1 || std::isnan(*snr))
            throw ParseError(source, line_no, "malformed SNR record");
        if (static_cast<std::size_t>(*ts) != f.samples.size())
            throw ParseError(source, line_no, "timesteps must be consecutive from 0");
        f.samples.push_back({static_cast<std::size_t>(*ts), *t, *snr, static_cast<std::size_t>(*n), *s1});
    }
    if (f.samples.size() != f.header.timesteps)
        throw ParseError(source, line_no, "header announces " + std::to_string(f.header.timesteps) + " timesteps, found " +
                                              std::to_string(f.samples.size()));
    return f;
}

void save_snr(const std::filesystem::path& path, const SnrFile& snr)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open '" + path.string() + "' for writing");
    write_snr_csv(out, snr);
}

SnrFile load_snr(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    return read_snr_csv(in, path.string());
}

} // namespace mmrt
