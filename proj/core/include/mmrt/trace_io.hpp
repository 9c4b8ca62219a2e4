// SPDX-License-Identifier: Apache-2.0
//
// Interchange formats: MPC traces (delimited text and JSON Lines) and SNR
// time series. Byte layouts are documented in docs/formats.md; writers are
// deterministic and never emit timing information.

#pragma once

#include "mmrt/tracer.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mmrt {

// Campaign cell metadata carried in the first line of trace and SNR files.
struct TraceHeader {
    std::size_t timesteps = 0;
    double sample_interval_s = 0.005;
    int max_reflection_order = 0;
    double relative_threshold_db = 0.0;
    double carrier_frequency_hz = 60e9;

    bool operator==(const TraceHeader&) const = default;
};

struct TraceFile {
    TraceHeader header;
    // One entry per timestep (empty ones included); counters and timing are
    // not serialized and read back as zero.
    std::vector<TraceResult> steps;
};

enum class TraceFormat { Csv, JsonLines };

// .jsonl selects JSON Lines, anything else the delimited text variant.
TraceFormat trace_format_for(const std::filesystem::path& path);

void write_trace_csv(std::ostream& out, const TraceHeader& header, const std::vector<TraceResult>& steps);
void write_trace_jsonl(std::ostream& out, const TraceHeader& header, const std::vector<TraceResult>& steps);
TraceFile read_trace_csv(std::istream& in, const std::string& source = "<trace>");
TraceFile read_trace_jsonl(std::istream& in, const std::string& source = "<trace>");

void save_trace(const std::filesystem::path& path, const TraceHeader& header, const std::vector<TraceResult>& steps);
TraceFile load_trace(const std::filesystem::path& path);

struct SnrSample {
    std::size_t timestep = 0;
    double time_s = 0.0;
    double snr_db = 0.0; // -inf on outage
    std::size_t num_mpcs = 0;
    double sigma1 = 0.0;
};

struct SnrFile {
    TraceHeader header;
    std::vector<SnrSample> samples;
};

void write_snr_csv(std::ostream& out, const SnrFile& snr);
SnrFile read_snr_csv(std::istream& in, const std::string& source = "<snr>");
void save_snr(const std::filesystem::path& path, const SnrFile& snr);
SnrFile load_snr(const std::filesystem::path& path);

// Canonical text for a threshold value: "-inf", "-40", "-12.5".
std::string format_threshold(double gamma_db);

} // namespace mmrt
