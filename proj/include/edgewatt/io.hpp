#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgewatt/arch.hpp"
#include "edgewatt/calibrate.hpp"
#include "edgewatt/estimate.hpp"
#include "edgewatt/trace.hpp"

namespace edgewatt::io {

using json = nlohmann::json;

// Reads and parses a JSON file; parse failures become ValidationError with
// the file name and the line/column diagnostics.
json parse_json_file(const std::filesystem::path& path);

// --- layers and architectures -------------------------------------------

LayerSpec layer_from_json(const json& j, const std::string& context);
json layer_to_json(const LayerSpec& layer);

struct SkippedLayer {
    std::size_t index = 0;
    std::string kind;
};

struct ParsedNetwork {
    NetworkArch arch;
    std::vector<SkippedLayer> skipped;  // only populated with skip_unknown
};

// Architecture document: {"name": str, "layers": [layer...]}. An unknown
// layer kind is a parse error naming the offending index unless
// skip_unknown is set, in which case the layer is dropped and reported.
ParsedNetwork parse_network(const json& j, bool skip_unknown = false);
ParsedNetwork load_network(const std::filesystem::path& path, bool skip_unknown = false);
json network_to_json(const NetworkArch& arch);

// --- manifests and profiles -------------------------------------------------

TraceManifest manifest_from_json(const json& j);
TraceManifest load_manifest(const std::filesystem::path& path);
json manifest_to_json(const TraceManifest& manifest);
void save_manifest(const TraceManifest& manifest, const std::filesystem::path& path);

DeviceProfile profile_from_json(const json& j);
DeviceProfile load_profile(const std::filesystem::path& path);
json profile_to_json(const DeviceProfile& profile);
void save_profile(const DeviceProfile& profile, const std::filesystem::path& path);

// --- trace and stats CSV ---------------------------------------------------

// Header: config_id,run_id,slot_idx,power_mw. Rows sorted by
// (config_id, run_id, slot_idx); slot_idx gapless from 0 within a run.
void write_trace_csv(std::ostream& out, const std::vector<PowerTrace>& traces);
void save_trace_csv(const std::vector<PowerTrace>& traces, const std::filesystem::path& path);
std::vector<PowerTrace> read_trace_csv(std::istream& in, const TraceManifest& manifest,
                                       const std::string& source_name = "<trace csv>");
std::vector<PowerTrace> load_trace_csv(const std::filesystem::path& path,
                                       const TraceManifest& manifest);

// Header: config_id,n_runs,load,mean_energy_j,std_energy_j,ci99_j.
void write_stats_csv(std::ostream& out, const std::vector<ConfigEnergyStats>& stats);
void save_stats_csv(const std::vector<ConfigEnergyStats>& stats,
                    const std::filesystem::path& path);
std::vector<ConfigEnergyStats> read_stats_csv(std::istream& in,
                                              const std::string& source_name = "<stats csv>");
std::vector<ConfigEnergyStats> load_stats_csv(const std::filesystem::path& path);

// --- reports ----------------------------------------------------------------

json estimate_report_to_json(const NetworkEstimate& estimate,
                             const std::vector<SkippedLayer>& skipped = {});
NetworkEstimate estimate_report_from_json(const json& j);

json fit_report_to_json(const CalibrationReport& report);

}  // namespace edgewatt::io
