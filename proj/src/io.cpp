#include "edgewatt/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <string_view>

#include <fmt/format.h>

namespace fs = std::filesystem;

namespace edgewatt::io {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return text;
}

const json& field(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) {
        throw ValidationError(fmt::format("{}: missing field '{}'", ctx, key));
    }
    return *it;
}

std::uint64_t u64_field(const json& j, const char* key, const std::string& ctx) {
    const json& v = field(j, key, ctx);
    if (!v.is_number_unsigned()) {
        throw ValidationError(
            fmt::format("{}: field '{}' must be a non-negative integer", ctx, key));
    }
    return v.get<std::uint64_t>();
}

double double_field(const json& j, const char* key, const std::string& ctx) {
    const json& v = field(j, key, ctx);
    if (!v.is_number()) {
        throw ValidationError(fmt::format("{}: field '{}' must be a number", ctx, key));
    }
    return v.get<double>();
}

std::string string_field(const json& j, const char* key, const std::string& ctx) {
    const json& v = field(j, key, ctx);
    if (!v.is_string()) {
        throw ValidationError(fmt::format("{}: field '{}' must be a string", ctx, key));
    }
    return v.get<std::string>();
}

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) {
        throw ValidationError(fmt::format("{}: expected a JSON object", ctx));
    }
}

void check_csv_safe(const std::string& id) {
    if (id.empty() || id.find_first_of(",\n\r") != std::string::npos) {
        throw ValidationError(
            fmt::format("config id '{}' is empty or contains CSV delimiter characters", id));
    }
}

std::string_view next_csv_field(std::string_view& rest, std::size_t line_no,
                                const std::string& source) {
    if (rest.empty()) {
        throw ValidationError(fmt::format("{}:{}: too few CSV fields", source, line_no));
    }
    std::size_t comma = rest.find(',');
    std::string_view out = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    return out;
}

std::uint64_t parse_u64(std::string_view s, const char* what, std::size_t line_no,
                        const std::string& source) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError(
            fmt::format("{}:{}: invalid {} '{}'", source, line_no, what, std::string(s)));
    }
    return v;
}

double parse_double(std::string_view s, const char* what, std::size_t line_no,
                    const std::string& source) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ValidationError(
            fmt::format("{}:{}: invalid {} '{}'", source, line_no, what, std::string(s)));
    }
    return v;
}

}  // namespace

json parse_json_file(const fs::path& path) {
    std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

LayerSpec layer_from_json(const json& j, const std::string& ctx) {
    require_object(j, ctx);
    std::string kind = string_field(j, "kind", ctx);
    LayerSpec layer;
    if (kind == "fc") {
        layer.payload = FcLayerSpec{u64_field(j, "i_size", ctx), u64_field(j, "o_size", ctx)};
    } else if (kind == "conv2d") {
        ConvLayerSpec conv;
        conv.i_size = u64_field(j, "i_size", ctx);
        conv.ifm = u64_field(j, "ifm", ctx);
        conv.ofm = u64_field(j, "ofm", ctx);
        conv.ksize = u64_field(j, "ksize", ctx);
        conv.stride = u64_field(j, "stride", ctx);
        conv.padding = j.contains("padding") ? u64_field(j, "padding", ctx) : 0;
        layer.payload = conv;
    } else {
        throw ValidationError(fmt::format("{}: unknown kind '{}'", ctx, kind));
    }
    if (j.contains("label")) {
        layer.label = string_field(j, "label", ctx);
    }
    try {
        validate(layer);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", ctx, e.what()));
    }
    return layer;
}

json layer_to_json(const LayerSpec& layer) {
    json j;
    if (layer.is_fc()) {
        j["kind"] = "fc";
        j["i_size"] = layer.fc().i_size;
        j["o_size"] = layer.fc().o_size;
    } else {
        const ConvLayerSpec& conv = layer.conv();
        j["kind"] = "conv2d";
        j["i_size"] = conv.i_size;
        j["ifm"] = conv.ifm;
        j["ofm"] = conv.ofm;
        j["ksize"] = conv.ksize;
        j["stride"] = conv.stride;
        if (conv.padding != 0) {
            j["padding"] = conv.padding;
        }
    }
    if (!layer.label.empty()) {
        j["label"] = layer.label;
    }
    return j;
}

ParsedNetwork parse_network(const json& j, bool skip_unknown) {
    require_object(j, "network");
    ParsedNetwork out;
    out.arch.name = string_field(j, "name", "network");
    const json& layers = field(j, "layers", "network");
    if (!layers.is_array()) {
        throw ValidationError("network: 'layers' must be an array");
    }
    for (std::size_t i = 0; i < layers.size(); ++i) {
        std::string ctx = fmt::format("layers[{}]", i);
        const json& lj = layers[i];
        require_object(lj, ctx);
        std::string kind = string_field(lj, "kind", ctx);
        if (kind != "fc" && kind != "conv2d") {
            if (skip_unknown) {
                out.skipped.push_back({i, kind});
                continue;
            }
            throw ValidationError(fmt::format("{}: unknown kind '{}'", ctx, kind));
        }
        out.arch.layers.push_back(layer_from_json(lj, ctx));
    }
    validate(out.arch);
    return out;
}

ParsedNetwork load_network(const fs::path& path, bool skip_unknown) {
    try {
        return parse_network(parse_json_file(path), skip_unknown);
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json network_to_json(const NetworkArch& arch) {
    json j;
    j["name"] = arch.name;
    j["layers"] = json::array();
    for (const LayerSpec& layer : arch.layers) {
        j["layers"].push_back(layer_to_json(layer));
    }
    return j;
}

TraceManifest manifest_from_json(const json& j) {
    require_object(j, "manifest");
    TraceManifest manifest;
    manifest.device_id = string_field(j, "device_id", "manifest");
    if (j.contains("delta_s")) {
        manifest.delta_s = double_field(j, "delta_s", "manifest");
    }
    const json& configs = field(j, "configs", "manifest");
    require_object(configs, "manifest.configs");
    for (const auto& [id, layer] : configs.items()) {
        manifest.configs[id] = layer_from_json(layer, fmt::format("manifest.configs['{}']", id));
    }
    validate(manifest);
    return manifest;
}

TraceManifest load_manifest(const fs::path& path) {
    try {
        return manifest_from_json(parse_json_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json manifest_to_json(const TraceManifest& manifest) {
    json configs = json::object();
    for (const auto& [id, layer] : manifest.configs) {
        configs[id] = layer_to_json(layer);
    }
    return json{{"device_id", manifest.device_id},
                {"delta_s", manifest.delta_s},
                {"configs", std::move(configs)}};
}

void save_manifest(const TraceManifest& manifest, const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    }
    out << manifest_to_json(manifest).dump(2) << '\n';
}

DeviceProfile profile_from_json(const json& j) {
    require_object(j, "profile");
    DeviceProfile profile;
    profile.device_id = string_field(j, "device_id", "profile");
    profile.a_c = double_field(j, "a_c", "profile");
    profile.b_c = double_field(j, "b_c", "profile");
    if (j.contains("a_f") && !j["a_f"].is_null()) {
        profile.a_f = double_field(j, "a_f", "profile");
    }
    if (j.contains("units")) {
        std::string units = string_field(j, "units", "profile");
        if (units != "J_per_MAC") {
            throw ValidationError(
                fmt::format("profile '{}': unsupported units '{}' (expected J_per_MAC)",
                            profile.device_id, units));
        }
    }
    validate(profile);
    return profile;
}

DeviceProfile load_profile(const fs::path& path) {
    try {
        return profile_from_json(parse_json_file(path));
    } catch (const ValidationError& e) {
        throw ValidationError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

json profile_to_json(const DeviceProfile& profile) {
    json j{{"device_id", profile.device_id},
           {"a_c", profile.a_c},
           {"b_c", profile.b_c},
           {"units", "J_per_MAC"}};
    if (profile.a_f) {
        j["a_f"] = *profile.a_f;
    }
    return j;
}

void save_profile(const DeviceProfile& profile, const fs::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    }
    out << profile_to_json(profile).dump(2) << '\n';
}

void write_trace_csv(std::ostream& out, const std::vector<PowerTrace>& traces) {
    fmt::memory_buffer buf;
    buf.append(std::string_view("config_id,run_id,slot_idx,power_mw\n"));
    for (const PowerTrace& trace : traces) {
        check_csv_safe(trace.config_id);
        for (std::size_t slot = 0; slot < trace.samples_mw.size(); ++slot) {
            fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", trace.config_id,
                           trace.run_id, slot, trace.samples_mw[slot]);
            if (buf.size() > (1u << 20)) {
                out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
                buf.clear();
            }
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw ValidationError("failed to write trace CSV");
    }
}

void save_trace_csv(const std::vector<PowerTrace>& traces, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    }
    write_trace_csv(out, traces);
}

std::vector<PowerTrace> read_trace_csv(std::istream& in, const TraceManifest& manifest,
                                       const std::string& source) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != "config_id,run_id,slot_idx,power_mw") {
        throw ValidationError(fmt::format(
            "{}:1: expected header 'config_id,run_id,slot_idx,power_mw'", source));
    }
    std::vector<PowerTrace> traces;
    PowerTrace current;
    bool open = false;
    std::uint64_t expected_slot = 0;

    auto flush = [&] {
        if (open) {
            traces.push_back(std::move(current));
            current = PowerTrace{};
            open = false;
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::string_view rest(line);
        std::string_view id_sv = next_csv_field(rest, line_no, source);
        std::uint64_t run = parse_u64(next_csv_field(rest, line_no, source), "run_id", line_no, source);
        std::uint64_t slot = parse_u64(next_csv_field(rest, line_no, source), "slot_idx", line_no, source);
        double power = parse_double(next_csv_field(rest, line_no, source), "power_mw", line_no, source);
        if (!rest.empty()) {
            throw ValidationError(fmt::format("{}:{}: too many CSV fields", source, line_no));
        }

        bool same_run = open && id_sv == current.config_id && run == current.run_id;
        if (!same_run) {
            std::string id(id_sv);
            if (open && (id < current.config_id ||
                         (id == current.config_id && run <= current.run_id))) {
                throw ValidationError(fmt::format(
                    "{}:{}: rows are not sorted by (config_id, run_id, slot_idx)", source,
                    line_no));
            }
            if (manifest.configs.find(id) == manifest.configs.end()) {
                throw ValidationError(fmt::format(
                    "{}:{}: config '{}' is not present in the manifest", source, line_no, id));
            }
            flush();
            current.config_id = std::move(id);
            current.run_id = run;
            open = true;
            expected_slot = 0;
        }
        if (slot != expected_slot) {
            throw ValidationError(fmt::format(
                "{}:{}: config '{}' run {}: expected slot_idx {}, found {} (gap)", source,
                line_no, current.config_id, current.run_id, expected_slot, slot));
        }
        ++expected_slot;
        current.samples_mw.push_back(power);
    }
    flush();
    return traces;
}

std::vector<PowerTrace> load_trace_csv(const fs::path& path, const TraceManifest& manifest) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    }
    return read_trace_csv(in, manifest, path.string());
}

void write_stats_csv(std::ostream& out, const std::vector<ConfigEnergyStats>& stats) {
    out << "config_id,n_runs,load,mean_energy_j,std_energy_j,ci99_j\n";
    for (const ConfigEnergyStats& s : stats) {
        check_csv_safe(s.config_id);
        out << fmt::format("{},{},{},{},{},{}\n", s.config_id, s.n_runs, s.computational_load,
                           s.mean_energy_j, s.std_energy_j, s.ci99_halfwidth_j);
    }
    if (!out) {
        throw ValidationError("failed to write stats CSV");
    }
}

void save_stats_csv(const std::vector<ConfigEnergyStats>& stats, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    }
    write_stats_csv(out, stats);
}

std::vector<ConfigEnergyStats> read_stats_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != "config_id,n_runs,load,mean_energy_j,std_energy_j,ci99_j") {
        throw ValidationError(fmt::format(
            "{}:1: expected header 'config_id,n_runs,load,mean_energy_j,std_energy_j,ci99_j'",
            source));
    }
    std::vector<ConfigEnergyStats> stats;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::string_view rest(line);
        ConfigEnergyStats s;
        s.config_id = std::string(next_csv_field(rest, line_no, source));
        s.n_runs = parse_u64(next_csv_field(rest, line_no, source), "n_runs", line_no, source);
        s.computational_load =
            parse_u64(next_csv_field(rest, line_no, source), "load", line_no, source);
        s.mean_energy_j =
            parse_double(next_csv_field(rest, line_no, source), "mean_energy_j", line_no, source);
        s.std_energy_j =
            parse_double(next_csv_field(rest, line_no, source), "std_energy_j", line_no, source);
        s.ci99_halfwidth_j =
            parse_double(next_csv_field(rest, line_no, source), "ci99_j", line_no, source);
        if (!rest.empty()) {
            throw ValidationError(fmt::format("{}:{}: too many CSV fields", source, line_no));
        }
        stats.push_back(std::move(s));
    }
    return stats;
}

std::vector<ConfigEnergyStats> load_stats_csv(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    }
    return read_stats_csv(in, path.string());
}

json estimate_report_to_json(const NetworkEstimate& estimate,
                             const std::vector<SkippedLayer>& skipped) {
    json layers = json::array();
    for (const LayerEnergy& layer : estimate.per_layer) {
        layers.push_back(json{{"index", layer.index},
                              {"kind", layer_kind_name(layer.kind)},
                              {"load", layer.load},
                              {"energy_j", layer.energy_j}});
    }
    json j{{"network", estimate.network_name},
           {"device_id", estimate.device_id},
           {"total_j", estimate.total_j},
           {"layers", std::move(layers)},
           {"cumulative", cumulative_profile(estimate)}};
    if (!skipped.empty()) {
        json sk = json::array();
        for (const SkippedLayer& s : skipped) {
            sk.push_back(json{{"index", s.index}, {"kind", s.kind}, {"energy_j", 0.0}});
        }
        j["skipped_layers"] = std::move(sk);
    }
    return j;
}

NetworkEstimate estimate_report_from_json(const json& j) {
    require_object(j, "estimate report");
    NetworkEstimate est;
    est.network_name = string_field(j, "network", "estimate report");
    est.device_id = string_field(j, "device_id", "estimate report");
    est.total_j = double_field(j, "total_j", "estimate report");
    const json& layers = field(j, "layers", "estimate report");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        std::string ctx = fmt::format("estimate report layers[{}]", i);
        const json& lj = layers[i];
        LayerEnergy layer;
        layer.index = u64_field(lj, "index", ctx);
        std::string kind = string_field(lj, "kind", ctx);
        if (kind != "fc" && kind != "conv2d") {
            throw ValidationError(fmt::format("{}: unknown kind '{}'", ctx, kind));
        }
        layer.kind = kind == "fc" ? LayerKind::fc : LayerKind::conv2d;
        layer.load = u64_field(lj, "load", ctx);
        layer.energy_j = double_field(lj, "energy_j", ctx);
        est.per_layer.push_back(std::move(layer));
    }
    return est;
}

json fit_report_to_json(const CalibrationReport& report) {
    json per_ofm = json::array();
    for (const SlopeSample& s : report.per_ofm.samples) {
        per_ofm.push_back(json{{"ofm", s.ofm},
                               {"slope", s.slope_j_per_mac},
                               {"r2", s.r2},
                               {"n_points", s.n_points}});
    }
    json j{{"device_id", report.profile.device_id},
           {"a_c", report.profile.a_c},
           {"b_c", report.profile.b_c},
           {"mse_hyperbolic", report.hyperbolic.mse},
           {"per_ofm", std::move(per_ofm)}};
    if (report.profile.a_f) {
        j["a_f"] = *report.profile.a_f;
    }
    if (report.fc) {
        j["fc"] = json{{"a_f", report.fc->a_f}, {"mse", report.fc->mse}, {"n", report.fc->n}};
    }
    if (!report.per_ofm.skipped.empty()) {
        json sk = json::array();
        for (const SkippedOfmGroup& g : report.per_ofm.skipped) {
            sk.push_back(json{{"ofm", g.ofm}, {"n_points", g.n_points}, {"reason", g.reason}});
        }
        j["skipped_ofm_groups"] = std::move(sk);
    }
    return j;
}

}  // namespace edgewatt::io
