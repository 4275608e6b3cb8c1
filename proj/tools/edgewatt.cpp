// edgewatt: estimate the inference energy of feed-forward networks on edge
// devices, and calibrate device coefficients from power-measurement traces.
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error,
// 3 missing-calibration error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "edgewatt/calibrate.hpp"
#include "edgewatt/estimate.hpp"
#include "edgewatt/io.hpp"
#include "edgewatt/kernels.hpp"
#include "edgewatt/profiles.hpp"
#include "edgewatt/trace.hpp"

namespace fs = std::filesystem;
using namespace edgewatt;

namespace {

constexpr const char* kVersion = "edgewatt 1.0.0";

std::string sig6(double v) {
    return fmt::format("{:.6g}", v);
}

void write_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::fputs(text.c_str(), stdout);
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw ValidationError(fmt::format("cannot write '{}'", out_path));
    }
    out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings) {
        fmt::print(stderr, "warning: {}\n", w);
    }
}

struct ProfileChoice {
    std::string device_id;     // --device
    std::string profile_path;  // --profile
};

DeviceProfile resolve_profile(const ProfileChoice& choice) {
    if (!choice.profile_path.empty()) {
        return io::load_profile(choice.profile_path);
    }
    return profiles::resolve(choice.device_id);
}

void add_profile_options(CLI::App* sub, ProfileChoice& choice) {
    auto* grp = sub->add_option_group("device profile");
    grp->add_option("--device", choice.device_id, "Device id of a bundled or user profile");
    grp->add_option("--profile", choice.profile_path, "Path of a device profile JSON file");
    grp->require_option(1);
}

// --- estimate ---------------------------------------------------------------

struct EstimateOpts {
    std::string arch_path;
    ProfileChoice profile;
    std::string format = "table";
    std::string out_path;
    bool skip_unknown = false;
};

std::string estimate_table(const NetworkEstimate& est,
                           const std::vector<io::SkippedLayer>& skipped) {
    std::string out = fmt::format("network {} on {}\n", est.network_name, est.device_id);
    out += fmt::format("{:<6} {:<7} {:>14} {:>14} {:>14}\n", "index", "kind", "load",
                       "energy [J]", "cumulative [J]");
    std::vector<double> prefix = cumulative_profile(est);
    for (std::size_t i = 0; i < est.per_layer.size(); ++i) {
        const LayerEnergy& l = est.per_layer[i];
        out += fmt::format("{:<6} {:<7} {:>14} {:>14} {:>14}\n", l.index,
                           layer_kind_name(l.kind), l.load, sig6(l.energy_j), sig6(prefix[i]));
    }
    for (const io::SkippedLayer& s : skipped) {
        out += fmt::format("skipped layer {} (kind '{}'): contributes 0 J\n", s.index, s.kind);
    }
    out += fmt::format("total: {} J\n", sig6(est.total_j));
    return out;
}

std::string estimate_csv(const NetworkEstimate& est) {
    std::string out = "index,kind,load,energy_j,cumulative_j\n";
    std::vector<double> prefix = cumulative_profile(est);
    for (std::size_t i = 0; i < est.per_layer.size(); ++i) {
        const LayerEnergy& l = est.per_layer[i];
        out += fmt::format("{},{},{},{},{}\n", l.index, layer_kind_name(l.kind), l.load,
                           l.energy_j, prefix[i]);
    }
    return out;
}

void run_estimate(const EstimateOpts& opts) {
    io::ParsedNetwork parsed = io::load_network(opts.arch_path, opts.skip_unknown);
    if (!parsed.skipped.empty()) {
        for (const io::SkippedLayer& s : parsed.skipped) {
            fmt::print(stderr, "warning: skipping layer {} of unknown kind '{}' (0 J)\n",
                       s.index, s.kind);
        }
    }
    DeviceProfile profile = resolve_profile(opts.profile);
    NetworkEstimate est = estimate_network(parsed.arch, profile);
    if (opts.format == "json") {
        write_text(io::estimate_report_to_json(est, parsed.skipped).dump(2) + "\n",
                   opts.out_path);
    } else if (opts.format == "csv") {
        write_text(estimate_csv(est), opts.out_path);
    } else {
        write_text(estimate_table(est, parsed.skipped), opts.out_path);
    }
}

// --- load -------------------------------------------------------------------

struct LoadOpts {
    std::string arch_path;
    std::string mode = "exact";
    std::string format = "table";
};

void run_load(const LoadOpts& opts) {
    io::ParsedNetwork parsed = io::load_network(opts.arch_path, false);
    const bool exact = opts.mode == "exact";
    struct Row {
        std::size_t index;
        const char* kind;
        std::uint64_t load_exact;
        double load_approx;
    };
    std::vector<Row> rows;
    for (std::size_t i = 0; i < parsed.arch.layers.size(); ++i) {
        const LayerSpec& layer = parsed.arch.layers[i];
        Row row{i, layer_kind_name(layer.kind()), 0, 0.0};
        if (layer.is_fc()) {
            row.load_exact = clf(layer.fc());
            row.load_approx = static_cast<double>(row.load_exact);
        } else if (exact) {
            row.load_exact = clc_exact(layer.conv());
        } else {
            row.load_approx = clc_approx(layer.conv());
        }
        rows.push_back(row);
    }
    auto load_str = [&](const Row& r) {
        if (exact || std::string_view(r.kind) == "fc") {
            return fmt::format("{}", exact ? r.load_exact : static_cast<std::uint64_t>(
                                                                r.load_approx));
        }
        return fmt::format("{}", r.load_approx);
    };
    if (opts.format == "json") {
        io::json layers = io::json::array();
        for (const Row& r : rows) {
            io::json lj{{"index", r.index}, {"kind", r.kind}};
            if (exact) {
                lj["load"] = r.load_exact;
            } else {
                lj["load"] = std::string_view(r.kind) == "fc"
                                 ? io::json(r.load_exact)
                                 : io::json(r.load_approx);
            }
            layers.push_back(std::move(lj));
        }
        io::json j{{"network", parsed.arch.name}, {"mode", opts.mode}, {"layers", layers}};
        write_text(j.dump(2) + "\n", "");
    } else if (opts.format == "csv") {
        std::string out = "index,kind,load\n";
        for (const Row& r : rows) {
            out += fmt::format("{},{},{}\n", r.index, r.kind, load_str(r));
        }
        write_text(out, "");
    } else {
        std::string out = fmt::format("network {} ({} mode)\n", parsed.arch.name, opts.mode);
        out += fmt::format("{:<6} {:<7} {:>18}\n", "index", "kind", "load [MAC]");
        for (const Row& r : rows) {
            out += fmt::format("{:<6} {:<7} {:>18}\n", r.index, r.kind, load_str(r));
        }
        write_text(out, "");
    }
}

// --- trace-energy -----------------------------------------------------------

struct TraceEnergyOpts {
    std::string trace_path;
    std::string manifest_path;
    std::string out_path;
    double baseline_mw = 0.0;
};

void run_trace_energy(const TraceEnergyOpts& opts) {
    TraceManifest manifest = io::load_manifest(opts.manifest_path);
    std::vector<PowerTrace> traces = io::load_trace_csv(opts.trace_path, manifest);
    std::vector<ConfigEnergyStats> stats =
        compute_config_stats(traces, manifest, opts.baseline_mw);
    if (opts.out_path.empty() || opts.out_path == "-") {
        io::write_stats_csv(std::cout, stats);
    } else {
        io::save_stats_csv(stats, opts.out_path);
        fmt::print("wrote stats for {} configs ({} runs) to {}\n", stats.size(), traces.size(),
                   opts.out_path);
    }
}

// --- fit ----------------------------------------------------------------------

struct FitOpts {
    std::string stats_path;
    std::string manifest_path;
    std::string device_id;
    std::string out_path;
    std::string report_path;
};

void run_fit(const FitOpts& opts) {
    TraceManifest manifest = io::load_manifest(opts.manifest_path);
    std::vector<ConfigEnergyStats> stats = io::load_stats_csv(opts.stats_path);
    CalibrationReport report = calibrate_device(stats, manifest, opts.device_id);
    print_warnings(report.warnings);
    if (!opts.out_path.empty()) {
        io::save_profile(report.profile, opts.out_path);
    }
    std::string report_text = io::fit_report_to_json(report).dump(2) + "\n";
    std::fputs(report_text.c_str(), stdout);
    if (!opts.report_path.empty()) {
        write_text(report_text, opts.report_path);
    }
}

// --- synth ------------------------------------------------------------------

struct SynthCliOpts {
    ProfileChoice profile;
    std::string out_trace;
    std::string out_manifest;
    CampaignOptions campaign;
    bool no_fc = false;
};

void run_synth(const SynthCliOpts& opts) {
    DeviceProfile profile = resolve_profile(opts.profile);
    CampaignOptions campaign = opts.campaign;
    campaign.include_fc = !opts.no_fc;
    SynthCampaign synth = synthesize_campaign(profile, campaign);
    print_warnings(synth.warnings);
    io::save_manifest(synth.manifest, opts.out_manifest);
    io::save_trace_csv(synth.traces, opts.out_trace);
    std::size_t samples = 0;
    for (const PowerTrace& t : synth.traces) {
        samples += t.samples_mw.size();
    }
    fmt::print("wrote {} configs, {} runs, {} samples to {} and {}\n",
               synth.manifest.configs.size(), synth.traces.size(), samples, opts.out_trace,
               opts.out_manifest);
}

// --- devices ----------------------------------------------------------------

struct DevicesOpts {
    std::string format = "table";
};

void run_devices(const DevicesOpts& opts) {
    std::vector<std::string> warnings;
    std::vector<profiles::ResolvedProfile> all = profiles::list_all(&warnings);
    print_warnings(warnings);
    if (opts.format == "json") {
        io::json j = io::json::array();
        for (const profiles::ResolvedProfile& p : all) {
            io::json pj = io::profile_to_json(p.profile);
            pj["source"] = p.source;
            j.push_back(std::move(pj));
        }
        fmt::print("{}\n", j.dump(2));
        return;
    }
    fmt::print("{:<18} {:>13} {:>13} {:>13} {:<10} {}\n", "device-id", "a_c [J/MAC]",
               "b_c [J/MAC/ofm]", "a_f [J/MAC]", "units", "source");
    for (const profiles::ResolvedProfile& p : all) {
        fmt::print("{:<18} {:>13} {:>13} {:>13} {:<10} {}\n", p.profile.device_id,
                   sig6(p.profile.a_c), sig6(p.profile.b_c),
                   p.profile.a_f ? sig6(*p.profile.a_f) : "-", "J_per_MAC", p.source);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inference energy estimation and calibration for edge devices"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    EstimateOpts estimate_opts;
    auto* est = app.add_subcommand("estimate", "Estimate the inference energy of a network");
    est->add_option("arch", estimate_opts.arch_path, "Architecture JSON file")->required();
    add_profile_options(est, estimate_opts.profile);
    est->add_option("--format", estimate_opts.format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));
    est->add_option("--out", estimate_opts.out_path, "Write the report to a file");
    est->add_flag("--skip-unknown", estimate_opts.skip_unknown,
                  "Skip layers of unknown kind (0 J) instead of failing");

    LoadOpts load_opts;
    auto* load = app.add_subcommand("load", "Per-layer computational load of a network");
    load->add_option("arch", load_opts.arch_path, "Architecture JSON file")->required();
    load->add_option("--mode", load_opts.mode, "Load counting mode")
        ->check(CLI::IsMember({"exact", "approx"}));
    load->add_option("--format", load_opts.format, "Output format")
        ->check(CLI::IsMember({"table", "json", "csv"}));

    TraceEnergyOpts te_opts;
    auto* te = app.add_subcommand("trace-energy",
                                  "Integrate a power trace CSV into per-config energy stats");
    te->add_option("trace", te_opts.trace_path, "Trace CSV file")->required();
    te->add_option("manifest", te_opts.manifest_path, "Manifest JSON file")->required();
    te->add_option("--out", te_opts.out_path, "Stats CSV output path (default stdout)");
    te->add_option("--baseline-mw", te_opts.baseline_mw,
                   "Idle power to subtract from each run's average")
        ->check(CLI::NonNegativeNumber);

    FitOpts fit_opts;
    auto* fit = app.add_subcommand("fit", "Fit device coefficients from energy stats");
    fit->add_option("stats", fit_opts.stats_path, "Stats CSV file")->required();
    fit->add_option("manifest", fit_opts.manifest_path, "Manifest JSON file")->required();
    fit->add_option("--device-id", fit_opts.device_id, "Device id for the fitted profile")
        ->required();
    fit->add_option("--out", fit_opts.out_path, "Write the device profile JSON here");
    fit->add_option("--report", fit_opts.report_path, "Also write the fit report to a file");

    SynthCliOpts synth_opts;
    auto* synth = app.add_subcommand("synth", "Synthesize a calibration campaign");
    add_profile_options(synth, synth_opts.profile);
    synth->add_option("--out-trace", synth_opts.out_trace, "Trace CSV output path")->required();
    synth->add_option("--out-manifest", synth_opts.out_manifest, "Manifest JSON output path")
        ->required();
    synth->add_option("--runs", synth_opts.campaign.synth.n_runs, "Runs per config")
        ->check(CLI::PositiveNumber);
    synth->add_option("--mean-power-mw", synth_opts.campaign.synth.mean_power_mw,
                      "Target mean board power")
        ->check(CLI::PositiveNumber);
    synth->add_option("--power-std-mw", synth_opts.campaign.synth.power_std_mw,
                      "Per-slot power standard deviation")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--delta-s", synth_opts.campaign.synth.delta_s, "Timeslot length, seconds")
        ->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_opts.campaign.synth.seed, "RNG seed");
    synth->add_option("--ofm", synth_opts.campaign.ofm_values,
                      "ofm values of the conv groups (default powers of two 1..512)");
    synth->add_option("--points-per-ofm", synth_opts.campaign.points_per_ofm,
                      "Distinct load points per ofm group");
    synth->add_option("--target-energy-j", synth_opts.campaign.target_energy_j,
                      "Model energy of the smallest point in each group")
        ->check(CLI::PositiveNumber);
    synth->add_flag("--no-fc", synth_opts.no_fc, "Generate a conv-only campaign");

    DevicesOpts devices_opts;
    auto* devices = app.add_subcommand("devices", "List bundled and user device profiles");
    devices->add_option("--format", devices_opts.format, "Output format")
        ->check(CLI::IsMember({"table", "json"}));

    try {
        app.parse(argc, argv);
        if (est->parsed()) {
            run_estimate(estimate_opts);
        } else if (load->parsed()) {
            run_load(load_opts);
        } else if (te->parsed()) {
            run_trace_energy(te_opts);
        } else if (fit->parsed()) {
            run_fit(fit_opts);
        } else if (synth->parsed()) {
            run_synth(synth_opts);
        } else if (devices->parsed()) {
            run_devices(devices_opts);
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const CalibrationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    return 0;
}
