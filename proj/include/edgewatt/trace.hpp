#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "edgewatt/arch.hpp"

namespace edgewatt {

// Campaign metadata: which device was measured, the timeslot length, and the
// layer configuration behind every config id appearing in the trace file.
struct TraceManifest {
    std::string device_id;
    double delta_s = 1e-4;  // seconds per timeslot
    std::map<std::string, LayerSpec> configs;
};

void validate(const TraceManifest& manifest);

// Timeslotted board-power readings of a single inference run, milliwatts.
struct PowerTrace {
    std::string config_id;
    std::uint64_t run_id = 0;
    std::vector<double> samples_mw;
};

struct RunEnergy {
    std::string config_id;
    std::uint64_t run_id = 0;
    double duration_s = 0.0;
    double avg_power_mw = 0.0;
    double energy_j = 0.0;  // duration_s * avg_power_mw / 1000
};

struct ConfigEnergyStats {
    std::string config_id;
    std::size_t n_runs = 0;
    std::uint64_t computational_load = 0;  // CLF or exact CLC of the config
    double mean_energy_j = 0.0;
    double std_energy_j = 0.0;      // sample standard deviation, 0 for n = 1
    double ci99_halfwidth_j = 0.0;  // t(0.995, n-1) * std / sqrt(n), 0 for n = 1
};

// Integrates one run: energy = duration * average power. The average is an
// order-independent exact mean, so permuting the samples cannot change the
// result. baseline_mw, when nonzero, is subtracted from the average before
// integration (idle-power removal).
RunEnergy integrate_run(const PowerTrace& trace, double delta_s, double baseline_mw = 0.0);

// Mean / sample std / 99% CI half-width over the run energies of one config.
ConfigEnergyStats aggregate_config(const std::vector<RunEnergy>& runs, const LayerSpec& config);

// t(0.995, n-1) * std_dev / sqrt(n); 0 when n < 2.
double student_t_ci99_halfwidth(double std_dev, std::size_t n);

struct HistogramBin {
    double center_mw = 0.0;
    double density = 0.0;  // sums to 1 when multiplied by the bin width
};

// Normalized histogram of the per-run average board power.
std::vector<HistogramBin> power_histogram(const std::vector<RunEnergy>& runs, std::size_t bins);

struct SynthOptions {
    std::size_t n_runs = 50;
    double mean_power_mw = 5000.0;
    double power_std_mw = 0.0;
    double delta_s = 1e-4;
    std::uint64_t seed = 0;
};

// Draws per-slot powers i.i.d. from a Gaussian truncated at 0. The slot
// count is round(E / (mean_power_mw * 1e-3 * delta_s)) with E the model
// energy of the config under the profile, and the per-slot mean is then
// adjusted so the expected integrated energy equals E exactly rather than
// to within half a slot. Deterministic for a fixed seed.
std::vector<PowerTrace> synthesize_traces(const std::string& config_id, const LayerSpec& config,
                                          const DeviceProfile& profile, const SynthOptions& opts);

// Model energy of one config under a profile (the ground truth the
// synthesizer targets).
double synth_model_energy(const LayerSpec& config, const DeviceProfile& profile);

// Integrates every trace and aggregates per config, ordered by config id.
std::vector<ConfigEnergyStats> compute_config_stats(const std::vector<PowerTrace>& traces,
                                                    const TraceManifest& manifest,
                                                    double baseline_mw = 0.0);

// A calibration campaign: one conv group per ofm value with points_per_ofm
// distinct loads each (layer shapes are sized so the model energies land
// near multiples of target_energy_j), plus a small set of FC configs when
// the profile carries a_f.
struct CampaignOptions {
    SynthOptions synth;
    std::vector<std::uint64_t> ofm_values = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
    std::size_t points_per_ofm = 4;
    double target_energy_j = 0.3;
    bool include_fc = true;
};

struct SynthCampaign {
    TraceManifest manifest;
    std::vector<PowerTrace> traces;  // ordered by (config_id, run_id, slot)
    std::vector<std::string> warnings;
};

SynthCampaign synthesize_campaign(const DeviceProfile& profile, const CampaignOptions& opts);

}  // namespace edgewatt
