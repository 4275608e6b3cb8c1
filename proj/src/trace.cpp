#include "edgewatt/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include "edgewatt/estimate.hpp"
#include "edgewatt/kernels.hpp"

namespace edgewatt {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h = (h ^ c) * 0x100000001b3ULL;
    }
    return h;
}

// One Gaussian draw per two engine outputs (Box-Muller, cosine branch only),
// independent of any library distribution internals.
class NormalSampler {
public:
    NormalSampler(std::uint64_t seed, double mean, double std_dev)
        : engine_(seed), mean_(mean), std_dev_(std_dev) {}

    double next() {
        if (std_dev_ == 0.0) {
            return mean_;
        }
        double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
        double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;          // [0, 1)
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
        return mean_ + std_dev_ * z;
    }

    // Truncated at 0: negative draws are rejected and redrawn.
    double next_nonnegative() {
        double p = next();
        while (p < 0.0) {
            p = next();
        }
        return p;
    }

private:
    std::mt19937_64 engine_;
    double mean_;
    double std_dev_;
};

}  // namespace

void validate(const TraceManifest& manifest) {
    if (!(manifest.delta_s > 0.0) || !std::isfinite(manifest.delta_s)) {
        throw ValidationError("manifest: delta_s must be finite and > 0");
    }
    for (const auto& [id, layer] : manifest.configs) {
        try {
            validate(layer);
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("manifest: config '{}': {}", id, e.what()));
        }
    }
}

RunEnergy integrate_run(const PowerTrace& trace, double delta_s, double baseline_mw) {
    if (!(delta_s > 0.0) || !std::isfinite(delta_s)) {
        throw ValidationError("integrate_run: delta_s must be finite and > 0");
    }
    if (trace.samples_mw.empty()) {
        throw ValidationError(fmt::format("config '{}' run {}: trace has no samples",
                                          trace.config_id, trace.run_id));
    }
    std::size_t bad = kernels::first_invalid_sample(trace.samples_mw);
    if (bad != kernels::npos) {
        throw ValidationError(
            fmt::format("config '{}' run {}: negative or non-finite power at slot {}",
                        trace.config_id, trace.run_id, bad));
    }
    const double n = static_cast<double>(trace.samples_mw.size());
    double avg = kernels::sum_exact(trace.samples_mw) / n;
    if (baseline_mw != 0.0) {
        avg -= baseline_mw;
        if (avg < 0.0) {
            throw ValidationError(
                fmt::format("config '{}' run {}: baseline {} mW exceeds the mean power",
                            trace.config_id, trace.run_id, baseline_mw));
        }
    }
    RunEnergy out;
    out.config_id = trace.config_id;
    out.run_id = trace.run_id;
    out.duration_s = n * delta_s;
    out.avg_power_mw = avg;
    out.energy_j = out.duration_s * out.avg_power_mw / 1000.0;
    return out;
}

double student_t_ci99_halfwidth(double std_dev, std::size_t n) {
    if (n < 2) {
        return 0.0;
    }
    boost::math::students_t_distribution<double> dist(static_cast<double>(n - 1));
    return boost::math::quantile(dist, 0.995) * std_dev / std::sqrt(static_cast<double>(n));
}

ConfigEnergyStats aggregate_config(const std::vector<RunEnergy>& runs, const LayerSpec& config) {
    if (runs.empty()) {
        throw ValidationError("aggregate_config: no runs");
    }
    const std::string& id = runs.front().config_id;
    for (const RunEnergy& run : runs) {
        if (run.config_id != id) {
            throw ValidationError(fmt::format(
                "aggregate_config: mixed config ids '{}' and '{}'", id, run.config_id));
        }
    }
    std::vector<double> energies;
    energies.reserve(runs.size());
    for (const RunEnergy& run : runs) {
        energies.push_back(run.energy_j);
    }
    const std::size_t n = runs.size();
    ConfigEnergyStats stats;
    stats.config_id = id;
    stats.n_runs = n;
    stats.computational_load = layer_load(config);
    stats.mean_energy_j = kernels::sum_exact(energies) / static_cast<double>(n);
    if (n >= 2) {
        std::vector<double> sq;
        sq.reserve(n);
        for (double e : energies) {
            double d = e - stats.mean_energy_j;
            sq.push_back(d * d);
        }
        stats.std_energy_j = std::sqrt(kernels::sum_exact(sq) / static_cast<double>(n - 1));
        stats.ci99_halfwidth_j = student_t_ci99_halfwidth(stats.std_energy_j, n);
    }
    return stats;
}

std::vector<HistogramBin> power_histogram(const std::vector<RunEnergy>& runs, std::size_t bins) {
    if (bins < 1) {
        throw ValidationError("power_histogram: bins must be >= 1");
    }
    if (runs.empty()) {
        throw ValidationError("power_histogram: no runs");
    }
    double lo = runs.front().avg_power_mw;
    double hi = lo;
    for (const RunEnergy& run : runs) {
        lo = std::min(lo, run.avg_power_mw);
        hi = std::max(hi, run.avg_power_mw);
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (const RunEnergy& run : runs) {
        auto idx = static_cast<std::size_t>((run.avg_power_mw - lo) / width);
        counts[std::min(idx, bins - 1)] += 1;
    }
    std::vector<HistogramBin> out(bins);
    const double norm = static_cast<double>(runs.size()) * width;
    for (std::size_t i = 0; i < bins; ++i) {
        out[i].center_mw = lo + (static_cast<double>(i) + 0.5) * width;
        out[i].density = static_cast<double>(counts[i]) / norm;
    }
    return out;
}

double synth_model_energy(const LayerSpec& config, const DeviceProfile& profile) {
    return layer_energy(config, profile);
}

SynthCampaign synthesize_campaign(const DeviceProfile& profile, const CampaignOptions& opts) {
    validate(profile);
    if (opts.ofm_values.empty()) {
        throw ValidationError("synthesize_campaign: ofm list is empty");
    }
    if (opts.points_per_ofm < 2) {
        throw ValidationError("synthesize_campaign: need at least 2 load points per ofm");
    }
    if (!(opts.target_energy_j > 0.0)) {
        throw ValidationError("synthesize_campaign: target_energy_j must be > 0");
    }

    constexpr std::uint64_t kIfm = 8;
    constexpr std::uint64_t kKsize = 3;

    SynthCampaign campaign;
    campaign.manifest.device_id = profile.device_id;
    campaign.manifest.delta_s = opts.synth.delta_s;

    for (std::uint64_t ofm : opts.ofm_values) {
        if (ofm < 1) {
            throw ValidationError("synthesize_campaign: ofm values must be >= 1");
        }
        std::uint64_t prev_side = 0;
        for (std::size_t p = 0; p < opts.points_per_ofm; ++p) {
            // Size the output side so that clc * (a_c + b_c*ofm) lands near
            // (p+1) * target_energy_j; distinct sides give distinct loads.
            double target = opts.target_energy_j * static_cast<double>(p + 1);
            double kernel_macs =
                target / (profile.a_c + profile.b_c * static_cast<double>(ofm));
            double side_d = std::sqrt(kernel_macs / static_cast<double>(kIfm * kKsize * kKsize));
            auto side = static_cast<std::uint64_t>(std::llround(side_d));
            side = std::max<std::uint64_t>({side, 1, prev_side + 1});
            prev_side = side;
            ConvLayerSpec conv{side + kKsize - 1, kIfm, ofm, kKsize, 1, 0};
            campaign.manifest.configs[fmt::format("conv-m{:04}-p{}", ofm, p)] =
                LayerSpec{conv, {}};
        }
    }

    if (opts.include_fc) {
        if (profile.a_f) {
            std::uint64_t prev_side = 0;
            for (std::size_t p = 0; p < opts.points_per_ofm; ++p) {
                double target = opts.target_energy_j * static_cast<double>(p + 1);
                double macs = target / *profile.a_f;
                auto side = static_cast<std::uint64_t>(std::llround(std::sqrt(macs)));
                side = std::max<std::uint64_t>({side, 1, prev_side + 1});
                prev_side = side;
                campaign.manifest.configs[fmt::format("fc-p{}", p)] =
                    LayerSpec{FcLayerSpec{side, side}, {}};
            }
        } else {
            campaign.warnings.push_back(fmt::format(
                "profile '{}' has no a_f; generating a conv-only campaign", profile.device_id));
        }
    }

    for (const auto& [id, layer] : campaign.manifest.configs) {
        std::vector<PowerTrace> traces = synthesize_traces(id, layer, profile, opts.synth);
        for (PowerTrace& trace : traces) {
            campaign.traces.push_back(std::move(trace));
        }
    }
    return campaign;
}

std::vector<ConfigEnergyStats> compute_config_stats(const std::vector<PowerTrace>& traces,
                                                    const TraceManifest& manifest,
                                                    double baseline_mw) {
    validate(manifest);
    std::map<std::string, std::vector<RunEnergy>> by_config;
    for (const PowerTrace& trace : traces) {
        if (manifest.configs.find(trace.config_id) == manifest.configs.end()) {
            throw ValidationError(fmt::format("config '{}' is not present in the manifest",
                                              trace.config_id));
        }
        by_config[trace.config_id].push_back(integrate_run(trace, manifest.delta_s, baseline_mw));
    }
    std::vector<ConfigEnergyStats> stats;
    stats.reserve(by_config.size());
    for (const auto& [id, runs] : by_config) {
        stats.push_back(aggregate_config(runs, manifest.configs.at(id)));
    }
    return stats;
}

std::vector<PowerTrace> synthesize_traces(const std::string& config_id, const LayerSpec& config,
                                          const DeviceProfile& profile, const SynthOptions& opts) {
    if (opts.n_runs < 1) {
        throw ValidationError("synthesize_traces: n_runs must be >= 1");
    }
    if (!(opts.mean_power_mw > 0.0)) {
        throw ValidationError("synthesize_traces: mean_power_mw must be > 0");
    }
    if (!(opts.power_std_mw >= 0.0)) {
        throw ValidationError("synthesize_traces: power_std_mw must be >= 0");
    }
    if (!(opts.delta_s > 0.0)) {
        throw ValidationError("synthesize_traces: delta_s must be > 0");
    }
    const double energy = synth_model_energy(config, profile);  // throws if uncalibrated
    if (!(energy > 0.0)) {
        throw ValidationError(fmt::format("config '{}': model energy is not positive", config_id));
    }

    const double slot_energy = opts.mean_power_mw * 1e-3 * opts.delta_s;
    auto slots = static_cast<std::uint64_t>(std::llround(energy / slot_energy));
    slots = std::max<std::uint64_t>(slots, 1);
    // Slot counts are integral, so the requested mean only reproduces the
    // model energy to within half a slot. Recenter the per-slot mean so the
    // expected integrated energy lands on the model energy itself.
    const double mean_mw = energy * 1000.0 / (static_cast<double>(slots) * opts.delta_s);

    std::vector<PowerTrace> traces;
    traces.reserve(opts.n_runs);
    const std::uint64_t config_hash = fnv1a(config_id);
    for (std::size_t run = 0; run < opts.n_runs; ++run) {
        std::uint64_t state = opts.seed;
        state ^= splitmix64(state) + config_hash;
        state ^= splitmix64(state) + run;
        NormalSampler sampler(splitmix64(state), mean_mw, opts.power_std_mw);
        PowerTrace trace;
        trace.config_id = config_id;
        trace.run_id = run;
        trace.samples_mw.reserve(slots);
        for (std::uint64_t s = 0; s < slots; ++s) {
            trace.samples_mw.push_back(sampler.next_nonnegative());
        }
        traces.push_back(std::move(trace));
    }
    return traces;
}

}  // namespace edgewatt
