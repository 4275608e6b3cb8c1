#include "edgewatt/estimate.hpp"

#include <fmt/format.h>

namespace edgewatt {

double energy_conv2d(const ConvLayerSpec& layer, const DeviceProfile& profile) {
    validate(profile);
    double kernel_macs = static_cast<double>(kclc_exact(layer));
    return kernel_macs * (profile.a_c + profile.b_c * static_cast<double>(layer.ofm));
}

double energy_fc(const FcLayerSpec& layer, const DeviceProfile& profile) {
    validate(profile);
    if (!profile.a_f) {
        throw CalibrationError(fmt::format(
            "device '{}' is not calibrated for fully connected layers (a_f missing)",
            profile.device_id));
    }
    return static_cast<double>(clf(layer)) * *profile.a_f;
}

double layer_energy(const LayerSpec& layer, const DeviceProfile& profile) {
    return layer.is_fc() ? energy_fc(layer.fc(), profile) : energy_conv2d(layer.conv(), profile);
}

NetworkEstimate estimate_network(const NetworkArch& arch, const DeviceProfile& profile) {
    validate(arch);
    NetworkEstimate est;
    est.network_name = arch.name;
    est.device_id = profile.device_id;
    est.per_layer.reserve(arch.layers.size());
    double total = 0.0;
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        const LayerSpec& layer = arch.layers[i];
        double energy = 0.0;
        try {
            energy = layer_energy(layer, profile);
        } catch (const CalibrationError& e) {
            throw CalibrationError(
                fmt::format("layer {} ({}): {}", i, layer_kind_name(layer.kind()), e.what()));
        }
        est.per_layer.push_back(LayerEnergy{i, layer.kind(), layer_load(layer), energy});
        total += energy;
    }
    est.total_j = total;
    return est;
}

std::vector<double> cumulative_profile(const NetworkEstimate& estimate) {
    std::vector<double> prefix;
    prefix.reserve(estimate.per_layer.size());
    double running = 0.0;
    for (const LayerEnergy& layer : estimate.per_layer) {
        running += layer.energy_j;
        prefix.push_back(running);
    }
    return prefix;
}

std::vector<DeviceComparisonRow> compare_devices(const NetworkArch& arch,
                                                 const std::vector<DeviceProfile>& profiles) {
    if (profiles.empty()) {
        throw ValidationError("compare_devices: no profiles given");
    }
    std::vector<DeviceComparisonRow> rows;
    rows.reserve(profiles.size());
    const NetworkEstimate* baseline = nullptr;
    std::vector<NetworkEstimate> estimates(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        DeviceComparisonRow row;
        row.device_id = profiles[i].device_id;
        try {
            estimates[i] = estimate_network(arch, profiles[i]);
            row.estimable = true;
            row.total_j = estimates[i].total_j;
            if (!baseline) {
                baseline = &estimates[i];
            }
        } catch (const std::exception& e) {
            row.blocked_reason = e.what();
        }
        rows.push_back(std::move(row));
    }
    if (baseline) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!rows[i].estimable) {
                continue;
            }
            rows[i].layer_ratios.reserve(baseline->per_layer.size());
            for (std::size_t j = 0; j < baseline->per_layer.size(); ++j) {
                rows[i].layer_ratios.push_back(estimates[i].per_layer[j].energy_j /
                                               baseline->per_layer[j].energy_j);
            }
        }
    }
    return rows;
}

}  // namespace edgewatt
