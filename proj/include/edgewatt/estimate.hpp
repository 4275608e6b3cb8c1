#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgewatt/arch.hpp"

namespace edgewatt {

struct LayerEnergy {
    std::size_t index = 0;
    LayerKind kind = LayerKind::fc;
    std::uint64_t load = 0;  // CLF or exact CLC
    double energy_j = 0.0;
};

struct NetworkEstimate {
    std::string network_name;
    std::string device_id;
    std::vector<LayerEnergy> per_layer;
    double total_j = 0.0;  // running sum of per_layer energies, in layer order
};

// Average inference energy of one convolutional layer:
// kclc_exact * (a_c + b_c * ofm), joules.
double energy_conv2d(const ConvLayerSpec& layer, const DeviceProfile& profile);

// Average inference energy of one fully connected layer: clf * a_f, joules.
// Throws CalibrationError when the profile carries no a_f.
double energy_fc(const FcLayerSpec& layer, const DeviceProfile& profile);

double layer_energy(const LayerSpec& layer, const DeviceProfile& profile);

// Whole-network estimate; aborts on the first layer the profile cannot
// price, naming its index.
NetworkEstimate estimate_network(const NetworkArch& arch, const DeviceProfile& profile);

// Prefix energies per layer index; the last entry equals total_j exactly.
// Useful to pick a split point when only a prefix runs on the device.
std::vector<double> cumulative_profile(const NetworkEstimate& estimate);

struct DeviceComparisonRow {
    std::string device_id;
    bool estimable = false;
    double total_j = 0.0;
    // Per-layer energy relative to the first estimable profile in the list.
    std::vector<double> layer_ratios;
    std::string blocked_reason;
};

std::vector<DeviceComparisonRow> compare_devices(const NetworkArch& arch,
                                                 const std::vector<DeviceProfile>& profiles);

}  // namespace edgewatt
