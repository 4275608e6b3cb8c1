#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "edgewatt/errors.hpp"

namespace edgewatt {

enum class LayerKind { fc, conv2d };

const char* layer_kind_name(LayerKind kind);

// Fully connected layer: i_size input neurons fully wired to o_size outputs.
struct FcLayerSpec {
    std::uint64_t i_size = 1;
    std::uint64_t o_size = 1;
};

// Square 2-D convolutional layer. i_size is the input side (w = h), ifm the
// input depth, ofm the kernel count (one output map per kernel), ksize the
// square kernel side. padding is implicit zero padding per side; the default
// of 0 gives the plain unpadded formulas.
struct ConvLayerSpec {
    std::uint64_t i_size = 1;
    std::uint64_t ifm = 1;
    std::uint64_t ofm = 1;
    std::uint64_t ksize = 1;
    std::uint64_t stride = 1;
    std::uint64_t padding = 0;
};

struct LayerSpec {
    std::variant<FcLayerSpec, ConvLayerSpec> payload;
    std::string label;  // optional free text

    LayerKind kind() const {
        return payload.index() == 0 ? LayerKind::fc : LayerKind::conv2d;
    }
    bool is_fc() const { return kind() == LayerKind::fc; }
    bool is_conv() const { return kind() == LayerKind::conv2d; }
    const FcLayerSpec& fc() const { return std::get<FcLayerSpec>(payload); }
    const ConvLayerSpec& conv() const { return std::get<ConvLayerSpec>(payload); }
};

inline LayerSpec make_fc(std::uint64_t i_size, std::uint64_t o_size, std::string label = {}) {
    return LayerSpec{FcLayerSpec{i_size, o_size}, std::move(label)};
}

inline LayerSpec make_conv(std::uint64_t i_size, std::uint64_t ifm, std::uint64_t ofm,
                           std::uint64_t ksize, std::uint64_t stride = 1,
                           std::uint64_t padding = 0, std::string label = {}) {
    return LayerSpec{ConvLayerSpec{i_size, ifm, ofm, ksize, stride, padding}, std::move(label)};
}

// Ordered layer list; must be non-empty.
struct NetworkArch {
    std::string name;
    std::vector<LayerSpec> layers;
};

// Empirical per-device energy coefficients, all interpreted as joules per MAC
// (a_c, a_f) or joules per MAC per output map (b_c). a_f is absent until the
// device has been calibrated for fully connected layers.
struct DeviceProfile {
    std::string device_id;
    double a_c = 0.0;
    double b_c = 0.0;
    std::optional<double> a_f;
};

void validate(const FcLayerSpec& layer);
void validate(const ConvLayerSpec& layer);
void validate(const LayerSpec& layer);
void validate(const NetworkArch& arch);
void validate(const DeviceProfile& profile);

enum class LoadMode { exact, approx };

// MAC count of a fully connected layer: i_size * o_size.
// Throws ValidationError on 64-bit overflow.
std::uint64_t clf(const FcLayerSpec& layer);

// Output side of the convolution: floor((i_size + 2*padding - ksize) / stride) + 1.
std::uint64_t conv_out_side(const ConvLayerSpec& layer);

// MACs to produce one output map: out_side^2 * ifm * ksize^2.
std::uint64_t kclc_exact(const ConvLayerSpec& layer);

// Large-input approximation (i_size/stride)^2 * ifm * ksize^2.
// Only defined for padding == 0.
double kclc_approx(const ConvLayerSpec& layer);

// MAC count of the whole convolutional layer: kclc * ofm.
std::uint64_t clc_exact(const ConvLayerSpec& layer);
double clc_approx(const ConvLayerSpec& layer);

// Exact MAC count for either layer kind (CLF or CLC).
std::uint64_t layer_load(const LayerSpec& layer);

}  // namespace edgewatt
