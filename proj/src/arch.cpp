#include "edgewatt/arch.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace edgewatt {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw ValidationError(fmt::format("{}: {} * {} overflows 64-bit load range", what, a, b));
    }
    return r;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw ValidationError(fmt::format("{}: {} + {} overflows 64-bit range", what, a, b));
    }
    return r;
}

// i_size + 2*padding, checked. Shared by validation and output-side math.
std::uint64_t padded_side(const ConvLayerSpec& layer) {
    std::uint64_t pad2 = checked_mul(layer.padding, 2, "conv padding");
    return checked_add(layer.i_size, pad2, "conv padded input side");
}

}  // namespace

const char* layer_kind_name(LayerKind kind) {
    return kind == LayerKind::fc ? "fc" : "conv2d";
}

void validate(const FcLayerSpec& layer) {
    if (layer.i_size < 1 || layer.o_size < 1) {
        throw ValidationError("fc layer: i_size and o_size must be >= 1");
    }
}

void validate(const ConvLayerSpec& layer) {
    if (layer.i_size < 1 || layer.ifm < 1 || layer.ofm < 1 || layer.ksize < 1 ||
        layer.stride < 1) {
        throw ValidationError("conv2d layer: i_size, ifm, ofm, ksize and stride must be >= 1");
    }
    if (layer.ksize > padded_side(layer)) {
        throw ValidationError(fmt::format(
            "conv2d layer: ksize {} exceeds padded input side {} (i_size {} + 2*padding {})",
            layer.ksize, padded_side(layer), layer.i_size, layer.padding));
    }
}

void validate(const LayerSpec& layer) {
    if (layer.is_fc()) {
        validate(layer.fc());
    } else {
        validate(layer.conv());
    }
}

void validate(const NetworkArch& arch) {
    if (arch.layers.empty()) {
        throw ValidationError(fmt::format("network '{}': layer list is empty", arch.name));
    }
    for (std::size_t i = 0; i < arch.layers.size(); ++i) {
        try {
            validate(arch.layers[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(fmt::format("network '{}': layers[{}]: {}", arch.name, i, e.what()));
        }
    }
}

void validate(const DeviceProfile& profile) {
    if (!(profile.a_c > 0.0) || !std::isfinite(profile.a_c)) {
        throw ValidationError(fmt::format("profile '{}': a_c must be finite and > 0", profile.device_id));
    }
    if (!(profile.b_c >= 0.0) || !std::isfinite(profile.b_c)) {
        throw ValidationError(fmt::format("profile '{}': b_c must be finite and >= 0", profile.device_id));
    }
    if (profile.a_f && (!(*profile.a_f > 0.0) || !std::isfinite(*profile.a_f))) {
        throw ValidationError(fmt::format("profile '{}': a_f must be finite and > 0 when present", profile.device_id));
    }
}

std::uint64_t clf(const FcLayerSpec& layer) {
    validate(layer);
    return checked_mul(layer.i_size, layer.o_size, "clf");
}

std::uint64_t conv_out_side(const ConvLayerSpec& layer) {
    validate(layer);
    // ksize <= padded side was validated, so the subtraction cannot wrap.
    return (padded_side(layer) - layer.ksize) / layer.stride + 1;
}

std::uint64_t kclc_exact(const ConvLayerSpec& layer) {
    std::uint64_t side = conv_out_side(layer);
    std::uint64_t macs = checked_mul(side, side, "kclc");
    macs = checked_mul(macs, layer.ifm, "kclc");
    macs = checked_mul(macs, checked_mul(layer.ksize, layer.ksize, "kclc"), "kclc");
    return macs;
}

double kclc_approx(const ConvLayerSpec& layer) {
    validate(layer);
    if (layer.padding != 0) {
        throw ValidationError("kclc approximation is only defined for padding == 0");
    }
    double side = static_cast<double>(layer.i_size) / static_cast<double>(layer.stride);
    double macs = side * side * static_cast<double>(layer.ifm) *
                  static_cast<double>(layer.ksize) * static_cast<double>(layer.ksize);
    if (!std::isfinite(macs)) {
        throw ValidationError("kclc approximation overflows the double range");
    }
    return macs;
}

std::uint64_t clc_exact(const ConvLayerSpec& layer) {
    return checked_mul(kclc_exact(layer), layer.ofm, "clc");
}

double clc_approx(const ConvLayerSpec& layer) {
    double macs = kclc_approx(layer) * static_cast<double>(layer.ofm);
    if (!std::isfinite(macs)) {
        throw ValidationError("clc approximation overflows the double range");
    }
    return macs;
}

std::uint64_t layer_load(const LayerSpec& layer) {
    return layer.is_fc() ? clf(layer.fc()) : clc_exact(layer.conv());
}

}  // namespace edgewatt
