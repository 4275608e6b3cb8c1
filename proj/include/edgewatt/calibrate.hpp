#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgewatt/arch.hpp"
#include "edgewatt/trace.hpp"

namespace edgewatt {

enum class FitMeaning { ofm_vs_slope, load_vs_energy };

struct FitPoint {
    double x = 0.0;
    double y = 0.0;
};

struct FitDataset {
    std::vector<FitPoint> points;
    FitMeaning meaning = FitMeaning::load_vs_energy;
};

struct ThroughOriginFit {
    double slope = 0.0;
    double r2 = 0.0;  // against the through-origin model, clamped to [0, 1]
};

// Energy-vs-load slope measured at one fixed ofm value.
struct SlopeSample {
    std::uint64_t ofm = 0;
    double slope_j_per_mac = 0.0;
    std::size_t n_points = 0;
    double r2 = 0.0;
};

struct SkippedOfmGroup {
    std::uint64_t ofm = 0;
    std::size_t n_points = 0;
    std::string reason;
};

struct PerOfmSlopes {
    std::vector<SlopeSample> samples;  // ascending ofm
    std::vector<SkippedOfmGroup> skipped;
};

// Coefficients of the hyperbolic slope model H(ofm) = a_c / ofm + b_c.
struct HyperbolicFit {
    double a_c = 0.0;
    double b_c = 0.0;
    double mse = 0.0;
    std::size_t n = 0;
};

// Fully connected energy slope; the intercept is zero by construction.
struct FcFit {
    double a_f = 0.0;
    double mse = 0.0;
    std::size_t n = 0;
};

// Least squares line through the origin: slope = sum(x*y) / sum(x^2).
ThroughOriginFit fit_slope_through_origin(const FitDataset& data);

// One through-origin (load, mean energy) fit per ofm group of the
// convolutional configs. Groups with fewer than two distinct loads are
// skipped and reported, not fatal.
PerOfmSlopes per_ofm_slopes(const std::vector<ConfigEnergyStats>& stats,
                            const TraceManifest& manifest);

// Closed-form least squares estimate of (a_c, b_c) from (ofm, slope) pairs.
// Requires at least two distinct ofm values ("degenerate design" otherwise).
HyperbolicFit fit_hyperbolic(const std::vector<SlopeSample>& samples);

// Through-origin fit of mean energy against CLF over fully connected configs.
FcFit fit_fc(const std::vector<ConfigEnergyStats>& fc_stats);

// Packages fits into a device profile. Validates the profile invariants.
DeviceProfile build_profile(const HyperbolicFit& hfit, const std::optional<FcFit>& ffit,
                            const std::string& device_id);

// The whole calibration: per-ofm slopes, hyperbolic fit, optional FC fit.
struct CalibrationReport {
    DeviceProfile profile;
    HyperbolicFit hyperbolic;
    PerOfmSlopes per_ofm;
    std::optional<FcFit> fc;
    std::vector<std::string> warnings;
};

CalibrationReport calibrate_device(const std::vector<ConfigEnergyStats>& stats,
                                   const TraceManifest& manifest, const std::string& device_id);

}  // namespace edgewatt
