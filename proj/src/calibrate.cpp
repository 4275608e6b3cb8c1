#include "edgewatt/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

namespace edgewatt {

ThroughOriginFit fit_slope_through_origin(const FitDataset& data) {
    if (data.points.size() < 2) {
        throw ValidationError("fit_slope_through_origin: need at least 2 points");
    }
    double sxx = 0.0;
    double sxy = 0.0;
    for (const FitPoint& p : data.points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
            throw ValidationError("fit_slope_through_origin: non-finite point");
        }
        sxx += p.x * p.x;
        sxy += p.x * p.y;
    }
    if (sxx == 0.0) {
        throw ValidationError("fit_slope_through_origin: all x are zero");
    }
    ThroughOriginFit fit;
    fit.slope = sxy / sxx;
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (const FitPoint& p : data.points) {
        double r = p.y - fit.slope * p.x;
        ss_res += r * r;
        ss_tot += p.y * p.y;
    }
    fit.r2 = ss_tot == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0);
    return fit;
}

PerOfmSlopes per_ofm_slopes(const std::vector<ConfigEnergyStats>& stats,
                            const TraceManifest& manifest) {
    std::map<std::uint64_t, FitDataset> groups;
    std::map<std::uint64_t, std::set<std::uint64_t>> loads_seen;
    for (const ConfigEnergyStats& s : stats) {
        auto it = manifest.configs.find(s.config_id);
        if (it == manifest.configs.end()) {
            throw ValidationError(
                fmt::format("config '{}' is not present in the manifest", s.config_id));
        }
        if (!it->second.is_conv()) {
            continue;
        }
        std::uint64_t ofm = it->second.conv().ofm;
        groups[ofm].points.push_back(
            {static_cast<double>(s.computational_load), s.mean_energy_j});
        loads_seen[ofm].insert(s.computational_load);
    }
    PerOfmSlopes out;
    for (auto& [ofm, data] : groups) {
        if (loads_seen[ofm].size() < 2) {
            out.skipped.push_back({ofm, data.points.size(),
                                   "fewer than 2 distinct load values; slope not identifiable"});
            continue;
        }
        ThroughOriginFit fit = fit_slope_through_origin(data);
        out.samples.push_back({ofm, fit.slope, data.points.size(), fit.r2});
    }
    return out;
}

HyperbolicFit fit_hyperbolic(const std::vector<SlopeSample>& samples) {
    if (samples.size() < 2) {
        throw ValidationError("fit_hyperbolic: degenerate design (need at least 2 slope samples)");
    }
    std::set<std::uint64_t> distinct;
    for (const SlopeSample& s : samples) {
        if (s.ofm < 1) {
            throw ValidationError("fit_hyperbolic: ofm must be >= 1");
        }
        distinct.insert(s.ofm);
    }
    if (distinct.size() < 2) {
        throw ValidationError("fit_hyperbolic: degenerate design (all ofm values equal)");
    }
    const double n = static_cast<double>(samples.size());
    double sum_inv_x = 0.0;
    double sum_inv_x2 = 0.0;
    double sum_y = 0.0;
    double sum_y_over_x = 0.0;
    for (const SlopeSample& s : samples) {
        double x = static_cast<double>(s.ofm);
        double y = s.slope_j_per_mac;
        sum_inv_x += 1.0 / x;
        sum_inv_x2 += 1.0 / (x * x);
        sum_y += y;
        sum_y_over_x += y / x;
    }
    HyperbolicFit fit;
    fit.n = samples.size();
    fit.a_c = (sum_y_over_x - sum_inv_x * sum_y / n) / (sum_inv_x2 - sum_inv_x * sum_inv_x / n);
    fit.b_c = (sum_y - fit.a_c * sum_inv_x) / n;
    double ss = 0.0;
    for (const SlopeSample& s : samples) {
        double r = fit.a_c / static_cast<double>(s.ofm) + fit.b_c - s.slope_j_per_mac;
        ss += r * r;
    }
    fit.mse = ss / n;
    return fit;
}

FcFit fit_fc(const std::vector<ConfigEnergyStats>& fc_stats) {
    if (fc_stats.size() < 2) {
        throw ValidationError("fit_fc: degenerate design (need at least 2 fc configs)");
    }
    FitDataset data;
    data.meaning = FitMeaning::load_vs_energy;
    for (const ConfigEnergyStats& s : fc_stats) {
        data.points.push_back({static_cast<double>(s.computational_load), s.mean_energy_j});
    }
    ThroughOriginFit fit = fit_slope_through_origin(data);
    double ss = 0.0;
    for (const FitPoint& p : data.points) {
        double r = fit.slope * p.x - p.y;
        ss += r * r;
    }
    return FcFit{fit.slope, ss / static_cast<double>(data.points.size()), data.points.size()};
}

DeviceProfile build_profile(const HyperbolicFit& hfit, const std::optional<FcFit>& ffit,
                            const std::string& device_id) {
    DeviceProfile profile;
    profile.device_id = device_id;
    profile.a_c = hfit.a_c;
    profile.b_c = hfit.b_c;
    if (ffit) {
        profile.a_f = ffit->a_f;
    }
    validate(profile);
    return profile;
}

CalibrationReport calibrate_device(const std::vector<ConfigEnergyStats>& stats,
                                   const TraceManifest& manifest, const std::string& device_id) {
    CalibrationReport report;
    report.per_ofm = per_ofm_slopes(stats, manifest);
    for (const SkippedOfmGroup& g : report.per_ofm.skipped) {
        report.warnings.push_back(
            fmt::format("ofm group {} skipped ({} points): {}", g.ofm, g.n_points, g.reason));
    }
    report.hyperbolic = fit_hyperbolic(report.per_ofm.samples);

    std::vector<ConfigEnergyStats> fc_stats;
    for (const ConfigEnergyStats& s : stats) {
        auto it = manifest.configs.find(s.config_id);
        if (it != manifest.configs.end() && it->second.is_fc()) {
            fc_stats.push_back(s);
        }
    }
    if (fc_stats.size() >= 2) {
        report.fc = fit_fc(fc_stats);
    } else {
        report.warnings.push_back(fmt::format(
            "{} fully connected config(s) in the campaign; a_f left uncalibrated",
            fc_stats.size()));
    }
    report.profile = build_profile(report.hyperbolic, report.fc, device_id);
    return report;
}

}  // namespace edgewatt
