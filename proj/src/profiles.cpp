#include "edgewatt/profiles.hpp"

#include <cstdlib>
#include <filesystem>
#include <map>

#include <fmt/format.h>

#include "edgewatt/io.hpp"

namespace fs = std::filesystem;

namespace edgewatt::profiles {

const std::vector<DeviceProfile>& bundled() {
    static const std::vector<DeviceProfile> profiles = {
        DeviceProfile{"jetson-tx2", 2.6727e-8, 1.21334e-10, std::nullopt},
        DeviceProfile{"jetson-xavier-nx", 2.8674e-8, 4.7639e-10, 6.2454e-9},
    };
    return profiles;
}

std::vector<ResolvedProfile> list_all(std::vector<std::string>* warnings) {
    std::map<std::string, ResolvedProfile> merged;
    for (const DeviceProfile& p : bundled()) {
        merged[p.device_id] = ResolvedProfile{p, "bundled"};
    }
    if (const char* dir = std::getenv("EDGEWATT_PROFILE_DIR")) {
        std::error_code ec;
        for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
            if (entry.path().extension() != ".json") {
                continue;
            }
            try {
                DeviceProfile p = io::load_profile(entry.path());
                merged[p.device_id] = ResolvedProfile{std::move(p), entry.path().string()};
            } catch (const std::exception& e) {
                if (warnings) {
                    warnings->push_back(
                        fmt::format("skipping profile {}: {}", entry.path().string(), e.what()));
                }
            }
        }
        if (ec && warnings) {
            warnings->push_back(fmt::format("cannot read EDGEWATT_PROFILE_DIR '{}': {}", dir,
                                            ec.message()));
        }
    }
    std::vector<ResolvedProfile> out;
    out.reserve(merged.size());
    for (auto& [id, p] : merged) {
        out.push_back(std::move(p));
    }
    return out;
}

DeviceProfile resolve(const std::string& device_id) {
    for (const ResolvedProfile& p : list_all()) {
        if (p.profile.device_id == device_id) {
            return p.profile;
        }
    }
    throw ValidationError(fmt::format(
        "unknown device '{}'; run the devices subcommand for the available ids", device_id));
}

}  // namespace edgewatt::profiles
