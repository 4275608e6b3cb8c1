#pragma once

#include <string>
#include <vector>

#include "edgewatt/arch.hpp"

namespace edgewatt::profiles {

struct ResolvedProfile {
    DeviceProfile profile;
    std::string source;  // "bundled" or the path of the user file
};

// Profiles shipped with the tool (read-only).
const std::vector<DeviceProfile>& bundled();

// Bundled profiles merged with *.json files from EDGEWATT_PROFILE_DIR;
// a user profile replaces a bundled one with the same device_id.
// Unreadable user files are reported through `warnings`, not fatal.
std::vector<ResolvedProfile> list_all(std::vector<std::string>* warnings = nullptr);

// Looks a device id up in the merged set; throws ValidationError if unknown.
DeviceProfile resolve(const std::string& device_id);

}  // namespace edgewatt::profiles
