#pragma once

#include <string>

#include "memjoin/types.hpp"

namespace memjoin {

/// JSON document form of a MachineProfile, stable across versions.
std::string profile_to_json(const MachineProfile& p);
MachineProfile profile_from_json(const std::string& text);

void save_profile(const MachineProfile& p, const std::string& path);
MachineProfile load_profile(const std::string& path);

}  // namespace memjoin
