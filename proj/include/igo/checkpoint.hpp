#pragma once

#include <string>
#include <vector>

#include "igo/tape.hpp"

namespace igo {

// Text header (format tag, parameter names and shapes) followed by the raw
// little-endian doubles of every tensor in declared order. Round-trips are
// bit exact.
void save_checkpoint(const std::string& path,
                     const std::vector<const Param*>& params);

// Loads into an existing parameter list. Names and shapes must match the
// file in order; every loaded parameter gets its version bumped.
void load_checkpoint(const std::string& path,
                     const std::vector<Param*>& params);

}  // namespace igo
