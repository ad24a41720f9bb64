#pragma once

#include <string_view>
#include <vector>

#include "vessel/grid/model.hpp"

namespace vessel::grid {

enum class FixtureName { AcVessel, DcVessel };

/// Cable-laying vessel with a three-section 690 V propulsion busbar and
/// superyacht with a split 650 V DC main bus. Machine dynamics, cable
/// impedances and battery/DC-link values not published with the vessels are
/// synthetic and flagged as such.
GridModel builtin_fixture(FixtureName name);

/// Name lookup for "ac_vessel"/"dc_vessel"; throws InputError otherwise.
GridModel builtin_fixture(std::string_view name);

std::vector<std::string_view> builtin_fixture_names();

}  // namespace vessel::grid
