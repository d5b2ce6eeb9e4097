#pragma once

#include <string>

namespace gwcal::scenario_gen {

/// Writes the bundled synthetic valley scenario into `dir`: a 60 x 40 x 3
/// grid with a central river corridor between two higher plains, three
/// conductivity zones, spring drains along the plain-valley transitions,
/// rice-field recharge blocks, three weekly met stations, four sub-basins,
/// twenty observation wells (truth solve plus fixed-seed noise), and a
/// ready-to-run configuration file `config.json`. Deterministic: repeated
/// calls produce byte-identical files.
void write_synthetic_scenario(const std::string& dir);

}  // namespace gwcal::scenario_gen
