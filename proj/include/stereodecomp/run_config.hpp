#pragma once

#include <iosfwd>
#include <string>

#include "stereodecomp/pipeline.hpp"

namespace stereodecomp {

// Flat `key = value` pipeline configuration with '#' comments. Unknown keys
// are rejected. Recognized keys:
//   levels, scale, max_disparity, feature_channels, alpha (number or auto),
//   sigma_v, tau_lrc, refine_radius, agg_radius, rematch_min_gap,
//   fusion (soft|hard|off),
//   refine (on|off), guidance (on|off), bidirectional (on|off), condition_c
PipelineConfig parse_run_config(std::istream& in);
PipelineConfig parse_run_config_file(const std::string& path);

}  // namespace stereodecomp
